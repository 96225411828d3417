#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stealth {

using BusId = int;

struct BranchRecord {
    BusId from_bus = 0;
    BusId to_bus = 0;
    double reactance_x = 0.0;  // p.u.
    bool in_service = true;

    bool operator==(const BranchRecord&) const = default;
};

/// A validated subset of a MATPOWER case: topology, series reactance and
/// branch status. Buses and branches keep file order.
struct GridCase {
    double base_mva = 100.0;
    std::vector<BusId> buses;
    std::vector<BranchRecord> branches;
    BusId reference_bus = 0;

    bool operator==(const GridCase&) const = default;
};

/// Parses `mpc.baseMVA`, `mpc.bus` and `mpc.branch`; every other statement
/// (function header, gen, gencost, cell arrays, ...) is skipped.
///
/// Branch columns read: 1 fbus, 2 tbus, 4 x, 11 status. Bus columns read:
/// 1 bus_i, 2 type. The reference bus is the first bus of type 3, else the
/// first declared bus.
///
/// Throws SyntaxError (with line number) for malformed blocks and
/// ValidationError for violated GridCase invariants.
GridCase parse_case(std::string_view text);

/// Reads and parses a case file. Throws ValidationError naming the path when
/// the file cannot be opened.
GridCase load_case_file(const std::filesystem::path& path);

/// Checks the GridCase invariants; throws ValidationError/EmptyGridError.
void validate_case(const GridCase& grid_case);

/// In-service branches in file order. This ordering is the branch index
/// e_1..e_l used by every downstream matrix. Throws EmptyGridError if empty.
std::vector<BranchRecord> in_service_branches(const GridCase& grid_case);

/// Renders a case in the supported grammar. parse_case(render_case(c)) == c.
std::string render_case(const GridCase& grid_case);

}  // namespace stealth
