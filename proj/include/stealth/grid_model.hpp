#pragma once

#include <optional>
#include <vector>

#include "stealth/case_ingest.hpp"
#include "stealth/linalg.hpp"

namespace stealth {

/// DC measurement model of a grid: bus injections plus forward and reverse
/// branch flows, with voltage angles (reference removed) as states.
///
///   H = J·diag(b)·A,   J = [Aᵀ; I; -I]
///
/// Branch index i refers to the i-th in-service branch in file order; state
/// column j refers to the j-th non-reference bus in file order.
struct GridModel {
    Matrix incidence;    // A, l×n
    Vector susceptance;  // b, length l
    Matrix stacking;     // J, (n+2l)×l
    Matrix jacobian;     // H, m×n

    std::vector<BranchRecord> branches;  // in-service, defines the branch index
    std::vector<BusId> state_buses;      // dense state column -> bus id
    BusId reference_bus = 0;

    Eigen::Index states() const { return incidence.cols(); }       // n
    Eigen::Index branch_count() const { return incidence.rows(); }  // l
    Eigen::Index measurements() const { return jacobian.rows(); }   // m = n + 2l

    /// State column of a bus; nullopt for the reference bus or unknown ids.
    std::optional<Eigen::Index> column_of_bus(BusId id) const;
};

/// Reduced branch-bus incidence matrix: +1 at the from-bus column, -1 at the
/// to-bus column, reference column removed.
Matrix incidence_matrix(const GridCase& grid_case);

/// DC susceptances b_i = 1 / x_i of the in-service branches.
Vector susceptance_diag(const GridCase& grid_case);

struct JacobianParts {
    Matrix stacking;  // J
    Matrix jacobian;  // H
};

JacobianParts jacobian(const Eigen::Ref<const Matrix>& incidence, const Eigen::Ref<const Vector>& susceptance);

GridModel build_grid_model(const GridCase& grid_case);

struct ConnectivityReport {
    bool connected = false;
    std::size_t components = 0;
    Eigen::Index rank = 0;
    Eigen::Index states = 0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;

    bool full_rank() const { return rank == states; }
};

/// Union-find connectivity over all buses (reference included) and numerical
/// rank of H with singular values above rank_tol·σ_max.
ConnectivityReport check_connectivity_and_rank(const GridModel& model, double rank_tol = 1e-9);

/// Throws DisconnectedGridError when the model fails either check.
void require_connected(const GridModel& model);

}  // namespace stealth
