#include "stealth/grid_model.hpp"

#include <map>
#include <numeric>
#include <string>

#include "stealth/errors.hpp"

namespace stealth {
namespace {

std::vector<BusId> non_reference_buses(const GridCase& grid_case) {
    std::vector<BusId> out;
    out.reserve(grid_case.buses.size());
    for (BusId id : grid_case.buses) {
        if (id != grid_case.reference_bus) out.push_back(id);
    }
    return out;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::optional<Eigen::Index> GridModel::column_of_bus(BusId id) const {
    for (std::size_t j = 0; j < state_buses.size(); ++j) {
        if (state_buses[j] == id) return static_cast<Eigen::Index>(j);
    }
    return std::nullopt;
}

Matrix incidence_matrix(const GridCase& grid_case) {
    const auto branches = in_service_branches(grid_case);
    const auto states = non_reference_buses(grid_case);
    std::map<BusId, Eigen::Index> column;
    for (std::size_t j = 0; j < states.size(); ++j) column[states[j]] = static_cast<Eigen::Index>(j);

    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(branches.size()), static_cast<Eigen::Index>(states.size()));
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        if (auto it = column.find(branches[k].from_bus); it != column.end()) a(row, it->second) = 1.0;
        if (auto it = column.find(branches[k].to_bus); it != column.end()) a(row, it->second) = -1.0;
    }
    return a;
}

Vector susceptance_diag(const GridCase& grid_case) {
    const auto branches = in_service_branches(grid_case);
    Vector b(static_cast<Eigen::Index>(branches.size()));
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (branches[k].reactance_x == 0.0) {
            throw ValidationError("branch " + std::to_string(k + 1) + " has zero reactance");
        }
        b(static_cast<Eigen::Index>(k)) = 1.0 / branches[k].reactance_x;
    }
    return b;
}

JacobianParts jacobian(const Eigen::Ref<const Matrix>& incidence, const Eigen::Ref<const Vector>& susceptance) {
    const Eigen::Index l = incidence.rows();
    const Eigen::Index n = incidence.cols();
    JacobianParts out;
    out.stacking.resize(n + 2 * l, l);
    out.stacking << incidence.transpose(), Matrix::Identity(l, l), -Matrix::Identity(l, l);
    out.jacobian = out.stacking * susceptance.asDiagonal() * incidence;
    return out;
}

GridModel build_grid_model(const GridCase& grid_case) {
    validate_case(grid_case);
    GridModel model;
    model.branches = in_service_branches(grid_case);
    model.state_buses = non_reference_buses(grid_case);
    model.reference_bus = grid_case.reference_bus;
    model.incidence = incidence_matrix(grid_case);
    model.susceptance = susceptance_diag(grid_case);
    auto parts = jacobian(model.incidence, model.susceptance);
    model.stacking = std::move(parts.stacking);
    model.jacobian = std::move(parts.jacobian);
    return model;
}

ConnectivityReport check_connectivity_and_rank(const GridModel& model, double rank_tol) {
    ConnectivityReport report;
    report.states = model.states();

    std::map<BusId, std::size_t> node;
    node[model.reference_bus] = 0;
    for (BusId id : model.state_buses) node.emplace(id, node.size());
    UnionFind uf(node.size());
    std::size_t components = node.size();
    for (const auto& br : model.branches) {
        if (uf.unite(node.at(br.from_bus), node.at(br.to_bus))) --components;
    }
    report.components = components;
    report.connected = components == 1;

    if (model.jacobian.size() > 0) {
        Eigen::JacobiSVD<Matrix> svd(model.jacobian);
        const Vector& sv = svd.singularValues();
        report.sigma_max = sv(0);
        report.sigma_min = sv(sv.size() - 1);
        const double cut = rank_tol * report.sigma_max;
        report.rank = (sv.array() > cut).count();
    }
    return report;
}

void require_connected(const GridModel& model) {
    const auto report = check_connectivity_and_rank(model);
    if (!report.connected) {
        throw DisconnectedGridError("grid graph has " + std::to_string(report.components) + " components");
    }
    if (!report.full_rank()) {
        throw DisconnectedGridError("Jacobian rank " + std::to_string(report.rank) + " < " +
                                    std::to_string(report.states) + " states");
    }
}

}  // namespace stealth
