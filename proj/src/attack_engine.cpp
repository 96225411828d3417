#include "stealth/attack_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "stealth/csv_io.hpp"
#include "stealth/errors.hpp"

namespace stealth {
namespace {

void check_support(const std::vector<BranchIndex>& support, Eigen::Index l) {
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0 || support[i] >= l) {
            throw ValidationError("support index " + std::to_string(support[i] + 1) + " outside 1.." +
                                  std::to_string(l));
        }
        if (i > 0 && support[i] <= support[i - 1]) {
            throw ValidationError("support must be strictly ascending");
        }
    }
}

void check_off_support_zero(const std::vector<BranchIndex>& support, const Vector& v, const char* name) {
    std::vector<bool> on(static_cast<std::size_t>(v.size()), false);
    for (auto i : support) on[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i))) throw ValidationError(std::string(name) + " has a non-finite entry");
        if (!on[static_cast<std::size_t>(i)] && v(i) != 0.0) {
            throw ValidationError(std::string(name) + " is nonzero off the support at branch " +
                                  std::to_string(i + 1));
        }
    }
}

// Sorts (index, values...) rows by branch index and rejects duplicates.
std::vector<std::size_t> ascending_order(const std::vector<BranchIndex>& support) {
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return support[a] < support[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (support[order[i]] == support[order[i - 1]]) {
            throw ValidationError("branch " + std::to_string(support[order[i]] + 1) + " listed twice");
        }
    }
    return order;
}

BranchIndex to_branch_index(long long one_based, Eigen::Index l, std::size_t line) {
    if (one_based < 1 || one_based > l) {
        throw ValidationError("line " + std::to_string(line) + ": branch_index " + std::to_string(one_based) +
                              " outside 1.." + std::to_string(l));
    }
    return static_cast<BranchIndex>(one_based - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// IncompletenessSpec

bool IncompletenessSpec::has_zeroed_branch() const {
    return std::any_of(support.begin(), support.end(), [&](auto i) { return phi(i) == -1.0; });
}

void IncompletenessSpec::validate() const {
    const Eigen::Index l = phi.size();
    if (phi_min.size() != l || phi_max.size() != l) {
        throw ValidationError("phi, phi_min and phi_max must have the same length");
    }
    check_support(support, l);
    check_off_support_zero(support, phi, "phi");
    check_off_support_zero(support, phi_min, "phi_min");
    check_off_support_zero(support, phi_max, "phi_max");
    for (auto i : support) {
        if (!(phi_min(i) <= phi(i) && phi(i) <= phi_max(i))) {
            throw ValidationError("phi outside [phi_min, phi_max] at branch " + std::to_string(i + 1));
        }
    }
}

IncompletenessSpec IncompletenessSpec::complete(Eigen::Index l) {
    return IncompletenessSpec{{}, Vector::Zero(l), Vector::Zero(l), Vector::Zero(l)};
}

IncompletenessSpec IncompletenessSpec::uniform(Eigen::Index l, double beta) {
    return full(Vector::Constant(l, beta));
}

IncompletenessSpec IncompletenessSpec::full(const Eigen::Ref<const Vector>& phi) {
    std::vector<BranchIndex> support(static_cast<std::size_t>(phi.size()));
    std::iota(support.begin(), support.end(), BranchIndex{0});
    IncompletenessSpec spec{std::move(support), phi, phi, phi};
    spec.validate();
    return spec;
}

IncompletenessSpec IncompletenessSpec::on_support(Eigen::Index l, std::vector<BranchIndex> support,
                                                  const std::vector<double>& values) {
    if (values.size() != support.size()) throw ValidationError("one phi value per support index required");
    const auto order = ascending_order(support);
    IncompletenessSpec spec = complete(l);
    for (auto o : order) spec.support.push_back(support[o]);
    check_support(spec.support, l);
    for (auto o : order) {
        spec.phi(support[o]) = values[o];
        spec.phi_min(support[o]) = values[o];
        spec.phi_max(support[o]) = values[o];
    }
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// IncompletenessBounds

void IncompletenessBounds::validate() const {
    const Eigen::Index l = phi_min.size();
    if (phi_max.size() != l) throw ValidationError("phi_min and phi_max must have the same length");
    check_support(support, l);
    check_off_support_zero(support, phi_min, "phi_min");
    check_off_support_zero(support, phi_max, "phi_max");
    for (auto i : support) {
        if (!(phi_min(i) <= phi_max(i))) {
            throw ValidationError("phi_min > phi_max at branch " + std::to_string(i + 1));
        }
    }
}

IncompletenessSpec IncompletenessBounds::at(const Eigen::Ref<const Vector>& phi) const {
    if (phi.size() != phi_min.size()) throw ValidationError("phi has the wrong length");
    IncompletenessSpec spec{support, phi, phi_min, phi_max};
    spec.validate();
    return spec;
}

double IncompletenessBounds::alpha() const { return (phi_max - phi_min).norm(); }

IncompletenessBounds IncompletenessBounds::on_support(Eigen::Index l, std::vector<BranchIndex> support,
                                                     const std::vector<double>& lower,
                                                     const std::vector<double>& upper) {
    if (lower.size() != support.size() || upper.size() != support.size()) {
        throw ValidationError("one bound pair per support index required");
    }
    const auto order = ascending_order(support);
    IncompletenessBounds b{{}, Vector::Zero(l), Vector::Zero(l)};
    for (auto o : order) b.support.push_back(support[o]);
    check_support(b.support, l);
    for (auto o : order) {
        b.phi_min(support[o]) = lower[o];
        b.phi_max(support[o]) = upper[o];
    }
    b.validate();
    return b;
}

// ---------------------------------------------------------------------------
// Covariance construction

Vector perturbed_admittance(const Eigen::Ref<const Vector>& susceptance, const IncompletenessSpec& spec) {
    Vector out = susceptance;
    for (auto i : spec.support) out(i) = (1.0 + spec.phi(i)) * susceptance(i);
    return out;
}

Matrix perturbed_jacobian(const GridModel& model, const IncompletenessSpec& spec) {
    const Vector d_prime = perturbed_admittance(model.susceptance, spec);
    return model.stacking * d_prime.asDiagonal() * model.incidence;
}

Matrix branch_angle_cov(const GridModel& model, const Eigen::Ref<const Matrix>& state_cov) {
    return symmetrize(model.incidence * state_cov * model.incidence.transpose());
}

Matrix delta_matrix(const Eigen::Ref<const Matrix>& branch_cov, const Eigen::Ref<const Vector>& phi) {
    const auto p = phi.asDiagonal();
    const Matrix pw = p * branch_cov;
    return symmetrize(pw + branch_cov * p + pw * p);
}

Matrix delta_matrix(const GridModel& model, const Eigen::Ref<const Matrix>& state_cov,
                    const IncompletenessSpec& spec) {
    return delta_matrix(branch_angle_cov(model, state_cov), spec.phi);
}

Matrix lift_branch_cov(const GridModel& model, const Eigen::Ref<const Matrix>& q) {
    const Matrix jd = model.stacking * model.susceptance.asDiagonal();
    return symmetrize(jd * q * jd.transpose());
}

AttackArtifacts attack_covariances(const GridModel& model, const ScenarioStats& stats,
                                   const IncompletenessSpec& spec) {
    AttackArtifacts out;
    out.d_prime = perturbed_admittance(model.susceptance, spec);
    out.h_prime = model.stacking * out.d_prime.asDiagonal() * model.incidence;
    const Matrix w = branch_angle_cov(model, stats.state_cov);
    out.delta = delta_matrix(w, spec.phi);
    out.cov_opt = stats.optimal_attack;
    out.cov_incomplete = symmetrize(out.h_prime * stats.state_cov * out.h_prime.transpose());
    out.cov_attacked_meas = stats.measurement_cov + out.cov_incomplete;
    out.t_matrix = lift_branch_cov(model, w + out.delta);
    return out;
}

double equivalence_residual(const AttackArtifacts& artifacts, const GridModel& model) {
    const Matrix lifted = lift_branch_cov(model, artifacts.delta);
    const double r = (artifacts.cov_incomplete - artifacts.cov_opt - lifted).norm();
    return r / std::max(1.0, artifacts.cov_opt.norm());
}

MtdPlan mtd_admittance(const Eigen::Ref<const Vector>& d_prime, const IncompletenessSpec& spec) {
    MtdPlan plan;
    plan.admittance = d_prime;
    plan.zeroed.assign(static_cast<std::size_t>(d_prime.size()), false);
    for (auto i : spec.support) {
        const double phi = spec.phi(i);
        if (phi == -1.0) {
            plan.admittance(i) = 0.0;
            plan.zeroed[static_cast<std::size_t>(i)] = true;
            plan.any_zeroed = true;
        } else {
            plan.admittance(i) = d_prime(i) / (1.0 + phi);
        }
    }
    return plan;
}

// ---------------------------------------------------------------------------
// CSV

std::string write_spec_csv(const IncompletenessSpec& spec) {
    std::ostringstream os;
    os << "branch_index,phi,phi_min,phi_max\n";
    for (auto i : spec.support) {
        os << (i + 1) << ',' << csv::format_real(spec.phi(i)) << ',' << csv::format_real(spec.phi_min(i)) << ','
           << csv::format_real(spec.phi_max(i)) << '\n';
    }
    return os.str();
}

IncompletenessSpec read_spec_csv(std::string_view text, Eigen::Index l) {
    const auto table = csv::parse(text);
    const auto c_idx = table.column("branch_index");
    const auto c_phi = table.column("phi");
    const bool bounded = table.has_column("phi_min") || table.has_column("phi_max");
    std::vector<BranchIndex> support;
    std::vector<double> phi, lo, hi;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.row_lines[r];
        support.push_back(to_branch_index(csv::parse_integer(row[c_idx], line), l, line));
        phi.push_back(csv::parse_real(row[c_phi], line));
        lo.push_back(bounded ? csv::parse_real(row[table.column("phi_min")], line) : phi.back());
        hi.push_back(bounded ? csv::parse_real(row[table.column("phi_max")], line) : phi.back());
    }
    auto bounds = IncompletenessBounds::on_support(l, support, lo, hi);
    Vector full = Vector::Zero(l);
    for (std::size_t r = 0; r < support.size(); ++r) full(support[r]) = phi[r];
    return bounds.at(full);
}

IncompletenessBounds read_bounds_csv(std::string_view text, Eigen::Index l) {
    const auto table = csv::parse(text);
    const auto c_idx = table.column("branch_index");
    const auto c_lo = table.column("phi_min");
    const auto c_hi = table.column("phi_max");
    std::vector<BranchIndex> support;
    std::vector<double> lo, hi;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.row_lines[r];
        support.push_back(to_branch_index(csv::parse_integer(row[c_idx], line), l, line));
        lo.push_back(csv::parse_real(row[c_lo], line));
        hi.push_back(csv::parse_real(row[c_hi], line));
    }
    return IncompletenessBounds::on_support(l, support, lo, hi);
}

std::string write_bounds_csv(const IncompletenessBounds& bounds) {
    std::ostringstream os;
    os << "branch_index,phi_min,phi_max\n";
    for (auto i : bounds.support) {
        os << (i + 1) << ',' << csv::format_real(bounds.phi_min(i)) << ',' << csv::format_real(bounds.phi_max(i))
           << '\n';
    }
    return os.str();
}

}  // namespace stealth
