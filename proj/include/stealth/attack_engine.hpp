#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stealth/grid_model.hpp"
#include "stealth/linalg.hpp"
#include "stealth/stochastics.hpp"

namespace stealth {

/// Branch indices are 0-based internally and 1-based in every CSV.
using BranchIndex = Eigen::Index;

/// Per-branch incompleteness ratios φ_i = Δb_i / b_i on a support set E_I,
/// with the box bounds they were drawn from. All vectors have length l and
/// are zero off the support.
struct IncompletenessSpec {
    std::vector<BranchIndex> support;  // ascending, unique
    Vector phi;
    Vector phi_min;
    Vector phi_max;

    Eigen::Index branch_count() const { return phi.size(); }
    std::size_t k() const { return support.size(); }

    /// Some φ_i == -1: the attacker believes that branch carries no flow, and
    /// the operator-side inversion for it is undefined.
    bool has_zeroed_branch() const;

    /// Throws ValidationError on any broken invariant.
    void validate() const;

    /// φ = 0 on an empty support (complete information).
    static IncompletenessSpec complete(Eigen::Index l);
    /// Φ = βI on the full support, bounds pinned at β.
    static IncompletenessSpec uniform(Eigen::Index l, double beta);
    /// Full-support φ, bounds pinned at φ.
    static IncompletenessSpec full(const Eigen::Ref<const Vector>& phi);
    /// φ given on `support` (values in support order), bounds pinned at φ.
    static IncompletenessSpec on_support(Eigen::Index l, std::vector<BranchIndex> support,
                                         const std::vector<double>& values);
};

/// Box [φ_min, φ_max] on a support set: the feasible region of the stealth
/// degradation problem.
struct IncompletenessBounds {
    std::vector<BranchIndex> support;
    Vector phi_min;  // length l, zero off support
    Vector phi_max;

    Eigen::Index branch_count() const { return phi_min.size(); }
    std::size_t k() const { return support.size(); }

    void validate() const;

    /// The spec at a point φ inside the box. Throws ValidationError if φ is
    /// outside the box or nonzero off the support.
    IncompletenessSpec at(const Eigen::Ref<const Vector>& phi) const;

    /// ‖Φ_max - Φ_min‖_F
    double alpha() const;

    /// Bounds given in support order.
    static IncompletenessBounds on_support(Eigen::Index l, std::vector<BranchIndex> support,
                                           const std::vector<double>& lower, const std::vector<double>& upper);
};

struct AttackArtifacts {
    Vector d_prime;             // attacker's susceptances
    Matrix h_prime;             // attacker's Jacobian H'
    Matrix delta;               // Δ, l×l
    Matrix cov_opt;             // H Σ_XX Hᵀ
    Matrix cov_incomplete;      // H' Σ_XX H'ᵀ
    Matrix cov_attacked_meas;   // Σ_YY + H' Σ_XX H'ᵀ
    Matrix t_matrix;            // J D (A Σ_XX Aᵀ + Δ) D Jᵀ
};

/// b'_i = (1 + φ_i) b_i on the support, b_i elsewhere.
Vector perturbed_admittance(const Eigen::Ref<const Vector>& susceptance, const IncompletenessSpec& spec);

/// H' = J (I + Φ) D A.
Matrix perturbed_jacobian(const GridModel& model, const IncompletenessSpec& spec);

/// W = A Σ_XX Aᵀ, the covariance of the branch angle differences.
Matrix branch_angle_cov(const GridModel& model, const Eigen::Ref<const Matrix>& state_cov);

/// Δ = ΦW + WΦᵀ + ΦWΦᵀ.
Matrix delta_matrix(const Eigen::Ref<const Matrix>& branch_cov, const Eigen::Ref<const Vector>& phi);
Matrix delta_matrix(const GridModel& model, const Eigen::Ref<const Matrix>& state_cov,
                    const IncompletenessSpec& spec);

/// J D Q D Jᵀ for an l×l matrix Q, symmetrized.
Matrix lift_branch_cov(const GridModel& model, const Eigen::Ref<const Matrix>& q);

AttackArtifacts attack_covariances(const GridModel& model, const ScenarioStats& stats,
                                   const IncompletenessSpec& spec);

/// ‖H'ΣH'ᵀ - HΣHᵀ - J D Δ D Jᵀ‖_F / max(1, ‖HΣHᵀ‖_F). Zero up to roundoff
/// when admittance incompleteness and the Δ-perturbed branch covariance give
/// the same attack.
double equivalence_residual(const AttackArtifacts& artifacts, const GridModel& model);

struct MtdPlan {
    Vector admittance;         // operator-side target b_i
    std::vector<bool> zeroed;  // φ_i == -1: mapped to 0
    bool any_zeroed = false;
};

/// Operator-side admittances realising `spec` from the attacker's stale
/// values: b_i = b'_i / (1 + φ_i), or 0 when φ_i = -1.
MtdPlan mtd_admittance(const Eigen::Ref<const Vector>& d_prime, const IncompletenessSpec& spec);

/// CSV `branch_index,phi,phi_min,phi_max` (1-based, support rows only).
std::string write_spec_csv(const IncompletenessSpec& spec);
/// Accepts `branch_index,phi[,phi_min,phi_max]`; missing bounds are pinned at φ.
IncompletenessSpec read_spec_csv(std::string_view text, Eigen::Index l);

/// CSV `branch_index,phi_min,phi_max` (1-based); omitted branches are not in
/// the support.
IncompletenessBounds read_bounds_csv(std::string_view text, Eigen::Index l);
std::string write_bounds_csv(const IncompletenessBounds& bounds);

}  // namespace stealth
