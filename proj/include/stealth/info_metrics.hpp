#pragma once

#include "stealth/attack_engine.hpp"
#include "stealth/grid_model.hpp"
#include "stealth/linalg.hpp"
#include "stealth/stochastics.hpp"

namespace stealth {

/// Metrics of one attack, in nats. kl is the stealthiness measure (smaller is
/// stealthier), mi the information left to the operator (smaller is more
/// destructive). The *_opt fields are the same metrics for the complete
/// information attack Φ = 0.
struct MetricsPoint {
    double kl = 0.0;
    double mi = 0.0;
    double kl_opt = 0.0;
    double mi_opt = 0.0;
};

/// Symmetric PSD square root. Eigenvalues down to -1e-6·scale are treated as
/// roundoff and clamped to zero; anything more negative throws NotPSDError.
Matrix sym_sqrt(const Eigen::Ref<const Matrix>& m);

/// ½ Σ (λ - log(1 + λ)) over the given eigenvalues. Throws NotPSDError when
/// an eigenvalue is at or below -1 or below the roundoff band.
double kl_from_eigenvalues(const Eigen::Ref<const Vector>& eigenvalues);

/// D(N(0, Σ_YY + T) ‖ N(0, Σ_YY)) with S = Σ_YY⁻¹, computed from the
/// eigenvalues of S^{1/2} T S^{1/2}.
double kl_divergence(const Eigen::Ref<const Matrix>& precision, const Eigen::Ref<const Matrix>& t);

/// Same, with a precomputed S^{1/2}.
double kl_divergence_rooted(const Eigen::Ref<const Matrix>& precision_root, const Eigen::Ref<const Matrix>& t);

/// ½ log|I + U^{1/2} (σ²I + T)⁻¹ U^{1/2}|.
double mutual_information(const Eigen::Ref<const Matrix>& optimal_attack, const Eigen::Ref<const Matrix>& t,
                          double noise_variance);

/// Same, with a precomputed U^{1/2}.
double mutual_information_rooted(const Eigen::Ref<const Matrix>& attack_root, const Eigen::Ref<const Matrix>& t,
                                 double noise_variance);

/// I(X; Y_A) + D(P_{Y_A} ‖ P_Y) for an attack covariance Σ_AA. Throws
/// NotPSDError if Σ_AA is not PSD.
double integrity_cost(const Eigen::Ref<const Matrix>& attack_cov, const ScenarioStats& stats);

/// Evaluates metrics for many incompleteness profiles against one scenario.
/// Square roots, W = AΣ_XXAᵀ and the Φ = 0 baselines are computed once.
/// All const members are safe to call concurrently. Holds pointers to `model`
/// and `stats`, which must outlive the engine.
class MetricsEngine {
public:
    MetricsEngine(const GridModel& model, const ScenarioStats& stats);

    MetricsPoint evaluate(const IncompletenessSpec& spec) const;
    MetricsPoint evaluate_phi(const Eigen::Ref<const Vector>& phi) const;

    /// Metrics for an arbitrary symmetric branch perturbation Δ̄ in place of
    /// the Δ induced by Φ. Requires W + Δ̄ ⪰ 0.
    MetricsPoint evaluate_delta(const Eigen::Ref<const Matrix>& delta) const;

    /// T = J D (W + Δ) D Jᵀ
    Matrix t_matrix(const Eigen::Ref<const Matrix>& delta) const;

    double kl_opt() const { return kl_opt_; }
    double mi_opt() const { return mi_opt_; }
    const Matrix& branch_cov() const { return branch_cov_; }
    const GridModel& model() const { return *model_; }
    const ScenarioStats& stats() const { return *stats_; }

private:
    const GridModel* model_;
    const ScenarioStats* stats_;
    Matrix precision_root_;
    Matrix attack_root_;
    Matrix branch_cov_;
    double kl_opt_ = 0.0;
    double mi_opt_ = 0.0;
};

/// One-shot evaluation; builds a MetricsEngine internally.
MetricsPoint evaluate(const GridModel& model, const ScenarioStats& stats, const IncompletenessSpec& spec);

}  // namespace stealth
