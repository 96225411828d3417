#pragma once

#include "stealth/grid_model.hpp"
#include "stealth/linalg.hpp"

namespace stealth {

/// Second-order statistics of one scenario. Immutable once built; every
/// metric evaluation reuses `precision` (S = Σ_YY⁻¹).
struct ScenarioStats {
    Matrix state_cov;         // Σ_XX, n×n
    double noise_variance;    // σ²
    Matrix measurement_cov;   // Σ_YY = U + σ²I
    Matrix precision;         // S
    Matrix optimal_attack;    // U = H Σ_XX Hᵀ
    double rho;
    double snr_db;
};

/// Σ[i][j] = rho^|i-j|. Throws DomainError unless 0 <= rho < 1.
Matrix toeplitz_cov(Eigen::Index n, double rho);

/// σ² = tr(U) / (m · 10^(snr_db/10)). Throws DomainError if tr(U) <= 0.
double noise_variance(const Eigen::Ref<const Matrix>& optimal_attack, Eigen::Index m, double snr_db);

/// 10·log10(tr(U) / (m σ²)), the inverse of noise_variance.
double snr_db(const Eigen::Ref<const Matrix>& optimal_attack, Eigen::Index m, double noise_variance);

/// Assembles the scenario for a connected model. Throws DisconnectedGridError
/// if the model fails the connectivity/rank checks and SingularityError if the
/// measurement covariance cannot be factorized.
ScenarioStats build_scenario(const GridModel& model, double rho, double snr_db);

}  // namespace stealth
