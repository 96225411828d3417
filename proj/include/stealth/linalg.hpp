#pragma once

#include <Eigen/Dense>

namespace stealth {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerances shared by every PSD test in the library. All of them are
/// relative to max(1, largest |eigenvalue|).
inline constexpr double kPsdTolerance = 1e-9;     // roundoff clamp / Loewner classification
inline constexpr double kNotPsdThreshold = 1e-6;  // genuine indefiniteness

/// (M + Mᵀ) / 2
Matrix symmetrize(const Eigen::Ref<const Matrix>& m);

/// Ascending eigenvalues of the symmetric part of `m`.
Vector sym_eigenvalues(const Eigen::Ref<const Matrix>& m);

/// max(1, max |λ|) for an eigenvalue vector.
double eigen_scale(const Eigen::Ref<const Vector>& eigenvalues);

/// True when min λ ≥ -tol·max(1, max|λ|).
bool is_psd(const Eigen::Ref<const Matrix>& m, double tol = kPsdTolerance);

/// Largest asymmetry max|M - Mᵀ| relative to max(1, max|M|).
double relative_asymmetry(const Eigen::Ref<const Matrix>& m);

}  // namespace stealth
