#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "stealth/linalg.hpp"

namespace stealth {

enum class RegimeLabel {
    LessStealthyMoreDestructive,  // Δ ⪰ 0
    MoreStealthyLessDestructive,  // Δ ⪯ 0
    Boundary,                     // Δ = 0
    Indefinite,
};

/// Upper-case name used in CSV output, e.g. "LESS_STEALTHY_MORE_DESTRUCTIVE".
std::string_view to_string(RegimeLabel label);
RegimeLabel regime_from_string(std::string_view name);

struct DeltaClassification {
    RegimeLabel label = RegimeLabel::Boundary;
    double min_eig = 0.0;
    double max_eig = 0.0;
    double tol = 0.0;
};

/// Loewner sign of a symmetric Δ with tolerance tol_scale·max(1, max|λ|).
DeltaClassification classify_delta(const Eigen::Ref<const Matrix>& delta, double tol_scale = kPsdTolerance);

/// Sufficient conditions on φ (padded to length l, compared against the
/// all-ones vector of length l) for Δ ⪰ 0 and Δ ⪯ 0.
struct Lemma5Result {
    bool cond_psd = false;
    bool cond_nsd = false;
    double psd_lhs = 0.0;  // φᵀ1 - ‖φ‖‖1‖, must be ≥ 0
    double nsd_lhs = 0.0;  // φᵀφ + φᵀ1 + ‖φ‖‖1‖, must be ≤ 0
};

Lemma5Result lemma5_check(const Eigen::Ref<const Vector>& phi);

/// Regime of the uniform profile Φ = βI, from the sign of 2β + β².
RegimeLabel prop2_classify(double beta);

/// Φ̃ = φφᵀ + φ1ᵀ + 1φᵀ, so that Δ = Φ̃ ⊙ W.
Matrix phi_tilde(const Eigen::Ref<const Vector>& phi);

/// (upper bound on λ_max(Φ̃), lower bound on λ_min(Φ̃)).
std::pair<double, double> phi_tilde_eig_bounds(const Eigen::Ref<const Vector>& phi);

}  // namespace stealth
