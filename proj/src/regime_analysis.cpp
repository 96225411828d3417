#include "stealth/regime_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stealth/errors.hpp"

namespace stealth {

std::string_view to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::LessStealthyMoreDestructive: return "LESS_STEALTHY_MORE_DESTRUCTIVE";
        case RegimeLabel::MoreStealthyLessDestructive: return "MORE_STEALTHY_LESS_DESTRUCTIVE";
        case RegimeLabel::Boundary: return "BOUNDARY";
        case RegimeLabel::Indefinite: return "INDEFINITE";
    }
    return "INDEFINITE";
}

RegimeLabel regime_from_string(std::string_view name) {
    for (auto l : {RegimeLabel::LessStealthyMoreDestructive, RegimeLabel::MoreStealthyLessDestructive,
                   RegimeLabel::Boundary, RegimeLabel::Indefinite}) {
        if (to_string(l) == name) return l;
    }
    throw ValidationError("unknown regime label '" + std::string(name) + "'");
}

DeltaClassification classify_delta(const Eigen::Ref<const Matrix>& delta, double tol_scale) {
    DeltaClassification out;
    if (delta.size() == 0) return out;
    const Vector lambda = sym_eigenvalues(delta);
    out.min_eig = lambda(0);
    out.max_eig = lambda(lambda.size() - 1);
    out.tol = tol_scale * eigen_scale(lambda);
    const bool psd = out.min_eig >= -out.tol;
    const bool nsd = out.max_eig <= out.tol;
    if (psd && nsd) {
        out.label = RegimeLabel::Boundary;
    } else if (psd) {
        out.label = RegimeLabel::LessStealthyMoreDestructive;
    } else if (nsd) {
        out.label = RegimeLabel::MoreStealthyLessDestructive;
    } else {
        out.label = RegimeLabel::Indefinite;
    }
    return out;
}

Lemma5Result lemma5_check(const Eigen::Ref<const Vector>& phi) {
    const double l = static_cast<double>(phi.size());
    const double dot = phi.sum();
    const double nrm2 = phi.squaredNorm();
    const double root = std::sqrt(nrm2 * l);
    // φ = c·1 meets Cauchy-Schwarz with equality; allow for the rounding in root.
    const double tol = 1e-12 * std::max(1.0, std::abs(dot) + root);
    Lemma5Result r;
    r.psd_lhs = dot - root;
    r.nsd_lhs = nrm2 + dot + root;
    r.cond_psd = r.psd_lhs >= -tol;
    r.cond_nsd = r.nsd_lhs <= tol;
    return r;
}

RegimeLabel prop2_classify(double beta) {
    const double s = 2.0 * beta + beta * beta;
    if (std::abs(s) <= 1e-12) return RegimeLabel::Boundary;
    return s > 0.0 ? RegimeLabel::LessStealthyMoreDestructive : RegimeLabel::MoreStealthyLessDestructive;
}

Matrix phi_tilde(const Eigen::Ref<const Vector>& phi) {
    const Vector ones = Vector::Ones(phi.size());
    return phi * phi.transpose() + phi * ones.transpose() + ones * phi.transpose();
}

std::pair<double, double> phi_tilde_eig_bounds(const Eigen::Ref<const Vector>& phi) {
    const double l = static_cast<double>(phi.size());
    const double dot = phi.sum();
    const double nrm2 = phi.squaredNorm();
    const double root = std::sqrt(nrm2 * l);
    return {nrm2 + dot + root, dot - root};
}

}  // namespace stealth
