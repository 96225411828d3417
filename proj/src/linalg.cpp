#include "stealth/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace stealth {

Matrix symmetrize(const Eigen::Ref<const Matrix>& m) { return 0.5 * (m + m.transpose()); }

Vector sym_eigenvalues(const Eigen::Ref<const Matrix>& m) {
    if (m.size() == 0) return Vector();
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double eigen_scale(const Eigen::Ref<const Vector>& eigenvalues) {
    if (eigenvalues.size() == 0) return 1.0;
    return std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
}

bool is_psd(const Eigen::Ref<const Matrix>& m, double tol) {
    const Vector ev = sym_eigenvalues(m);
    if (ev.size() == 0) return true;
    return ev.minCoeff() >= -tol * eigen_scale(ev);
}

double relative_asymmetry(const Eigen::Ref<const Matrix>& m) {
    if (m.size() == 0) return 0.0;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace stealth
