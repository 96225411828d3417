#include "stealth/stochastics.hpp"

#include <cmath>
#include <string>

#include "stealth/errors.hpp"

namespace stealth {

Matrix toeplitz_cov(Eigen::Index n, double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw DomainError("rho must lie in [0, 1), got " + std::to_string(rho));
    }
    Vector powers(n);
    double p = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        powers(k) = p;
        p *= rho;
    }
    Matrix cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = powers(std::abs(i - j));
    }
    return cov;
}

double noise_variance(const Eigen::Ref<const Matrix>& optimal_attack, Eigen::Index m, double snr_db) {
    const double trace = optimal_attack.trace();
    if (!(trace > 0.0)) throw DomainError("tr(U) must be positive to define an SNR");
    return trace / (static_cast<double>(m) * std::pow(10.0, snr_db / 10.0));
}

double snr_db(const Eigen::Ref<const Matrix>& optimal_attack, Eigen::Index m, double noise_variance) {
    return 10.0 * std::log10(optimal_attack.trace() / (static_cast<double>(m) * noise_variance));
}

ScenarioStats build_scenario(const GridModel& model, double rho, double snr) {
    require_connected(model);
    const Eigen::Index m = model.measurements();
    const Matrix& h = model.jacobian;

    Matrix state_cov = toeplitz_cov(model.states(), rho);
    Matrix u = symmetrize(h * state_cov * h.transpose());
    const double sigma2 = noise_variance(u, m, snr);
    Matrix cov_yy = u + sigma2 * Matrix::Identity(m, m);

    Eigen::LLT<Matrix> llt(cov_yy);
    if (llt.info() != Eigen::Success) {
        throw SingularityError("measurement covariance is not positive definite");
    }
    Matrix precision = symmetrize(llt.solve(Matrix::Identity(m, m)));

    return ScenarioStats{std::move(state_cov), sigma2, std::move(cov_yy), std::move(precision), std::move(u), rho,
                         snr};
}

}  // namespace stealth
