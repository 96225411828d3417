#include "stealth/info_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stealth/errors.hpp"

namespace stealth {
namespace {

double clamp_roundoff(double value) { return (value < 0.0 && value >= -1e-12) ? 0.0 : value; }

}  // namespace

Matrix sym_sqrt(const Eigen::Ref<const Matrix>& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    Vector lambda = es.eigenvalues();
    const double scale = eigen_scale(lambda);
    if (lambda.size() > 0 && lambda(0) < -kNotPsdThreshold * scale) {
        throw NotPSDError("matrix is not PSD: min eigenvalue " + std::to_string(lambda(0)));
    }
    lambda = lambda.cwiseMax(0.0).cwiseSqrt();
    const Matrix& v = es.eigenvectors();
    return symmetrize(v * lambda.asDiagonal() * v.transpose());
}

double kl_from_eigenvalues(const Eigen::Ref<const Vector>& eigenvalues) {
    const double scale = eigen_scale(eigenvalues);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double x = eigenvalues(i);
        if (x <= -1.0 || x < -kNotPsdThreshold * scale) {
            throw NotPSDError("perturbation is not PSD: eigenvalue " + std::to_string(x));
        }
        sum += x - std::log1p(x);
    }
    return clamp_roundoff(0.5 * sum);
}

double kl_divergence_rooted(const Eigen::Ref<const Matrix>& precision_root, const Eigen::Ref<const Matrix>& t) {
    return kl_from_eigenvalues(sym_eigenvalues(precision_root * t * precision_root));
}

double kl_divergence(const Eigen::Ref<const Matrix>& precision, const Eigen::Ref<const Matrix>& t) {
    return kl_divergence_rooted(sym_sqrt(precision), t);
}

double mutual_information_rooted(const Eigen::Ref<const Matrix>& attack_root, const Eigen::Ref<const Matrix>& t,
                                 double noise_variance) {
    if (!(noise_variance > 0.0)) throw SingularityError("noise variance must be positive");
    const Eigen::Index m = t.rows();
    Matrix c = symmetrize(t);
    c.diagonal().array() += noise_variance;
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success) throw NotPSDError("sigma^2 I + T is not positive definite");
    const Matrix b = llt.matrixL().solve(attack_root);
    const Vector lambda = sym_eigenvalues(b.transpose() * b);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) sum += std::log1p(std::max(lambda(i), 0.0));
    return 0.5 * sum;
}

double mutual_information(const Eigen::Ref<const Matrix>& optimal_attack, const Eigen::Ref<const Matrix>& t,
                          double noise_variance) {
    return mutual_information_rooted(sym_sqrt(optimal_attack), t, noise_variance);
}

double integrity_cost(const Eigen::Ref<const Matrix>& attack_cov, const ScenarioStats& stats) {
    if (!is_psd(attack_cov, kNotPsdThreshold)) throw NotPSDError("attack covariance is not PSD");
    return mutual_information(stats.optimal_attack, attack_cov, stats.noise_variance) +
           kl_divergence(stats.precision, attack_cov);
}

MetricsEngine::MetricsEngine(const GridModel& model, const ScenarioStats& stats)
    : model_(&model),
      stats_(&stats),
      precision_root_(sym_sqrt(stats.precision)),
      attack_root_(sym_sqrt(stats.optimal_attack)),
      branch_cov_(branch_angle_cov(model, stats.state_cov)) {
    const Matrix t0 = t_matrix(Matrix::Zero(branch_cov_.rows(), branch_cov_.cols()));
    kl_opt_ = kl_divergence_rooted(precision_root_, t0);
    mi_opt_ = mutual_information_rooted(attack_root_, t0, stats.noise_variance);
}

Matrix MetricsEngine::t_matrix(const Eigen::Ref<const Matrix>& delta) const {
    return lift_branch_cov(*model_, branch_cov_ + delta);
}

MetricsPoint MetricsEngine::evaluate_delta(const Eigen::Ref<const Matrix>& delta) const {
    const Matrix t = t_matrix(symmetrize(delta));
    return MetricsPoint{kl_divergence_rooted(precision_root_, t),
                        mutual_information_rooted(attack_root_, t, stats_->noise_variance), kl_opt_, mi_opt_};
}

MetricsPoint MetricsEngine::evaluate_phi(const Eigen::Ref<const Vector>& phi) const {
    if (phi.size() != branch_cov_.rows()) throw ValidationError("phi has the wrong length");
    return evaluate_delta(delta_matrix(branch_cov_, phi));
}

MetricsPoint MetricsEngine::evaluate(const IncompletenessSpec& spec) const { return evaluate_phi(spec.phi); }

MetricsPoint evaluate(const GridModel& model, const ScenarioStats& stats, const IncompletenessSpec& spec) {
    return MetricsEngine(model, stats).evaluate(spec);
}

}  // namespace stealth
