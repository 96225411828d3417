#pragma once

#include <random>
#include <string>

#include "stealth/case_ingest.hpp"
#include "stealth/grid_model.hpp"
#include "stealth/linalg.hpp"
#include "stealth/stochastics.hpp"

namespace stealth::testing {

inline std::string data_path(const std::string& name) { return std::string(STEALTH_DATA_DIR) + "/" + name; }

struct Fixture {
    GridModel model;
    ScenarioStats stats;
};

inline Fixture load_fixture(const std::string& case_name, double rho = 0.5, double snr = 30.0) {
    GridModel model = build_grid_model(load_case_file(data_path(case_name + ".m")));
    ScenarioStats stats = build_scenario(model, rho, snr);
    return Fixture{std::move(model), std::move(stats)};
}

inline Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(gen);
    return v;
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(gen);
    return m;
}

inline Matrix random_psd(std::mt19937_64& gen, Eigen::Index n, Eigen::Index rank) {
    const Matrix g = random_matrix(gen, n, rank);
    return g * g.transpose();
}

inline Matrix random_symmetric(std::mt19937_64& gen, Eigen::Index n) {
    const Matrix g = random_matrix(gen, n, n);
    return 0.5 * (g + g.transpose());
}

/// Projection onto the PSD cone (negative eigenvalues set to zero).
inline Matrix psd_projection(const Eigen::Ref<const Matrix>& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    const Vector lambda = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace stealth::testing
