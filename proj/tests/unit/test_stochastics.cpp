#include <doctest.h>

#include <cmath>

#include "stealth/errors.hpp"
#include "stealth/stochastics.hpp"
#include "support.hpp"

using namespace stealth;

namespace {

GridModel ring3() {
    GridCase c;
    c.buses = {1, 2, 3};
    c.branches = {{1, 2, 0.1, true}, {2, 3, 0.1, true}, {1, 3, 0.1, true}};
    c.reference_bus = 1;
    return build_grid_model(c);
}

void check_invariants(const ScenarioStats& s) {
    const Eigen::Index m = s.measurement_cov.rows();
    CHECK((s.measurement_cov - s.optimal_attack - s.noise_variance * Matrix::Identity(m, m)).norm() <=
          1e-14 * s.measurement_cov.norm());
    CHECK((s.precision * s.measurement_cov - Matrix::Identity(m, m)).norm() <= 1e-10 * static_cast<double>(m));
    CHECK(is_psd(s.optimal_attack, 1e-10));
    CHECK(s.measurement_cov == s.measurement_cov.transpose());
    CHECK(s.precision == s.precision.transpose());
}

}  // namespace

TEST_CASE("Toeplitz covariance") {
    CHECK(toeplitz_cov(3, 0.0) == Matrix::Identity(3, 3));
    Matrix expected(3, 3);
    expected << 1, 0.5, 0.25, 0.5, 1, 0.5, 0.25, 0.5, 1;
    CHECK(toeplitz_cov(3, 0.5) == expected);
    CHECK(sym_eigenvalues(toeplitz_cov(50, 0.9))(0) > 0.0);
    const Matrix big = toeplitz_cov(300, 0.5);
    CHECK(big == big.transpose());
    CHECK(sym_eigenvalues(big)(0) > 0.0);
    CHECK_THROWS_AS(toeplitz_cov(3, 1.0), DomainError);
    CHECK_THROWS_AS(toeplitz_cov(3, -0.1), DomainError);
}

TEST_CASE("noise variance from SNR") {
    Matrix u = Matrix::Identity(100, 100) * 10.0;  // tr = 1000
    CHECK(noise_variance(u, 100, 30.0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(noise_variance(u, 100, 0.0) == doctest::Approx(10.0).epsilon(1e-14));
    for (double snr : {-20.0, 0.0, 12.5, 30.0, 60.0}) {
        CHECK(std::abs(snr_db(u, 100, noise_variance(u, 100, snr)) - snr) <= 1e-12);
    }
    CHECK_THROWS_AS(noise_variance(Matrix::Zero(3, 3), 3, 30.0), DomainError);
}

TEST_CASE("scenario invariants") {
    check_invariants(build_scenario(ring3(), 0.5, 10.0));
    for (const char* name : {"case9", "case14", "case30"}) check_invariants(testing::load_fixture(name).stats);
}

TEST_CASE("very low SNR: precision approaches the scaled identity") {
    const auto s = build_scenario(ring3(), 0.5, -100.0);
    const Eigen::Index m = s.precision.rows();
    const Matrix scaled = s.precision * s.noise_variance;
    CHECK((scaled - Matrix::Identity(m, m)).norm() / std::sqrt(static_cast<double>(m)) < 0.01);
}

TEST_CASE("disconnected model is refused") {
    GridCase c;
    c.buses = {1, 2, 3, 4};
    c.branches = {{1, 2, 0.1, true}, {3, 4, 0.1, true}};
    c.reference_bus = 1;
    CHECK_THROWS_AS(build_scenario(build_grid_model(c), 0.5, 30.0), DisconnectedGridError);
}
