#include <doctest.h>

#include <cmath>
#include <random>

#include "stealth/attack_engine.hpp"
#include "stealth/errors.hpp"
#include "stealth/regime_analysis.hpp"
#include "support.hpp"

using namespace stealth;
using testing::load_fixture;

namespace {

ScenarioStats ring_stats(GridModel& model) {
    GridCase c;
    c.buses = {1, 2, 3};
    c.branches = {{1, 2, 0.1, true}, {2, 3, 0.1, true}, {1, 3, 0.1, true}};
    c.reference_bus = 1;
    model = build_grid_model(c);
    return build_scenario(model, 0.5, 30.0);
}

}  // namespace

TEST_CASE("perturbed admittance") {
    Vector b(3);
    b << 10, 20, 30;
    CHECK(perturbed_admittance(b, IncompletenessSpec::complete(3)) == b);
    const auto spec = IncompletenessSpec::on_support(3, {0, 2}, {0.3, -1.0});
    const Vector d = perturbed_admittance(b, spec);
    CHECK(d(0) == doctest::Approx(13.0));
    CHECK(d(1) == 20.0);
    CHECK(d(2) == 0.0);
    CHECK(spec.has_zeroed_branch());
}

TEST_CASE("perturbed Jacobian") {
    const auto f = load_fixture("case9");
    const Eigen::Index l = f.model.branch_count();
    CHECK(perturbed_jacobian(f.model, IncompletenessSpec::complete(l)) == f.model.jacobian);
    CHECK(perturbed_jacobian(f.model, IncompletenessSpec::uniform(l, -1.0)).norm() == 0.0);

    std::mt19937_64 gen(7);
    const Vector phi = testing::random_vector(gen, l, -2.0, 2.0);
    const auto spec = IncompletenessSpec::full(phi);
    Vector one_plus = Vector::Ones(l) + phi;
    const Matrix via_scaling =
        f.model.stacking * one_plus.asDiagonal() * f.model.susceptance.asDiagonal() * f.model.incidence;
    const Matrix h_prime = perturbed_jacobian(f.model, spec);
    CHECK((h_prime - via_scaling).norm() <= 1e-12 * h_prime.norm());
}

TEST_CASE("delta matrix closed forms") {
    const auto f = load_fixture("case14");
    const Eigen::Index l = f.model.branch_count();
    const Matrix w = branch_angle_cov(f.model, f.stats.state_cov);
    CHECK(delta_matrix(w, Vector::Zero(l)).norm() == 0.0);
    for (double beta : {-2.5, -1.0, -0.3, 0.5, 1.7}) {
        const Matrix d = delta_matrix(w, Vector::Constant(l, beta));
        CHECK((d - (2 * beta + beta * beta) * w).norm() <= 1e-12 * std::max(1.0, w.norm()));
    }

    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector phi = testing::random_vector(gen, l, -3.0, 3.0);
        const Matrix d = delta_matrix(w, phi);
        const Matrix hadamard = phi_tilde(phi).cwiseProduct(w);
        CHECK((d - hadamard).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, hadamard.cwiseAbs().maxCoeff()));
        CHECK(d == d.transpose());
    }
}

TEST_CASE("attack covariances for the special profiles") {
    const auto f = load_fixture("case9");
    const Eigen::Index l = f.model.branch_count();
    const double scale = f.stats.optimal_attack.norm();

    const auto zero = attack_covariances(f.model, f.stats, IncompletenessSpec::complete(l));
    CHECK((zero.cov_incomplete - f.stats.optimal_attack).norm() <= 1e-12 * scale);
    CHECK(zero.cov_opt == f.stats.optimal_attack);

    const auto off = attack_covariances(f.model, f.stats, IncompletenessSpec::uniform(l, -1.0));
    CHECK(off.cov_incomplete.norm() == 0.0);
    CHECK(off.cov_attacked_meas == f.stats.measurement_cov);

    const auto flipped = attack_covariances(f.model, f.stats, IncompletenessSpec::uniform(l, -2.0));
    CHECK((flipped.cov_incomplete - f.stats.optimal_attack).norm() <= 1e-12 * scale);
}

TEST_CASE("T equals the incomplete attack covariance and the equivalence residual vanishes") {
    std::mt19937_64 gen(3);
    for (const char* name : {"case9", "case14", "case30"}) {
        const auto f = load_fixture(name);
        const Eigen::Index l = f.model.branch_count();
        CHECK(equivalence_residual(attack_covariances(f.model, f.stats, IncompletenessSpec::complete(l)), f.model) <=
              1e-15);
        for (int trial = 0; trial < 20; ++trial) {
            const auto spec = IncompletenessSpec::full(testing::random_vector(gen, l, -2.0, 2.0));
            const auto art = attack_covariances(f.model, f.stats, spec);
            CHECK(equivalence_residual(art, f.model) <= 1e-10);
            CHECK((art.t_matrix - art.cov_incomplete).norm() <= 1e-10 * std::max(1.0, art.cov_incomplete.norm()));
        }
    }
    GridModel ring;
    const auto stats = ring_stats(ring);
    const auto art = attack_covariances(ring, stats, IncompletenessSpec::uniform(3, 0.7));
    CHECK(equivalence_residual(art, ring) <= 1e-12);
}

TEST_CASE("W + delta stays PSD for arbitrary profiles") {
    std::mt19937_64 gen(5);
    for (const char* name : {"case9", "case14"}) {
        const auto f = load_fixture(name);
        const Matrix w = branch_angle_cov(f.model, f.stats.state_cov);
        for (int trial = 0; trial < 100; ++trial) {
            const Vector phi = testing::random_vector(gen, w.rows(), -5.0, 5.0);
            CHECK(is_psd(w + delta_matrix(w, phi)));
        }
    }
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 30);
        const Matrix m = testing::random_matrix(gen, n + 3, n);
        const Matrix x = testing::random_psd(gen, n, 1 + static_cast<Eigen::Index>(gen() % n));
        CHECK(is_psd(m * x * m.transpose()));
    }
}

TEST_CASE("beta symmetry of the incomplete covariance") {
    const auto f = load_fixture("case14");
    const Eigen::Index l = f.model.branch_count();
    for (double beta : {-3.0, -1.5, -0.25, 0.4, 1.0}) {
        const Matrix a = attack_covariances(f.model, f.stats, IncompletenessSpec::uniform(l, beta)).cov_incomplete;
        const Matrix b =
            attack_covariances(f.model, f.stats, IncompletenessSpec::uniform(l, -2.0 - beta)).cov_incomplete;
        CHECK((a - b).norm() <= 1e-10 * std::max(1.0, a.norm()));
        CHECK((a - (1 + beta) * (1 + beta) * f.stats.optimal_attack).norm() <= 1e-10 * std::max(1.0, a.norm()));
    }
}

TEST_CASE("MTD admittance inverts the perturbation") {
    Vector d(2);
    d << 13, 20;
    const auto spec = IncompletenessSpec::on_support(2, {0}, {0.3});
    const auto plan = mtd_admittance(d, spec);
    CHECK(plan.admittance(0) == doctest::Approx(10.0));
    CHECK(plan.admittance(1) == 20.0);
    CHECK_FALSE(plan.any_zeroed);

    const auto zeroed = mtd_admittance(d, IncompletenessSpec::on_support(2, {1}, {-1.0}));
    CHECK(zeroed.admittance(1) == 0.0);
    CHECK(zeroed.zeroed[1]);
    CHECK(zeroed.any_zeroed);

    CHECK(mtd_admittance(d, IncompletenessSpec::complete(2)).admittance == d);
}

TEST_CASE("MTD round trip on shipped cases") {
    std::mt19937_64 gen(99);
    std::size_t exact = 0, total = 0;
    for (const char* name : {"case9", "case14", "case30"}) {
        const auto f = load_fixture(name);
        const Eigen::Index l = f.model.branch_count();
        for (int trial = 0; trial < 200; ++trial) {
            const auto spec = IncompletenessSpec::full(testing::random_vector(gen, l, -0.99, 2.0));
            const Vector back = mtd_admittance(perturbed_admittance(f.model.susceptance, spec), spec).admittance;
            for (Eigen::Index i = 0; i < l; ++i) {
                const double b = f.model.susceptance(i);
                // Multiply-then-divide by the same factor can land one ulp away.
                CHECK(std::abs(back(i) - b) <= std::abs(std::nextafter(b, 2 * b) - b));
                exact += back(i) == b;
                ++total;
            }
        }
    }
    MESSAGE("exact round trips: " << exact << " / " << total);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(IncompletenessSpec::on_support(3, {0, 0}, {0.1, 0.2}), ValidationError);
    CHECK_THROWS_AS(IncompletenessSpec::on_support(3, {3}, {0.1}), ValidationError);
    IncompletenessSpec bad = IncompletenessSpec::complete(3);
    bad.phi(1) = 0.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    const auto bounds = IncompletenessBounds::on_support(3, {2, 0}, {-0.5, -1.0}, {0.5, 1.0});
    CHECK(bounds.support == std::vector<BranchIndex>{0, 2});
    CHECK(bounds.phi_min(2) == -0.5);
    Vector outside = Vector::Zero(3);
    outside(0) = 1.5;
    CHECK_THROWS_AS(bounds.at(outside), ValidationError);
    CHECK_THROWS_AS(IncompletenessBounds::on_support(3, {0}, {0.5}, {-0.5}), ValidationError);
    CHECK(bounds.alpha() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("spec and bounds CSV round trip") {
    const auto spec = IncompletenessSpec::on_support(5, {4, 1}, {0.25, -1.0 / 3.0});
    const auto back = read_spec_csv(write_spec_csv(spec), 5);
    CHECK(back.support == spec.support);
    CHECK(back.phi == spec.phi);

    const auto two_col = read_spec_csv("branch_index,phi\n2,0.5\n", 5);
    CHECK(two_col.phi(1) == 0.5);
    CHECK(two_col.phi_min(1) == 0.5);

    const auto bounds = IncompletenessBounds::on_support(5, {0, 3}, {-0.1, 0.2}, {0.7, 0.9});
    const auto bounds_back = read_bounds_csv(write_bounds_csv(bounds), 5);
    CHECK(bounds_back.phi_min == bounds.phi_min);
    CHECK(bounds_back.phi_max == bounds.phi_max);

    CHECK_THROWS_AS(read_bounds_csv("branch_index,phi_min,phi_max\n6,0,1\n", 5), ValidationError);
    CHECK_THROWS_AS(read_bounds_csv("branch_index,phi_min,phi_max\n1,0\n", 5), SyntaxError);
    CHECK_THROWS_AS(read_bounds_csv("branch_index,phi_min,phi_max\n1,x,1\n", 5), SyntaxError);
    CHECK_THROWS_AS(read_bounds_csv("branch_index,phi_min\n1,0\n", 5), ValidationError);
}
