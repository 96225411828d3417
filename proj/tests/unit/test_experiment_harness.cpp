#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stealth/csv_io.hpp"
#include "stealth/errors.hpp"
#include "stealth/experiment_harness.hpp"
#include "support.hpp"

using namespace stealth;
using testing::load_fixture;

namespace {

std::vector<BranchIndex> all_branches(Eigen::Index l) {
    std::vector<BranchIndex> s(static_cast<std::size_t>(l));
    std::iota(s.begin(), s.end(), BranchIndex{0});
    return s;
}

}  // namespace

TEST_CASE("grid parsing") {
    const auto g = parse_grid("-3:1:0.02");
    CHECK(g.size() == 201);
    CHECK(g.front() == -3.0);
    CHECK(g.back() == 1.0);
    CHECK(std::count(g.begin(), g.end(), -1.0) == 1);
    CHECK(std::count(g.begin(), g.end(), 0.0) == 1);
    CHECK(std::count(g.begin(), g.end(), -2.0) == 1);
    CHECK(parse_grid("0.5") == std::vector<double>{0.5});
    CHECK(parse_grid("0:1:0.4").size() == 3);
    CHECK(parse_grid("0:1:0.25").back() == 1.0);
    CHECK_THROWS_AS(parse_grid("1:0:0.1"), DomainError);
    CHECK_THROWS_AS(parse_grid("0:1:0"), DomainError);
    CHECK_THROWS_AS(parse_grid("0:1"), SyntaxError);
    CHECK_THROWS_AS(parse_grid("a:1:0.1"), SyntaxError);
    CHECK(parse_real_list("0.2, 0.5,1") == std::vector<double>{0.2, 0.5, 1.0});
}

TEST_CASE("parallel_for runs every index and propagates errors") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 5) throw DomainError("boom");
                                 }),
                    DomainError);
}

TEST_CASE("beta sweep small grids") {
    const auto f = load_fixture("case9");
    const MetricsEngine engine(f.model, f.stats);
    const auto minus_one = beta_sweep(engine, {-1.0});
    CHECK(minus_one[0].kl == 0.0);
    const auto pair = beta_sweep(engine, {0.0, -2.0});
    CHECK(std::abs(pair[0].kl - engine.kl_opt()) <= 1e-9);
    CHECK(std::abs(pair[1].kl - engine.kl_opt()) <= 1e-9);
    CHECK(std::abs(pair[0].mi - engine.mi_opt()) <= 1e-9);
    CHECK(std::abs(pair[1].mi - engine.mi_opt()) <= 1e-9);
    CHECK(pair[0].regime == RegimeLabel::Boundary);
}

TEST_CASE("beta sweep shape properties and the tradeoff curve") {
    const auto f = load_fixture("case30");
    const MetricsEngine engine(f.model, f.stats);
    const auto grid = parse_grid("-3:1:0.02");
    const auto rows = beta_sweep(engine, grid);
    auto at = [&](double beta) {
        for (const auto& r : rows) {
            if (r.beta == beta) return r;
        }
        FAIL("beta not on grid");
        return rows.front();
    };
    for (const auto& r : rows) {
        const double mirror_beta = -2.0 - r.beta;
        if (mirror_beta < -3.0 - 1e-12 || mirror_beta > 1.0 + 1e-12) continue;
        const auto m = engine.evaluate(IncompletenessSpec::uniform(f.model.branch_count(), mirror_beta));
        CHECK(std::abs(r.kl - m.kl) <= 1e-9 * std::max(1.0, r.kl));
    }
    CHECK(at(-1.0).kl <= 1e-12);
    CHECK(at(0.0).kl == engine.kl_opt());
    CHECK(at(0.0).mi == engine.mi_opt());
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) CHECK(rows[i - 1].kl - 2 * rows[i].kl + rows[i + 1].kl >= -1e-8);
    const auto best_mi = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.mi < b.mi; });
    CHECK(best_mi->beta == -1.0);

    // Along β ∈ [-1, 1]: mi falls and kl rises together.
    std::vector<BetaRow> arc;
    for (const auto& r : rows) {
        if (r.beta >= -1.0 && r.beta <= 1.0) arc.push_back(r);
    }
    for (std::size_t i = 1; i < arc.size(); ++i) {
        CHECK(arc[i].mi <= arc[i - 1].mi + 1e-9);
        CHECK(arc[i].kl >= arc[i - 1].kl - 1e-9);
    }
}

TEST_CASE("sample_bounds hits the target alpha") {
    const auto zero = sample_bounds(0, 0, 9, all_branches(9), 0.0);
    CHECK(zero.phi_min == zero.phi_max);

    const auto full = sample_bounds(3, 1, 1, {0}, 2.0);
    CHECK(full.phi_min(0) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(full.phi_max(0) == doctest::Approx(1.0).epsilon(1e-9));

    const auto one = sample_bounds(42, 0, 9, all_branches(9), 1.0);
    CHECK(std::abs(one.alpha() - 1.0) <= 1e-9);

    for (std::uint64_t t = 0; t < 200; ++t) {
        for (double alpha : {0.2, 1.0, 3.0}) {
            const auto b = sample_bounds(9, t, 9, all_branches(9), alpha);
            CHECK(std::abs(b.alpha() - alpha) <= 1e-9);
            CHECK((b.phi_min.array() >= -1.0).all());
            CHECK((b.phi_max.array() <= 1.0).all());
        }
    }
    // Close to the 2*sqrt(k) ceiling the clip iteration may stall; it must then refuse, not return a wrong alpha.
    int reached = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        try {
            const auto b = sample_bounds(9, t, 9, all_branches(9), 5.9);
            CHECK(std::abs(b.alpha() - 5.9) <= 1e-9);
            ++reached;
        } catch (const UnreachableAlphaError&) {
        }
    }
    MESSAGE(reached << "/50 draws reached alpha 5.9");
    CHECK_THROWS_AS(sample_bounds(0, 0, 9, all_branches(9), 6.01), UnreachableAlphaError);
    CHECK_THROWS_AS(sample_bounds(0, 0, 9, {}, 0.5), UnreachableAlphaError);
    CHECK_THROWS_AS(sample_bounds(0, 0, 9, all_branches(9), -0.5), DomainError);
}

TEST_CASE("subsets are uniform-size, ascending and distinct") {
    CounterRng r(1, 0, kSubsetStream);
    for (std::size_t k = 1; k <= 9; ++k) {
        const auto s = sample_subset(r, 9, k);
        CHECK(s.size() == k);
        CHECK(std::is_sorted(s.begin(), s.end()));
        CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    }
    CounterRng full(1, 0, kSubsetStream);
    CHECK(sample_subset(full, 9, 9) == all_branches(9));
}

TEST_CASE("quantiles") {
    CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
    CHECK(quantile({0, 10}, 0.75) == 7.5);
    CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
}

TEST_CASE("alpha Monte Carlo records") {
    const auto f = load_fixture("case9");
    const MetricsEngine engine(f.model, f.stats);
    MonteCarloOptions o;
    o.seed = 5;
    o.trials = 6;
    o.oracle = true;
    const auto records = alpha_montecarlo(engine, {0.0, 0.5, 2.0}, o);
    REQUIRE(records.size() == 18);
    for (const auto& r : records) {
        CHECK(std::isfinite(r.kl));
        CHECK(std::isfinite(r.mi));
        CHECK(std::abs(r.alpha - r.target_alpha) <= 1e-9);
        CHECK(r.k == 9);
        REQUIRE(r.oracle_gap.has_value());
        CHECK(*r.oracle_gap >= -1e-12);
    }
    CHECK(records[0].trial_id == 0);
    CHECK(records[6].target_alpha == 0.5);

    // α = 0 pins the box at a single point: metrics are those of that point.
    const auto pinned = sample_bounds(5, 0, 9, all_branches(9), 0.0);
    const auto p = engine.evaluate_phi(pinned.phi_min);
    CHECK(records[0].kl == doctest::Approx(p.kl).epsilon(1e-12));

    o.threads = 3;
    CHECK(write_montecarlo_csv(alpha_montecarlo(engine, {0.0, 0.5, 2.0}, o)) == write_montecarlo_csv(records));
}

TEST_CASE("k sweep records") {
    const auto f = load_fixture("case9");
    const MetricsEngine engine(f.model, f.stats);
    MonteCarloOptions o;
    o.seed = 11;
    o.trials = 50;
    o.oracle = true;
    for (const auto& r : k_sweep(engine, {1}, 1.0, o)) {
        CHECK(r.k == 1);
        CHECK(*r.oracle_gap == 0.0);
    }

    o.trials = 5;
    o.oracle = false;
    const auto full = k_sweep(engine, {9}, 1.0, o);
    const auto mc = alpha_montecarlo(engine, {1.0}, o);
    REQUIRE(full.size() == mc.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
        CHECK(full[i].phi_star_digest == mc[i].phi_star_digest);
        CHECK(full[i].kl == mc[i].kl);
    }
    CHECK_THROWS_AS(k_sweep(engine, {10}, 1.0, o), DomainError);
    CHECK_THROWS_AS(k_sweep(engine, {0}, 1.0, o), DomainError);
}

TEST_CASE("CSV schemas") {
    CHECK(write_beta_csv({}) == "beta,kl_nats,mi_nats,regime\n");
    CHECK(write_montecarlo_csv({}) == "alpha,trial,kl_nats,mi_nats,kl_opt_nats,mi_opt_nats,regime,oracle_gap\n");
    CHECK(write_ksweep_csv({}) == "k,trial,alpha,kl_nats,mi_nats,kl_opt_nats,mi_opt_nats\n");
    TrialRecord r;
    r.target_alpha = 0.2;
    r.kl = 1.0 / 3.0;
    const auto text = write_montecarlo_csv({r});
    const auto table = csv::parse(text);
    CHECK(table.rows[0][0] == "0.20000000000000001");
    CHECK(csv::parse_real(table.rows[0][2], 2) == 1.0 / 3.0);
    CHECK(table.rows[0][7].empty());
}

TEST_CASE("summaries") {
    std::vector<TrialRecord> recs;
    for (int i = 0; i < 4; ++i) {
        TrialRecord r;
        r.target_alpha = 1.0;
        r.k = 3;
        r.kl = i;
        r.kl_opt = 1.5;
        recs.push_back(r);
    }
    const auto s = summarize_by_alpha(recs);
    REQUIRE(s.size() == 1);
    CHECK(s[0].median_kl == 1.5);
    CHECK(s[0].iqr_kl == 1.5);
    CHECK(s[0].frac_kl_ge_opt == 0.5);
    CHECK(summarize_by_k(recs)[0].key == 3.0);
}
