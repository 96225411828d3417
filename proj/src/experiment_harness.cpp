#include "stealth/experiment_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "stealth/csv_io.hpp"
#include "stealth/errors.hpp"

namespace stealth {
namespace {

bool near_integer(double x, double& rounded) {
    rounded = std::round(x);
    return std::abs(x - rounded) <= 1e-9 * std::max(1.0, std::abs(x));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        auto part = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        parts.push_back(part);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

bool kl_at_least_opt(const TrialRecord& r) { return r.kl >= r.kl_opt - 1e-9 * std::max(1.0, r.kl_opt); }

GroupSummary summarize(double key, const std::vector<const TrialRecord*>& group) {
    GroupSummary s;
    s.key = key;
    s.count = group.size();
    std::vector<double> kl, mi;
    std::size_t above = 0;
    for (const auto* r : group) {
        kl.push_back(r->kl);
        mi.push_back(r->mi);
        if (kl_at_least_opt(*r)) ++above;
    }
    s.median_kl = quantile(kl, 0.5);
    s.iqr_kl = quantile(kl, 0.75) - quantile(kl, 0.25);
    s.median_mi = quantile(mi, 0.5);
    s.frac_kl_ge_opt = group.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(group.size());
    return s;
}

// Shared by both experiments: greedy on `bounds`, then the full metrics at φ*.
TrialRecord run_trial(const MetricsEngine& engine, const DetectabilityObjective& objective,
                      const IncompletenessBounds& bounds, const MonteCarloOptions& options) {
    const auto result = greedy_maximize(objective, bounds, options.greedy);
    const auto point = engine.evaluate_phi(result.phi_star);
    TrialRecord r;
    r.alpha = bounds.alpha();
    r.k = bounds.k();
    r.kl = point.kl;
    r.mi = point.mi;
    r.kl_opt = point.kl_opt;
    r.mi_opt = point.mi_opt;
    r.regime = classify_delta(delta_matrix(engine.branch_cov(), result.phi_star)).label;
    r.phi_star_digest = phi_digest(result.phi_star);
    if (options.oracle) {
        const auto best = exhaustive_maximize(objective, bounds, ExhaustiveOptions{options.oracle_cap, 1});
        r.oracle_gap = relative_gap(result.objective, best.objective);
    }
    return r;
}

}  // namespace

std::vector<double> range_grid(double start, double end, double step) {
    if (!std::isfinite(start) || !std::isfinite(end) || !std::isfinite(step)) {
        throw DomainError("grid bounds must be finite");
    }
    if (!(step > 0.0)) throw DomainError("grid step must be positive");
    if (end < start) throw DomainError("grid end is below its start");
    const double span = (end - start) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-6)) + 1;
    if (count > 10'000'000) throw DomainError("grid has too many points");

    double q0 = 0.0, inv = 0.0;
    const bool aligned = near_integer(start / step, q0);
    const bool unit_fraction = near_integer(1.0 / step, inv) && inv > 0.0;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double q = q0 + static_cast<double>(i);
        if (aligned && unit_fraction) {
            grid[i] = q / inv;
        } else if (aligned) {
            grid[i] = q * step;
        } else {
            grid[i] = start + static_cast<double>(i) * step;
        }
    }
    return grid;
}

std::vector<double> parse_grid(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) return {csv::parse_real(parts[0], 1)};
    if (parts.size() != 3) throw SyntaxError(1, "grid must be start:end:step, got '" + std::string(text) + "'");
    return range_grid(csv::parse_real(parts[0], 1), csv::parse_real(parts[1], 1), csv::parse_real(parts[2], 1));
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (auto p : split(text, ',')) out.push_back(csv::parse_real(p, 1));
    return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    const auto count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<BetaRow> beta_sweep(const MetricsEngine& engine, const std::vector<double>& betas, unsigned threads) {
    const Eigen::Index l = engine.branch_cov().rows();
    std::vector<BetaRow> rows(betas.size());
    parallel_for(betas.size(), threads, [&](std::size_t i) {
        if (!std::isfinite(betas[i])) throw DomainError("beta must be finite");
        const auto p = engine.evaluate(IncompletenessSpec::uniform(l, betas[i]));
        rows[i] = BetaRow{betas[i], p.kl, p.mi, prop2_classify(betas[i])};
    });
    return rows;
}

IncompletenessBounds sample_bounds(CounterRng& rng, Eigen::Index l, const std::vector<BranchIndex>& support,
                                   double target_alpha) {
    if (!(target_alpha >= 0.0) || !std::isfinite(target_alpha)) {
        throw DomainError("target alpha must be a finite nonnegative number");
    }
    const std::size_t k = support.size();
    if (target_alpha > 2.0 * std::sqrt(static_cast<double>(k)) + 1e-12) {
        throw UnreachableAlphaError("alpha " + csv::format_real(target_alpha) + " exceeds the maximum 2*sqrt(" +
                                    std::to_string(k) + ")");
    }
    Vector lo(static_cast<Eigen::Index>(k)), hi(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        lo(static_cast<Eigen::Index>(j)) = std::min(a, b);
        hi(static_cast<Eigen::Index>(j)) = std::max(a, b);
    }

    if (target_alpha == 0.0) {
        lo = hi = 0.5 * (lo + hi);
    } else {
        bool converged = false;
        for (int round = 0; round < 100 && !converged; ++round) {
            const Vector gap = hi - lo;
            const double norm = gap.norm();
            if (norm == 0.0) throw UnreachableAlphaError("all sampled intervals are degenerate");
            const Vector mid = 0.5 * (lo + hi);
            const Vector half = 0.5 * (target_alpha / norm) * gap;
            lo = (mid - half).cwiseMax(-1.0);
            hi = (mid + half).cwiseMin(1.0);
            converged = std::abs((hi - lo).norm() - target_alpha) <= 1e-9;
        }
        if (!converged) {
            throw UnreachableAlphaError("bound rescaling did not reach alpha " + csv::format_real(target_alpha));
        }
    }
    return IncompletenessBounds::on_support(l, support, std::vector<double>(lo.data(), lo.data() + lo.size()),
                                            std::vector<double>(hi.data(), hi.data() + hi.size()));
}

IncompletenessBounds sample_bounds(std::uint64_t seed, std::uint64_t trial, Eigen::Index l,
                                   const std::vector<BranchIndex>& support, double target_alpha) {
    CounterRng rng(seed, trial, kBoundsStream);
    return sample_bounds(rng, l, support, target_alpha);
}

std::vector<BranchIndex> sample_subset(CounterRng& rng, Eigen::Index l, std::size_t k) {
    if (k > static_cast<std::size_t>(l)) throw DomainError("subset size exceeds branch count");
    std::vector<BranchIndex> pool(static_cast<std::size_t>(l));
    std::iota(pool.begin(), pool.end(), BranchIndex{0});
    for (std::size_t j = 0; j < k; ++j) {
        const auto r = j + static_cast<std::size_t>(rng.below(pool.size() - j));
        std::swap(pool[j], pool[r]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::uint64_t phi_digest(const Eigen::Ref<const Vector>& phi) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        unsigned char bytes[sizeof(double)];
        const double v = phi(i) == 0.0 ? 0.0 : phi(i);  // fold -0.0
        std::memcpy(bytes, &v, sizeof v);
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::vector<TrialRecord> alpha_montecarlo(const MetricsEngine& engine, const std::vector<double>& alphas,
                                          const MonteCarloOptions& options) {
    if (options.trials < 1) throw DomainError("trials must be at least 1");
    const Eigen::Index l = engine.branch_cov().rows();
    std::vector<BranchIndex> support(static_cast<std::size_t>(l));
    std::iota(support.begin(), support.end(), BranchIndex{0});
    const DetectabilityObjective objective(engine.model(), engine.stats());

    std::vector<TrialRecord> records(alphas.size() * options.trials);
    parallel_for(records.size(), options.threads, [&](std::size_t idx) {
        const std::size_t a = idx / options.trials;
        const std::uint64_t t = idx % options.trials;
        const auto bounds = sample_bounds(options.seed, t, l, support, alphas[a]);
        TrialRecord r = run_trial(engine, objective, bounds, options);
        r.trial_id = t;
        r.target_alpha = alphas[a];
        records[idx] = r;
    });
    return records;
}

std::vector<TrialRecord> k_sweep(const MetricsEngine& engine, const std::vector<std::size_t>& ks,
                                 double target_alpha, const MonteCarloOptions& options) {
    if (options.trials < 1) throw DomainError("trials must be at least 1");
    const Eigen::Index l = engine.branch_cov().rows();
    for (auto k : ks) {
        if (k < 1 || k > static_cast<std::size_t>(l)) {
            throw DomainError("k must lie in 1.." + std::to_string(l) + ", got " + std::to_string(k));
        }
    }
    const DetectabilityObjective objective(engine.model(), engine.stats());

    std::vector<TrialRecord> records(ks.size() * options.trials);
    parallel_for(records.size(), options.threads, [&](std::size_t idx) {
        const std::size_t ki = idx / options.trials;
        const std::uint64_t t = idx % options.trials;
        CounterRng subset_rng(options.seed, t, kSubsetStream);
        const auto support = sample_subset(subset_rng, l, ks[ki]);
        const auto bounds = sample_bounds(options.seed, t, l, support, target_alpha);
        TrialRecord r = run_trial(engine, objective, bounds, options);
        r.trial_id = t;
        r.target_alpha = target_alpha;
        records[idx] = r;
    });
    return records;
}

std::string write_beta_csv(const std::vector<BetaRow>& rows) {
    std::ostringstream os;
    os << "beta,kl_nats,mi_nats,regime\n";
    for (const auto& r : rows) {
        os << csv::format_real(r.beta) << ',' << csv::format_real(r.kl) << ',' << csv::format_real(r.mi) << ','
           << to_string(r.regime) << '\n';
    }
    return os.str();
}

std::string write_montecarlo_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream os;
    os << "alpha,trial,kl_nats,mi_nats,kl_opt_nats,mi_opt_nats,regime,oracle_gap\n";
    for (const auto& r : records) {
        os << csv::format_real(r.target_alpha) << ',' << r.trial_id << ',' << csv::format_real(r.kl) << ','
           << csv::format_real(r.mi) << ',' << csv::format_real(r.kl_opt) << ',' << csv::format_real(r.mi_opt)
           << ',' << to_string(r.regime) << ',';
        if (r.oracle_gap) os << csv::format_real(*r.oracle_gap);
        os << '\n';
    }
    return os.str();
}

std::string write_ksweep_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream os;
    os << "k,trial,alpha,kl_nats,mi_nats,kl_opt_nats,mi_opt_nats\n";
    for (const auto& r : records) {
        os << r.k << ',' << r.trial_id << ',' << csv::format_real(r.alpha) << ',' << csv::format_real(r.kl) << ','
           << csv::format_real(r.mi) << ',' << csv::format_real(r.kl_opt) << ',' << csv::format_real(r.mi_opt)
           << '\n';
    }
    return os.str();
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw DomainError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<GroupSummary> summarize_by_alpha(const std::vector<TrialRecord>& records) {
    std::vector<double> keys;
    for (const auto& r : records) {
        if (std::find(keys.begin(), keys.end(), r.target_alpha) == keys.end()) keys.push_back(r.target_alpha);
    }
    std::vector<GroupSummary> out;
    for (double key : keys) {
        std::vector<const TrialRecord*> group;
        for (const auto& r : records) {
            if (r.target_alpha == key) group.push_back(&r);
        }
        out.push_back(summarize(key, group));
    }
    return out;
}

std::vector<GroupSummary> summarize_by_k(const std::vector<TrialRecord>& records) {
    std::vector<std::size_t> keys;
    for (const auto& r : records) {
        if (std::find(keys.begin(), keys.end(), r.k) == keys.end()) keys.push_back(r.k);
    }
    std::vector<GroupSummary> out;
    for (auto key : keys) {
        std::vector<const TrialRecord*> group;
        for (const auto& r : records) {
            if (r.k == key) group.push_back(&r);
        }
        out.push_back(summarize(static_cast<double>(key), group));
    }
    return out;
}

}  // namespace stealth
