#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stealth/attack_engine.hpp"
#include "stealth/degradation_opt.hpp"
#include "stealth/info_metrics.hpp"
#include "stealth/regime_analysis.hpp"
#include "stealth/rng.hpp"

namespace stealth {

/// Inclusive range start, start+step, ..., end; end is included when it lies
/// on the grid up to rounding. When start is a multiple of step the points are
/// computed as exact multiples, so values such as -1, 0 and -2 appear exactly.
std::vector<double> range_grid(double start, double end, double step);

/// Parses "start:end:step", or a single number. Throws SyntaxError.
std::vector<double> parse_grid(std::string_view text);

/// Parses a comma-separated list of numbers. Throws SyntaxError.
std::vector<double> parse_real_list(std::string_view text);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

struct BetaRow {
    double beta = 0.0;
    double kl = 0.0;
    double mi = 0.0;
    RegimeLabel regime = RegimeLabel::Boundary;
};

std::vector<BetaRow> beta_sweep(const MetricsEngine& engine, const std::vector<double>& betas,
                                unsigned threads = 1);

/// Bounds on `support` with ‖φ_max - φ_min‖ = target_alpha. Each coordinate
/// starts from an ordered pair of uniform draws on [-1, 1]; the gap vector is
/// then rescaled about the midpoints and clipped to [-1, 1] until the norm
/// matches within 1e-9. Throws UnreachableAlphaError if target_alpha exceeds
/// 2√k or the iteration does not converge.
IncompletenessBounds sample_bounds(CounterRng& rng, Eigen::Index l, const std::vector<BranchIndex>& support,
                                   double target_alpha);
IncompletenessBounds sample_bounds(std::uint64_t seed, std::uint64_t trial, Eigen::Index l,
                                   const std::vector<BranchIndex>& support, double target_alpha);

/// Uniform k-subset of {0..l-1}, ascending.
std::vector<BranchIndex> sample_subset(CounterRng& rng, Eigen::Index l, std::size_t k);

struct TrialRecord {
    std::uint64_t trial_id = 0;
    double target_alpha = 0.0;
    double alpha = 0.0;  // realized ‖φ_max - φ_min‖
    std::size_t k = 0;
    double kl = 0.0;
    double mi = 0.0;
    double kl_opt = 0.0;
    double mi_opt = 0.0;
    RegimeLabel regime = RegimeLabel::Boundary;
    std::optional<double> oracle_gap;
    std::uint64_t phi_star_digest = 0;
};

struct MonteCarloOptions {
    std::uint64_t seed = 0;
    std::size_t trials = 200;
    unsigned threads = 1;
    /// Also run the exhaustive search (subject to the vertex cap) and fill
    /// oracle_gap.
    bool oracle = false;
    std::size_t oracle_cap = kDefaultVertexCap;
    GreedyOptions greedy;
};

/// FNV-1a over the bytes of φ.
std::uint64_t phi_digest(const Eigen::Ref<const Vector>& phi);

/// For every α and trial: bounds on all branches, greedy, metrics at φ*.
/// Trial t uses the same base draw for every α. Ordered by (α, trial).
std::vector<TrialRecord> alpha_montecarlo(const MetricsEngine& engine, const std::vector<double>& alphas,
                                          const MonteCarloOptions& options);

/// For every k and trial: random k-subset, bounds at target_alpha, greedy,
/// metrics at φ*. With k = l this reproduces alpha_montecarlo's draws.
std::vector<TrialRecord> k_sweep(const MetricsEngine& engine, const std::vector<std::size_t>& ks,
                                 double target_alpha, const MonteCarloOptions& options);

std::string write_beta_csv(const std::vector<BetaRow>& rows);
std::string write_montecarlo_csv(const std::vector<TrialRecord>& records);
std::string write_ksweep_csv(const std::vector<TrialRecord>& records);

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);

struct GroupSummary {
    double key = 0.0;  // α or k
    std::size_t count = 0;
    double median_kl = 0.0;
    double iqr_kl = 0.0;
    double median_mi = 0.0;
    double frac_kl_ge_opt = 0.0;  // kl ≥ kl_opt within 1e-9·max(1, kl_opt)
};

std::vector<GroupSummary> summarize_by_alpha(const std::vector<TrialRecord>& records);
std::vector<GroupSummary> summarize_by_k(const std::vector<TrialRecord>& records);

}  // namespace stealth
