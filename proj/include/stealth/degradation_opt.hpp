#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stealth/attack_engine.hpp"
#include "stealth/grid_model.hpp"
#include "stealth/linalg.hpp"
#include "stealth/stochastics.hpp"

namespace stealth {

/// -log|I + S^{1/2}TS^{1/2}| + tr(S^{1/2}TS^{1/2}) with T built from φ, i.e.
/// twice the KL divergence. Direct m×m evaluation; use DetectabilityObjective
/// for repeated calls.
double p1_objective(const GridModel& model, const ScenarioStats& stats, const Eigen::Ref<const Vector>& phi);

/// Fast evaluator of the same objective. With G = D Jᵀ S J D (positive
/// definite), the nonzero spectrum of S^{1/2} T S^{1/2} equals the spectrum
/// of G^{1/2} (W + Δ) G^{1/2}, so every call is an l×l eigenproblem.
class DetectabilityObjective {
public:
    DetectabilityObjective(const GridModel& model, const ScenarioStats& stats);

    double operator()(const Eigen::Ref<const Vector>& phi) const;

    Eigen::Index branch_count() const { return branch_cov_.rows(); }

private:
    Matrix branch_cov_;
    Matrix gram_root_;
};

enum class VertexChoice : std::uint8_t { Low, High, Pinned };

struct OptimizationResult {
    Vector phi_star;
    double objective = 0.0;
    double objective_at_zero = 0.0;
    std::vector<VertexChoice> vertex_flags;  // one per support index, ascending
    std::optional<double> oracle_gap;        // 1 - objective / exhaustive optimum
    std::size_t evaluations = 0;
};

inline constexpr std::size_t kDefaultVertexCap = 20;

/// Lazy enumeration of the box vertices. Pinned coordinates (phi_min ==
/// phi_max) contribute one value, so size() == 2^(free coordinates).
class VertexRange {
public:
    /// Throws CapExceededError if the free coordinate count exceeds `cap`.
    explicit VertexRange(const IncompletenessBounds& bounds, std::size_t cap = kDefaultVertexCap);

    std::uint64_t size() const { return std::uint64_t{1} << free_.size(); }
    std::size_t free_count() const { return free_.size(); }

    /// Vertex number `index`: bit j set puts the j-th free coordinate at its
    /// upper bound.
    Vector vertex(std::uint64_t index) const;
    void vertex_into(std::uint64_t index, Vector& out) const;

private:
    const IncompletenessBounds* bounds_;
    Vector base_;
    std::vector<BranchIndex> free_;
};

struct GreedyOptions {
    /// Re-sweep the coordinates, flipping any that strictly improve the
    /// objective, until a full pass changes nothing. Off by default.
    bool refine = false;
    std::size_t max_passes = 100;
};

struct ExhaustiveOptions {
    std::size_t cap = kDefaultVertexCap;
    unsigned threads = 1;
};

OptimizationResult greedy_maximize(const DetectabilityObjective& objective, const IncompletenessBounds& bounds,
                                   const GreedyOptions& options = {});
OptimizationResult greedy_maximize(const GridModel& model, const ScenarioStats& stats,
                                   const IncompletenessBounds& bounds, const GreedyOptions& options = {});

/// Global maximum over the vertex set. Equal objectives are broken towards
/// the lexicographically smallest φ, independent of thread count.
OptimizationResult exhaustive_maximize(const DetectabilityObjective& objective, const IncompletenessBounds& bounds,
                                       const ExhaustiveOptions& options = {});
OptimizationResult exhaustive_maximize(const GridModel& model, const ScenarioStats& stats,
                                       const IncompletenessBounds& bounds, const ExhaustiveOptions& options = {});

/// 1 - greedy / optimum, or 0 when the optimum is 0.
double relative_gap(double greedy_objective, double optimum);

/// max over θ ∈ {0, 1/steps, ..., 1} of f(θa + (1-θ)b) - θf(a) - (1-θ)f(b).
double convexity_line_check(const DetectabilityObjective& objective, const Eigen::Ref<const Vector>& phi_a,
                            const Eigen::Ref<const Vector>& phi_b, int steps);

}  // namespace stealth
