#include "stealth/degradation_opt.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "stealth/errors.hpp"
#include "stealth/info_metrics.hpp"

namespace stealth {
namespace {

std::vector<VertexChoice> flags_for(const IncompletenessBounds& bounds, const Vector& phi) {
    std::vector<VertexChoice> flags;
    flags.reserve(bounds.k());
    for (auto i : bounds.support) {
        if (bounds.phi_min(i) == bounds.phi_max(i)) {
            flags.push_back(VertexChoice::Pinned);
        } else {
            flags.push_back(phi(i) == bounds.phi_min(i) ? VertexChoice::Low : VertexChoice::High);
        }
    }
    return flags;
}

bool lex_less(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

struct Best {
    double value = -std::numeric_limits<double>::infinity();
    Vector phi;
    bool set = false;

    void offer(double v, const Vector& candidate) {
        if (!set || v > value || (v == value && lex_less(candidate, phi))) {
            value = v;
            phi = candidate;
            set = true;
        }
    }
};

void check_length(const DetectabilityObjective& objective, const IncompletenessBounds& bounds) {
    bounds.validate();
    if (bounds.branch_count() != objective.branch_count()) {
        throw ValidationError("bounds cover " + std::to_string(bounds.branch_count()) + " branches, model has " +
                              std::to_string(objective.branch_count()));
    }
}

}  // namespace

double p1_objective(const GridModel& model, const ScenarioStats& stats, const Eigen::Ref<const Vector>& phi) {
    const Matrix w = branch_angle_cov(model, stats.state_cov);
    const Matrix t = lift_branch_cov(model, w + delta_matrix(w, phi));
    return 2.0 * kl_divergence(stats.precision, t);
}

DetectabilityObjective::DetectabilityObjective(const GridModel& model, const ScenarioStats& stats)
    : branch_cov_(branch_angle_cov(model, stats.state_cov)) {
    const Matrix jd = model.stacking * model.susceptance.asDiagonal();
    gram_root_ = sym_sqrt(jd.transpose() * stats.precision * jd);
}

double DetectabilityObjective::operator()(const Eigen::Ref<const Vector>& phi) const {
    const Matrix inner = branch_cov_ + delta_matrix(branch_cov_, phi);
    return 2.0 * kl_from_eigenvalues(sym_eigenvalues(gram_root_ * inner * gram_root_));
}

VertexRange::VertexRange(const IncompletenessBounds& bounds, std::size_t cap)
    : bounds_(&bounds), base_(bounds.phi_min) {
    for (auto i : bounds.support) {
        if (bounds.phi_min(i) != bounds.phi_max(i)) free_.push_back(i);
    }
    if (free_.size() > cap || free_.size() >= 63) {
        throw CapExceededError(std::to_string(free_.size()) + " free coordinates exceed the vertex cap of " +
                               std::to_string(cap));
    }
}

void VertexRange::vertex_into(std::uint64_t index, Vector& out) const {
    out = base_;
    for (std::size_t j = 0; j < free_.size(); ++j) {
        if ((index >> j) & 1U) out(free_[j]) = bounds_->phi_max(free_[j]);
    }
}

Vector VertexRange::vertex(std::uint64_t index) const {
    Vector out;
    vertex_into(index, out);
    return out;
}

OptimizationResult greedy_maximize(const DetectabilityObjective& objective, const IncompletenessBounds& bounds,
                                   const GreedyOptions& options) {
    check_length(objective, bounds);
    OptimizationResult r;
    Vector phi = Vector::Zero(bounds.branch_count());
    for (auto i : bounds.support) {
        const double lo = bounds.phi_min(i);
        const double hi = bounds.phi_max(i);
        if (lo == hi) {
            phi(i) = lo;
            continue;
        }
        phi(i) = lo;
        const double o1 = objective(phi);
        phi(i) = hi;
        const double o2 = objective(phi);
        r.evaluations += 2;
        phi(i) = o1 >= o2 ? lo : hi;
    }

    if (options.refine) {
        double current = objective(phi);
        ++r.evaluations;
        for (std::size_t pass = 0; pass < options.max_passes; ++pass) {
            bool changed = false;
            for (auto i : bounds.support) {
                const double lo = bounds.phi_min(i);
                const double hi = bounds.phi_max(i);
                if (lo == hi) continue;
                const double keep = phi(i);
                phi(i) = keep == lo ? hi : lo;
                const double flipped = objective(phi);
                ++r.evaluations;
                if (flipped > current) {
                    current = flipped;
                    changed = true;
                } else {
                    phi(i) = keep;
                }
            }
            if (!changed) break;
        }
    }

    r.objective = objective(phi);
    r.objective_at_zero = objective(Vector::Zero(bounds.branch_count()));
    r.vertex_flags = flags_for(bounds, phi);
    r.phi_star = std::move(phi);
    return r;
}

OptimizationResult greedy_maximize(const GridModel& model, const ScenarioStats& stats,
                                   const IncompletenessBounds& bounds, const GreedyOptions& options) {
    return greedy_maximize(DetectabilityObjective(model, stats), bounds, options);
}

OptimizationResult exhaustive_maximize(const DetectabilityObjective& objective, const IncompletenessBounds& bounds,
                                       const ExhaustiveOptions& options) {
    check_length(objective, bounds);
    const VertexRange range(bounds, options.cap);
    const std::uint64_t total = range.size();
    const unsigned threads =
        static_cast<unsigned>(std::clamp<std::uint64_t>(options.threads == 0 ? 1 : options.threads, 1, total));

    std::vector<Best> partial(threads);
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned t) {
        try {
            const std::uint64_t begin = total * t / threads;
            const std::uint64_t end = total * (t + 1) / threads;
            Vector phi;
            for (std::uint64_t v = begin; v < end; ++v) {
                range.vertex_into(v, phi);
                partial[t].offer(objective(phi), phi);
            }
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    Best best;
    for (const auto& p : partial) {
        if (p.set) best.offer(p.value, p.phi);
    }
    OptimizationResult r;
    r.objective = best.value;
    r.objective_at_zero = objective(Vector::Zero(bounds.branch_count()));
    r.vertex_flags = flags_for(bounds, best.phi);
    r.phi_star = std::move(best.phi);
    r.evaluations = static_cast<std::size_t>(total);
    r.oracle_gap = 0.0;
    return r;
}

OptimizationResult exhaustive_maximize(const GridModel& model, const ScenarioStats& stats,
                                       const IncompletenessBounds& bounds, const ExhaustiveOptions& options) {
    return exhaustive_maximize(DetectabilityObjective(model, stats), bounds, options);
}

double relative_gap(double greedy_objective, double optimum) {
    if (optimum == 0.0) return 0.0;
    return 1.0 - greedy_objective / optimum;
}

double convexity_line_check(const DetectabilityObjective& objective, const Eigen::Ref<const Vector>& phi_a,
                            const Eigen::Ref<const Vector>& phi_b, int steps) {
    if (steps < 1) throw DomainError("steps must be positive");
    const double fa = objective(phi_a);
    const double fb = objective(phi_b);
    double worst = 0.0;
    for (int s = 0; s <= steps; ++s) {
        const double theta = static_cast<double>(s) / steps;
        const Vector p = theta * phi_a + (1.0 - theta) * phi_b;
        worst = std::max(worst, objective(p) - (theta * fa + (1.0 - theta) * fb));
    }
    return worst;
}

}  // namespace stealth
