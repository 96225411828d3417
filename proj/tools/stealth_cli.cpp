// Command-line front end: case file + scenario parameters -> CSV outputs.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stealth/attack_engine.hpp"
#include "stealth/case_ingest.hpp"
#include "stealth/csv_io.hpp"
#include "stealth/degradation_opt.hpp"
#include "stealth/errors.hpp"
#include "stealth/experiment_harness.hpp"
#include "stealth/grid_model.hpp"
#include "stealth/info_metrics.hpp"
#include "stealth/regime_analysis.hpp"
#include "stealth/stochastics.hpp"

namespace {

using namespace stealth;

struct RunConfig {
    std::string case_path;
    double rho = 0.5;
    double snr_db = 30.0;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 1;

    std::string beta_grid = "-3:1:0.02";
    std::optional<double> beta;
    std::string phi_path;
    std::string bounds_path;
    std::string alphas = "0.2,0.5,1,2";
    std::string ks = "2,5,9";
    double alpha = 1.0;
    std::size_t trials = 200;
    bool oracle = false;
    bool refine = false;
    std::size_t cap = kDefaultVertexCap;
};

struct Scenario {
    GridModel model;
    ScenarioStats stats;
};

Scenario load_scenario(const RunConfig& cfg) {
    GridModel model = build_grid_model(load_case_file(cfg.case_path));
    ScenarioStats stats = build_scenario(model, cfg.rho, cfg.snr_db);
    return Scenario{std::move(model), std::move(stats)};
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + cfg.out + "'");
    f << text;
    if (!f.flush()) throw ValidationError("failed writing '" + cfg.out + "'");
}

IncompletenessSpec load_spec(const RunConfig& cfg, Eigen::Index l) {
    if (cfg.beta) return IncompletenessSpec::uniform(l, *cfg.beta);
    if (cfg.phi_path.empty()) throw ValidationError("one of --phi or --beta is required");
    return read_spec_csv(csv::read_file(cfg.phi_path), l);
}

IncompletenessBounds load_bounds(const RunConfig& cfg, Eigen::Index l) {
    if (cfg.bounds_path.empty()) throw ValidationError("--bounds is required");
    return read_bounds_csv(csv::read_file(cfg.bounds_path), l);
}

std::vector<std::size_t> parse_ks(const std::string& text) {
    std::vector<std::size_t> ks;
    for (double v : parse_real_list(text)) {
        if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw DomainError("k values must be positive integers");
        }
        ks.push_back(static_cast<std::size_t>(v));
    }
    return ks;
}

void cmd_dump_model(const RunConfig& cfg) {
    const GridModel model = build_grid_model(load_case_file(cfg.case_path));
    const auto report = check_connectivity_and_rank(model);
    std::ostringstream os;
    os << "# buses " << model.states() + 1 << "\n";
    os << "# states " << model.states() << "\n";
    os << "# branches " << model.branch_count() << "\n";
    os << "# measurements " << model.measurements() << "\n";
    os << "# reference_bus " << model.reference_bus << "\n";
    os << "# connected " << (report.connected ? "yes" : "no") << " components " << report.components << "\n";
    os << "# jacobian_rank " << report.rank << " sigma_max " << csv::format_real(report.sigma_max)
       << " sigma_min " << csv::format_real(report.sigma_min) << "\n";
    if (report.connected && report.full_rank()) {
        const auto stats = build_scenario(model, cfg.rho, cfg.snr_db);
        os << "# noise_variance " << csv::format_real(stats.noise_variance) << "\n";
    }
    os << "branch_index,from_bus,to_bus,reactance,susceptance\n";
    for (Eigen::Index i = 0; i < model.branch_count(); ++i) {
        const auto& br = model.branches[static_cast<std::size_t>(i)];
        os << i + 1 << ',' << br.from_bus << ',' << br.to_bus << ',' << csv::format_real(br.reactance_x) << ','
           << csv::format_real(model.susceptance(i)) << '\n';
    }
    emit(cfg, os.str());
}

void cmd_classify(const RunConfig& cfg) {
    const Scenario sc = load_scenario(cfg);
    const auto spec = load_spec(cfg, sc.model.branch_count());
    const auto cls = classify_delta(delta_matrix(sc.model, sc.stats.state_cov, spec));
    const auto l5 = lemma5_check(spec.phi);
    const auto [upper, lower] = phi_tilde_eig_bounds(spec.phi);
    std::ostringstream os;
    os << "regime,min_eig,max_eig,lemma5_psd,lemma5_psd_lhs,lemma5_nsd,lemma5_nsd_lhs,phi_tilde_upper,"
          "phi_tilde_lower\n";
    os << to_string(cls.label) << ',' << csv::format_real(cls.min_eig) << ',' << csv::format_real(cls.max_eig)
       << ',' << (l5.cond_psd ? "true" : "false") << ',' << csv::format_real(l5.psd_lhs) << ','
       << (l5.cond_nsd ? "true" : "false") << ',' << csv::format_real(l5.nsd_lhs) << ','
       << csv::format_real(upper) << ',' << csv::format_real(lower) << '\n';
    emit(cfg, os.str());
}

void cmd_evaluate(const RunConfig& cfg) {
    const Scenario sc = load_scenario(cfg);
    const auto spec = load_spec(cfg, sc.model.branch_count());
    const MetricsEngine engine(sc.model, sc.stats);
    const auto p = engine.evaluate(spec);
    std::ostringstream os;
    os << "kl_nats,mi_nats,kl_opt_nats,mi_opt_nats\n";
    os << csv::format_real(p.kl) << ',' << csv::format_real(p.mi) << ',' << csv::format_real(p.kl_opt) << ','
       << csv::format_real(p.mi_opt) << '\n';
    emit(cfg, os.str());
}

void cmd_sweep_beta(const RunConfig& cfg) {
    const Scenario sc = load_scenario(cfg);
    const MetricsEngine engine(sc.model, sc.stats);
    emit(cfg, write_beta_csv(beta_sweep(engine, parse_grid(cfg.beta_grid), cfg.threads)));
}

MonteCarloOptions mc_options(const RunConfig& cfg) {
    MonteCarloOptions o;
    o.seed = cfg.seed;
    o.trials = cfg.trials;
    o.threads = cfg.threads;
    o.oracle = cfg.oracle;
    o.oracle_cap = cfg.cap;
    o.greedy.refine = cfg.refine;
    return o;
}

void cmd_montecarlo(const RunConfig& cfg) {
    const Scenario sc = load_scenario(cfg);
    const MetricsEngine engine(sc.model, sc.stats);
    const auto records = alpha_montecarlo(engine, parse_real_list(cfg.alphas), mc_options(cfg));
    emit(cfg, write_montecarlo_csv(records));
    for (const auto& s : summarize_by_alpha(records)) {
        std::cerr << "alpha " << csv::format_real(s.key) << ": median kl " << csv::format_real(s.median_kl)
                  << ", iqr " << csv::format_real(s.iqr_kl) << ", fraction kl >= kl_opt "
                  << csv::format_real(s.frac_kl_ge_opt) << "\n";
    }
}

void cmd_sweep_k(const RunConfig& cfg) {
    const Scenario sc = load_scenario(cfg);
    const MetricsEngine engine(sc.model, sc.stats);
    const auto records = k_sweep(engine, parse_ks(cfg.ks), cfg.alpha, mc_options(cfg));
    emit(cfg, write_ksweep_csv(records));
    for (const auto& s : summarize_by_k(records)) {
        std::cerr << "k " << s.key << ": median kl " << csv::format_real(s.median_kl) << ", iqr "
                  << csv::format_real(s.iqr_kl) << ", fraction kl >= kl_opt "
                  << csv::format_real(s.frac_kl_ge_opt) << "\n";
    }
}

OptimizationResult solve(const Scenario& sc, const RunConfig& cfg, const IncompletenessBounds& bounds) {
    const DetectabilityObjective objective(sc.model, sc.stats);
    auto result = greedy_maximize(objective, bounds, GreedyOptions{cfg.refine, 100});
    if (cfg.oracle) {
        const auto best = exhaustive_maximize(objective, bounds, ExhaustiveOptions{cfg.cap, cfg.threads});
        result.oracle_gap = relative_gap(result.objective, best.objective);
    }
    return result;
}

const char* choice_name(VertexChoice c) {
    switch (c) {
        case VertexChoice::Low: return "low";
        case VertexChoice::High: return "high";
        case VertexChoice::Pinned: return "pinned";
    }
    return "pinned";
}

void cmd_maximize(const RunConfig& cfg) {
    const Scenario sc = load_scenario(cfg);
    const auto bounds = load_bounds(cfg, sc.model.branch_count());
    const auto result = solve(sc, cfg, bounds);
    std::ostringstream os;
    os << "branch_index,phi_star,choice,objective,oracle_gap\n";
    for (std::size_t j = 0; j < bounds.support.size(); ++j) {
        const auto i = bounds.support[j];
        os << i + 1 << ',' << csv::format_real(result.phi_star(i)) << ',' << choice_name(result.vertex_flags[j])
           << ',' << csv::format_real(result.objective) << ',';
        if (result.oracle_gap) os << csv::format_real(*result.oracle_gap);
        os << '\n';
    }
    emit(cfg, os.str());
    std::cerr << "objective " << csv::format_real(result.objective) << " (at phi=0: "
              << csv::format_real(result.objective_at_zero) << ")";
    if (result.oracle_gap) std::cerr << ", oracle gap " << csv::format_real(*result.oracle_gap);
    std::cerr << "\n";
}

void cmd_mtd_plan(const RunConfig& cfg) {
    const Scenario sc = load_scenario(cfg);
    const auto bounds = load_bounds(cfg, sc.model.branch_count());
    const auto result = solve(sc, cfg, bounds);
    const auto spec = bounds.at(result.phi_star);
    // The attacker holds the case-file susceptances; the operator moves the
    // physical line to b/(1+φ) so that the attacker's value is off by φ.
    const auto plan = mtd_admittance(sc.model.susceptance, spec);
    std::ostringstream os;
    os << "branch_index,from_bus,to_bus,b_attacker,phi,b_target,zeroed\n";
    for (Eigen::Index i = 0; i < sc.model.branch_count(); ++i) {
        const auto& br = sc.model.branches[static_cast<std::size_t>(i)];
        os << i + 1 << ',' << br.from_bus << ',' << br.to_bus << ',' << csv::format_real(sc.model.susceptance(i))
           << ',' << csv::format_real(spec.phi(i)) << ',' << csv::format_real(plan.admittance(i)) << ','
           << (plan.zeroed[static_cast<std::size_t>(i)] ? "true" : "false") << '\n';
    }
    emit(cfg, os.str());
    if (plan.any_zeroed) std::cerr << "warning: some branches map to zero admittance (phi = -1)\n";
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Stealth degradation analysis of data injection attacks under incomplete admittance knowledge"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--case", cfg.case_path, "MATPOWER case file")->required();
    app.add_option("--rho", cfg.rho, "state correlation coefficient in [0, 1)")->capture_default_str();
    app.add_option("--snr-db", cfg.snr_db, "signal to noise ratio in dB")->capture_default_str();
    app.add_option("--seed", cfg.seed, "base seed for all random draws (default 0)")->capture_default_str();
    app.add_option("--out", cfg.out, "output file (default: standard output)");
    app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    auto* dump = app.add_subcommand("dump-model", "print the measurement model summary and branch table");
    auto* classify = app.add_subcommand("classify", "regime of a given incompleteness profile");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "KL and MI of a given incompleteness profile");
    auto* sweep_beta = app.add_subcommand("sweep-beta", "metrics along the uniform profile phi = beta");
    auto* mc = app.add_subcommand("montecarlo-alpha", "greedy attacks on random bounds for several alphas");
    auto* sweep_k = app.add_subcommand("sweep-k", "greedy attacks on random k-branch supports");
    auto* maximize = app.add_subcommand("maximize", "greedy (and optionally exhaustive) detectability maximizer");
    auto* mtd = app.add_subcommand("mtd-plan", "operator admittances realizing the maximizing profile");

    for (auto* sub : {classify, evaluate_cmd}) {
        sub->add_option("--phi", cfg.phi_path, "CSV branch_index,phi[,phi_min,phi_max]");
        sub->add_option("--beta", cfg.beta, "uniform profile phi_i = beta on every branch");
    }
    sweep_beta->add_option("--beta", cfg.beta_grid, "grid start:end:step")->capture_default_str();
    mc->add_option("--alphas", cfg.alphas, "comma-separated alpha values")->capture_default_str();
    sweep_k->add_option("--ks", cfg.ks, "comma-separated support sizes")->capture_default_str();
    sweep_k->add_option("--alpha", cfg.alpha, "alpha for every trial")->capture_default_str();
    for (auto* sub : {mc, sweep_k}) {
        sub->add_option("--trials", cfg.trials, "trials per setting")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_flag("--oracle", cfg.oracle, "also run the exhaustive search and report the gap");
        sub->add_flag("--refine", cfg.refine, "re-sweep greedy choices until stable (extension)");
    }
    for (auto* sub : {maximize, mtd}) {
        sub->add_option("--bounds", cfg.bounds_path, "CSV branch_index,phi_min,phi_max")->required();
        sub->add_flag("--oracle", cfg.oracle, "also run the exhaustive search and report the gap");
        sub->add_flag("--refine", cfg.refine, "re-sweep greedy choices until stable (extension)");
        sub->add_option("--cap", cfg.cap, "maximum free coordinates for the exhaustive search")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*dump) cmd_dump_model(cfg);
        else if (*classify) cmd_classify(cfg);
        else if (*evaluate_cmd) cmd_evaluate(cfg);
        else if (*sweep_beta) cmd_sweep_beta(cfg);
        else if (*mc) cmd_montecarlo(cfg);
        else if (*sweep_k) cmd_sweep_k(cfg);
        else if (*maximize) cmd_maximize(cfg);
        else if (*mtd) cmd_mtd_plan(cfg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
