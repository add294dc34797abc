// distbh command-line front end.
//
//   distbh run    --experiment {1..5} [...]   sweep one experiment, write CSV
//   distbh oracle --fixture <path>            regenerate golden oracle values
//   distbh bench                              time one million-p-value round
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distbh/errors.hpp"
#include "distbh/harness.hpp"
#include "distbh/normal.hpp"
#include "distbh/oracle.hpp"
#include "distbh/protocol.hpp"

namespace {

using namespace distbh;

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad grid value: " + item);
        }
    }
    if (out.empty()) throw ConfigError("empty grid");
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("DISTBH_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError(std::string("DISTBH_SEED is not an integer: ") + env);
        }
    }
    return 1;
}

// ---------------------------------------------------------------------------
// oracle fixtures: an implementation-independent route to F and tau*.
// F uses the closed-form antiderivative of Phi (int Phi = u Phi(u) + phi(u))
// over the uniform mu-interval; tau* comes from a dense descending grid scan
// of F(t) - beta t. Deliberately not calling oracle.hpp so the fixtures stay
// an independent cross-check of the quadrature/bisection path.
// ---------------------------------------------------------------------------

double phi_antideriv(double u) { return u * norm_cdf(u) + norm_pdf(u); }

double closed_form_alt_cdf(double mu_base, double half_width, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double z = -norm_ppf(0.5 * t);
    if (half_width == 0.0) return norm_cdf(mu_base - z) + norm_cdf(-z - mu_base);
    const double lo = mu_base - half_width, hi = mu_base + half_width;
    const double first = phi_antideriv(hi - z) - phi_antideriv(lo - z);
    const double second = phi_antideriv(-z - lo) - phi_antideriv(-z - hi);
    return (first + second) / (hi - lo);
}

double brute_force_tau(double alpha, double r0, double mu_base, double half_width,
                       double step) {
    const double beta = ((1.0 / alpha) - r0) / (1.0 - r0);
    const double upper = 1.0 / beta;
    const auto h = [&](double t) {
        return closed_form_alt_cdf(mu_base, half_width, t) - beta * t;
    };
    if (h(upper) >= 0.0) return upper;
    const auto steps = static_cast<std::uint64_t>(upper / step);
    for (std::uint64_t i = 1; i <= steps; ++i) {
        const double t = upper - static_cast<double>(i) * step;
        if (t <= 0.0) break;
        if (h(t) >= 0.0) return t + 0.5 * step;  // crossing inside [t, t+step]
    }
    return 0.0;
}

int cmd_oracle(const std::string& fixture_path, double step) {
    struct FRecord { double mu_base, half_width, t; };
    struct TauRecord { double alpha, r0, mu_base, half_width; };

    const std::vector<FRecord> f_records = {
        {3.0, 0.0, 0.05}, {3.0, 0.0, 0.2}, {3.0, 0.0, 0.5},
        {3.0, 0.5, 0.05}, {3.0, 0.5, 0.2}, {3.0, 0.5, 0.5},
        {2.5, 0.5, 0.1},
    };
    const std::vector<TauRecord> tau_records = {
        {0.2, 0.8, 3.0, 0.0},
        {0.2, 0.5, 3.0, 0.0},
        {0.2, 0.8, 3.0, 0.5},
        {0.2, 0.5, 3.0, 0.5},
        {0.2, 0.847, 3.0, 0.5},
        {0.1, 0.9, 2.5, 0.5},
    };

    std::ofstream out(fixture_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open fixture path " + fixture_path);

    char line[256];
    out << "# golden oracle values, regenerate with: distbh oracle --fixture <path>\n";
    out << "# F <mu_base> <half_width> <t> <value>\n";
    out << "# tau <alpha> <r0> <mu_base> <half_width> <value>\n";
    for (const auto& r : f_records) {
        std::snprintf(line, sizeof(line), "F %.17g %.17g %.17g %.17g\n", r.mu_base,
                      r.half_width, r.t, closed_form_alt_cdf(r.mu_base, r.half_width, r.t));
        out << line;
    }
    for (const auto& r : tau_records) {
        std::snprintf(line, sizeof(line), "tau %.17g %.17g %.17g %.17g %.17g\n", r.alpha,
                      r.r0, r.mu_base, r.half_width,
                      brute_force_tau(r.alpha, r.r0, r.mu_base, r.half_width, step));
        out << line;
    }
    if (!out) throw std::runtime_error("write failed for " + fixture_path);
    std::cout << "wrote " << f_records.size() << " F records and " << tau_records.size()
              << " tau records to " << fixture_path << " (grid step " << step << ")\n";
    return 0;
}

int cmd_bench(std::uint64_t total_pvalues, std::uint32_t n_nodes) {
    using clock = std::chrono::steady_clock;
    const auto ms = [](auto d) {
        return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(d).count();
    };

    const std::uint64_t per_node = total_pvalues / n_nodes;
    SeedPolicy seeds{default_seed()};

    NodeGenSpec spec;
    spec.m = per_node;
    spec.m1 = per_node / 10;
    spec.alt = AlternativeModel{3.0, 0.5, true};

    const auto t0 = clock::now();
    std::vector<NodeState> nodes(n_nodes);
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        nodes[i].node_id = i + 1;
        auto stream = seeds.stream(0, i + 1);
        nodes[i].batch = gen_node_batch(spec, stream);
    }
    const auto t1 = clock::now();

    InProcessTransport transport;
    const auto results = run_round(nodes, 0.2, transport, 0);
    const auto t2 = clock::now();

    std::size_t rejections = 0;
    for (const auto& r : results) rejections += r.rejected.size();

    std::printf("nodes=%u  p-values=%" PRIu64 "  rejections=%zu\n", n_nodes,
                per_node * n_nodes, rejections);
    std::printf("generate: %8.1f ms\n", ms(t1 - t0));
    std::printf("round:    %8.1f ms  (estimate + aggregate + calibrated BH)\n", ms(t2 - t1));
    std::printf("traffic:  %" PRIu64 " messages, %" PRIu64 " payload bytes\n",
                transport.stats().messages, transport.stats().payload_bytes);
    return 0;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& out_path) {
    const auto started = std::chrono::steady_clock::now();
    const auto results = run_experiment(cfg);
    emit_csv(results, out_path);
    const auto elapsed = std::chrono::duration_cast<std::chrono::duration<double>>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    std::printf("experiment %d: %zu rows -> %s  (%.1fs, %d trials, seed %" PRIu64 ")\n",
                cfg.experiment, results.size(), out_path.c_str(), elapsed, cfg.trials,
                cfg.seed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distbh: communication-efficient distributed BH simulator"};
    app.require_subcommand(1);

    // ---- run -----------------------------------------------------------
    auto* run = app.add_subcommand("run", "run one experiment sweep and write CSV");
    int experiment = 0;
    std::string config_path, out_path, estimator_name, cov_name, size_rule_name,
        local_rule_name, n_grid, mu_grid, rho_grid;
    double alpha = -1.0, lambda = -1.0, spacing_l = -1.0, mu_base_flag = -1.0,
           n_fixed_flag = -1.0, r1_max_flag = -1.0;
    std::int64_t nodes_flag = -1, trials_flag = -1, block_flag = -1, threads_flag = -1;
    std::uint64_t seed_flag = 0;
    bool r1_random = false;

    run->add_option("--experiment", experiment, "experiment id")->check(CLI::Range(1, 5));
    run->add_option("--config", config_path, "key = value config file");
    run->add_option("--alpha", alpha, "target FDR level");
    run->add_option("--nodes", nodes_flag, "number of leaf nodes N");
    run->add_option("--trials", trials_flag, "Monte Carlo trials per grid point");
    run->add_option("--estimator", estimator_name, "storey | spacing");
    run->add_option("--lambda", lambda, "Storey lambda");
    run->add_option("--l", spacing_l, "spacing window exponent");
    auto* seed_opt = run->add_option("--seed", seed_flag, "base seed (default $DISTBH_SEED or 1)");
    run->add_option("--out", out_path, "output CSV path");
    run->add_option("--n-grid", n_grid, "comma list of n values (experiments 1/2/4)");
    run->add_option("--mu-grid", mu_grid, "comma list of mu_base values (experiment 3)");
    run->add_option("--rho-grid", rho_grid, "comma list of rho values (experiment 5)");
    run->add_option("--cov", cov_name, "experiment 5 covariance: ar1 | block");
    run->add_option("--size-rule", size_rule_name, "uniform | power");
    run->add_option("--mu-base", mu_base_flag, "alternative mean scale");
    run->add_option("--n", n_fixed_flag, "node-size scale for experiments 3/5");
    run->add_option("--r1-max", r1_max_flag, "alternative fraction cap");
    run->add_flag("--r1-random", r1_random, "draw r1_i ~ Unif[0, r1_max] once per run");
    run->add_option("--block-size", block_flag, "experiment 5 block size");
    run->add_option("--local-rule", local_rule_name,
                    "no-communication test size: proportional | global");
    run->add_option("--threads", threads_flag, "trial worker threads (0 = hardware)");

    // ---- oracle ----------------------------------------------------------
    auto* oracle = app.add_subcommand("oracle", "regenerate golden oracle fixtures");
    std::string fixture_path;
    double grid_step = 1e-6;
    oracle->add_option("--fixture", fixture_path, "output fixture path")->required();
    oracle->add_option("--step", grid_step, "brute-force grid step")
        ->check(CLI::PositiveNumber);

    // ---- bench -----------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "time one large protocol round");
    std::uint64_t bench_pvalues = 1000000;
    std::int64_t bench_nodes = 50;
    bench->add_option("--pvalues", bench_pvalues, "total p-values in the round");
    bench->add_option("--nodes", bench_nodes, "number of leaf nodes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(oracle)) return cmd_oracle(fixture_path, grid_step);
        if (app.got_subcommand(bench))
            return cmd_bench(bench_pvalues, static_cast<std::uint32_t>(bench_nodes));

        // assemble the run config: defaults, then file, then explicit flags
        if (experiment == 0 && config_path.empty())
            throw ConfigError("run: --experiment or --config required");

        ExperimentConfig cfg;
        if (!config_path.empty()) {
            // the file may carry the experiment id; start from a neutral base
            ExperimentConfig probe;
            probe.experiment = 0;
            probe = load_config_file(config_path, probe);
            if (experiment != 0 && probe.experiment != 0 && probe.experiment != experiment)
                throw ConfigError("run: --experiment conflicts with config file");
            const int id = experiment != 0 ? experiment : probe.experiment;
            cfg = load_config_file(config_path, ExperimentConfig::defaults_for(id));
            cfg.experiment = id;
        } else {
            cfg = ExperimentConfig::defaults_for(experiment);
        }
        cfg.seed = seed_opt->count() > 0 ? seed_flag : default_seed();

        if (alpha >= 0.0) cfg.alpha = alpha;
        if (nodes_flag >= 0) cfg.nodes = static_cast<std::uint32_t>(nodes_flag);
        if (trials_flag >= 0) cfg.trials = static_cast<int>(trials_flag);
        if (!estimator_name.empty()) {
            if (estimator_name == "storey") cfg.estimator.kind = EstimatorConfig::Kind::storey;
            else if (estimator_name == "spacing")
                cfg.estimator.kind = EstimatorConfig::Kind::spacing;
            else throw ConfigError("unknown estimator: " + estimator_name);
        }
        if (lambda >= 0.0) cfg.estimator.lambda = lambda;
        if (spacing_l >= 0.0) cfg.estimator.l = spacing_l;
        if (mu_base_flag >= 0.0) cfg.mu_base = mu_base_flag;
        if (n_fixed_flag >= 0.0) cfg.n_fixed = n_fixed_flag;
        if (r1_max_flag >= 0.0) cfg.r1_max = r1_max_flag;
        if (r1_random) cfg.r1_random = true;
        if (block_flag >= 0) cfg.block_size = static_cast<std::size_t>(block_flag);
        if (threads_flag >= 0) cfg.threads = static_cast<unsigned>(threads_flag);
        if (!cov_name.empty()) {
            if (cov_name == "ar1") cfg.cov = CovStructure::ar1;
            else if (cov_name == "block") cfg.cov = CovStructure::block;
            else throw ConfigError("unknown cov: " + cov_name);
        }
        if (!size_rule_name.empty()) {
            if (size_rule_name == "uniform") cfg.size_rule = SizeRule::uniform;
            else if (size_rule_name == "power") cfg.size_rule = SizeRule::power;
            else throw ConfigError("unknown size-rule: " + size_rule_name);
        }
        if (!local_rule_name.empty()) {
            if (local_rule_name == "proportional") cfg.local_rule = LocalAlphaRule::proportional;
            else if (local_rule_name == "global") cfg.local_rule = LocalAlphaRule::global;
            else throw ConfigError("unknown local-rule: " + local_rule_name);
        }

        if (!n_grid.empty()) {
            if (cfg.experiment == 3 || cfg.experiment == 5)
                throw ConfigError("--n-grid does not apply to experiment " +
                                  std::to_string(cfg.experiment));
            cfg.grid = parse_grid(n_grid);
        }
        if (!mu_grid.empty()) {
            if (cfg.experiment != 3) throw ConfigError("--mu-grid applies to experiment 3 only");
            cfg.grid = parse_grid(mu_grid);
        }
        if (!rho_grid.empty()) {
            if (cfg.experiment != 5) throw ConfigError("--rho-grid applies to experiment 5 only");
            cfg.grid = parse_grid(rho_grid);
        }

        cfg.validate();
        if (out_path.empty())
            out_path = "experiment" + std::to_string(cfg.experiment) + ".csv";
        return cmd_run(cfg, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
