#include "distbh/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "distbh/errors.hpp"
#include "distbh/protocol.hpp"

namespace distbh {

std::string_view method_name(Method m) {
    switch (m) {
        case Method::distributed: return "distributed";
        case Method::central: return "central";
        case Method::local_only: return "local_only";
    }
    return "unknown";
}

ExperimentConfig ExperimentConfig::defaults_for(int experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    switch (experiment) {
        case 1:
            cfg.grid = {1e2, 1e3, 1e4, 1e5};
            cfg.size_rule = SizeRule::uniform;
            break;
        case 2:
            cfg.grid = {1e2, 1e3, 1e4, 1e5, 1e6};
            cfg.size_rule = SizeRule::power;
            break;
        case 3:
            cfg.grid = {2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
            cfg.size_rule = SizeRule::power;
            cfg.n_fixed = 1e4;
            break;
        case 4:
            cfg.grid = {1e3, 1e4, 1e5, 1e6};
            cfg.size_rule = SizeRule::power;
            break;
        case 5:
            cfg.grid = {0.0, 0.2, 0.4, 0.6, 0.8};
            cfg.size_rule = SizeRule::power;
            cfg.n_fixed = 1e3;
            break;
        default:
            throw ConfigError("experiment must be 1..5");
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (experiment < 1 || experiment > 5) throw ConfigError("experiment must be 1..5");
    if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("alpha must be in (0,1]");
    if (nodes < 1 || nodes > 255) throw ConfigError("nodes must be in 1..255");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (grid.empty()) throw ConfigError("grid must be nonempty");
    if (!(r1_max >= 0.0) || r1_max > 1.0) throw ConfigError("r1_max must be in [0,1]");
    if (estimator.kind == EstimatorConfig::Kind::storey &&
        (!(estimator.lambda > 0.0) || !(estimator.lambda < 1.0)))
        throw ConfigError("lambda must be in (0,1)");
    if (estimator.kind == EstimatorConfig::Kind::spacing && !(estimator.l > 0.0))
        throw ConfigError("l must be positive");
    if (block_size < 1) throw ConfigError("block_size must be >= 1");
    for (double g : grid) {
        switch (experiment) {
            case 1:
            case 2:
            case 4:
                if (!(g >= 1.0)) throw ConfigError("n grid values must be >= 1");
                break;
            case 3:
                if (!(g > 0.5)) throw ConfigError("mu_base grid values must exceed 0.5");
                break;
            case 5:
                if (!(g >= 0.0) || !(g < 1.0)) throw ConfigError("rho grid values must be in [0,1)");
                break;
        }
    }
    if ((experiment == 3 || experiment == 5) && !(n_fixed >= 1.0))
        throw ConfigError("n must be >= 1");
    if (!(mu_base > 0.5)) throw ConfigError("mu_base must exceed 0.5");
}

std::string_view ExperimentConfig::grid_param() const {
    switch (experiment) {
        case 3: return "mu_base";
        case 5: return "rho";
        default: return "n";
    }
}

namespace {

struct NetworkPlan {
    std::vector<NodeGenSpec> specs;   // per node
    std::uint64_t m_total = 0;
    std::uint64_t m1_total = 0;
};

NetworkPlan build_plan(const ExperimentConfig& cfg, double grid_value) {
    const double n = (cfg.experiment == 3 || cfg.experiment == 5) ? cfg.n_fixed : grid_value;
    const auto sizes = node_sizes(n, cfg.nodes, cfg.size_rule);
    const SeedPolicy seeds{cfg.seed};

    NetworkPlan plan;
    plan.specs.resize(cfg.nodes);
    for (std::uint32_t i = 1; i <= cfg.nodes; ++i) {
        auto& spec = plan.specs[i - 1];
        spec.m = sizes[i - 1];

        double r1 = cfg.r1_max * static_cast<double>(i) / static_cast<double>(cfg.nodes);
        if (cfg.r1_random) {
            auto stream = seeds.stream(SeedPolicy::kConfigTrial, i);
            r1 = stream.uniform(0.0, cfg.r1_max);
        }
        spec.m1 = static_cast<std::uint64_t>(
            std::floor(r1 * static_cast<double>(spec.m)));

        spec.alt.half_width = 0.5;
        spec.alt.symmetric = true;
        spec.alt.mu_base = cfg.mu_base;
        if (cfg.experiment == 3) spec.alt.mu_base = grid_value;
        if (cfg.experiment == 4)
            spec.alt.mu_base = 2.0 + static_cast<double>(i) / static_cast<double>(cfg.nodes);

        if (cfg.experiment == 5) {
            if (cfg.cov == CovStructure::ar1)
                spec.dependence = Ar1{grid_value};
            else
                spec.dependence = EquiBlock{grid_value, cfg.block_size};
        }

        plan.m_total += spec.m;
        plan.m1_total += spec.m1;
    }
    return plan;
}

// Pooled BH count across sorted per-node arrays without materializing the
// pooled order: iterate k <- #{p <= alpha*k/m} from k = m downward; the
// sequence is strictly decreasing until it fixes at the BH count.
std::size_t pooled_bh_count(const std::vector<std::vector<double>>& sorted_nodes,
                            std::uint64_t m_total, double alpha) {
    if (m_total == 0) return 0;
    const double dm = static_cast<double>(m_total);
    const auto count_at = [&](double t) {
        std::size_t c = 0;
        for (const auto& node : sorted_nodes)
            c += static_cast<std::size_t>(
                std::upper_bound(node.begin(), node.end(), t) - node.begin());
        return c;
    };
    std::size_t k = static_cast<std::size_t>(m_total);
    for (;;) {
        const std::size_t next = count_at(alpha * static_cast<double>(k) / dm);
        if (next == k) return k;
        k = next;
        if (k == 0) return 0;
    }
}

void run_one_trial(const ExperimentConfig& cfg, const NetworkPlan& plan, int trial,
                   TrialOutcome& out) {
    const SeedPolicy seeds{cfg.seed};
    const std::uint32_t n_nodes = cfg.nodes;

    std::vector<NodeState> nodes(n_nodes);
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        nodes[i].node_id = i + 1;
        nodes[i].estimator = cfg.estimator;
        auto stream = seeds.stream(static_cast<std::uint64_t>(trial), i + 1);
        nodes[i].batch = gen_node_batch(plan.specs[i], stream);
    }

    std::vector<std::vector<double>> sorted(n_nodes);
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        sorted[i] = nodes[i].batch.pvalues;
        std::sort(sorted[i].begin(), sorted[i].end());
    }

    // -- distributed: one protocol round ------------------------------------
    InProcessTransport transport;
    const auto results =
        run_round(nodes, cfg.alpha, transport, static_cast<std::uint32_t>(trial));

    std::size_t dist_R = 0, dist_V = 0;
    AlphaSummary alpha_hat{0.0, 1.0, 0.0};
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        dist_R += results[i].rejected.size();
        for (std::uint32_t idx : results[i].rejected)
            if (nodes[i].batch.is_null[idx]) ++dist_V;
        alpha_hat.mean += nodes[i].alpha_local;
        alpha_hat.min = std::min(alpha_hat.min, nodes[i].alpha_local);
        alpha_hat.max = std::max(alpha_hat.max, nodes[i].alpha_local);
    }
    alpha_hat.mean /= static_cast<double>(n_nodes);
    out.alpha_hat = alpha_hat;

    // -- central: pooled BH threshold ----------------------------------------
    const std::size_t central_k = pooled_bh_count(sorted, plan.m_total, cfg.alpha);
    const double central_tau =
        central_k == 0 ? 0.0
                       : cfg.alpha * static_cast<double>(central_k) /
                             static_cast<double>(plan.m_total);

    // -- local_only: size-corrected BH, no communication ----------------------
    std::vector<double> local_tau(n_nodes, 0.0);
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        const std::uint64_t m_i = plan.specs[i].m;
        if (m_i == 0) continue;
        const double a_i = cfg.local_rule == LocalAlphaRule::proportional
                               ? cfg.alpha * static_cast<double>(m_i) /
                                     static_cast<double>(plan.m_total)
                               : cfg.alpha;
        const std::size_t k = bh_count_sorted(sorted[i], a_i);
        if (k > 0) local_tau[i] = a_i * static_cast<double>(k) / static_cast<double>(m_i);
    }

    // one labeled pass per node covers the two threshold-based methods
    std::size_t central_R = 0, central_V = 0, local_R = 0, local_V = 0;
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        const auto& pv = nodes[i].batch.pvalues;
        const auto& lab = nodes[i].batch.is_null;
        const double tc = central_tau, tl = local_tau[i];
        for (std::size_t j = 0; j < pv.size(); ++j) {
            const double p = pv[j];
            const bool isnull = lab[j] != 0;
            if (p <= tc) {
                ++central_R;
                central_V += isnull;
            }
            if (p <= tl) {
                ++local_R;
                local_V += isnull;
            }
        }
    }

    const auto finish = [&](std::size_t R, std::size_t V) {
        TrialMetrics tm;
        tm.rejections = R;
        tm.false_rejections = V;
        tm.fdp = static_cast<double>(V) / static_cast<double>(std::max<std::size_t>(R, 1));
        tm.tdp = static_cast<double>(R - V) /
                 static_cast<double>(std::max<std::uint64_t>(plan.m1_total, 1));
        return tm;
    };
    out.by_method[static_cast<int>(Method::distributed)] = finish(dist_R, dist_V);
    out.by_method[static_cast<int>(Method::central)] = finish(central_R, central_V);
    out.by_method[static_cast<int>(Method::local_only)] = finish(local_R, local_V);
}

void parallel_trials(int trials, unsigned threads, const std::function<void(int)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            try {
                for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) body(t);
            } catch (...) {
                const std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<TrialOutcome> run_grid_point(const ExperimentConfig& cfg, double grid_value) {
    cfg.validate();
    const NetworkPlan plan = build_plan(cfg, grid_value);
    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_trials(cfg.trials, cfg.threads,
                    [&](int t) { run_one_trial(cfg, plan, t, outcomes[t]); });
    return outcomes;
}

std::vector<MethodResult> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<MethodResult> results;
    results.reserve(cfg.grid.size() * kMethods.size());

    for (double grid_value : cfg.grid) {
        const auto outcomes = run_grid_point(cfg, grid_value);
        const double n_trials = static_cast<double>(outcomes.size());

        for (Method method : kMethods) {
            const int mi = static_cast<int>(method);
            double fdr = 0.0, power = 0.0;
            for (const auto& o : outcomes) {
                fdr += o.by_method[mi].fdp;
                power += o.by_method[mi].tdp;
            }
            fdr /= n_trials;
            power /= n_trials;

            double fdr_var = 0.0, power_var = 0.0;
            if (outcomes.size() > 1) {
                for (const auto& o : outcomes) {
                    fdr_var += (o.by_method[mi].fdp - fdr) * (o.by_method[mi].fdp - fdr);
                    power_var += (o.by_method[mi].tdp - power) * (o.by_method[mi].tdp - power);
                }
                fdr_var /= n_trials - 1.0;
                power_var /= n_trials - 1.0;
            }

            MethodResult r;
            r.experiment = cfg.experiment;
            r.method = method;
            r.grid_param = std::string(cfg.grid_param());
            r.grid_value = grid_value;
            r.fdr = fdr;
            r.fdr_se = std::sqrt(fdr_var / n_trials);
            r.power = power;
            r.power_se = std::sqrt(power_var / n_trials);
            r.trials = cfg.trials;
            r.seed = cfg.seed;
            if (method == Method::distributed) {
                AlphaSummary agg{0.0, 1.0, 0.0};
                for (const auto& o : outcomes) {
                    agg.mean += o.alpha_hat.mean;
                    agg.min = std::min(agg.min, o.alpha_hat.min);
                    agg.max = std::max(agg.max, o.alpha_hat.max);
                }
                agg.mean /= n_trials;
                r.alpha_hat = agg;
            }
            results.push_back(std::move(r));
        }
    }
    return results;
}

void emit_csv(std::span<const MethodResult> results, const std::filesystem::path& path) {
    if (results.empty()) throw InputError("emit_csv: no results");

    std::vector<const MethodResult*> rows;
    rows.reserve(results.size());
    for (const auto& r : results) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const MethodResult* a, const MethodResult* b) {
        if (a->experiment != b->experiment) return a->experiment < b->experiment;
        if (a->method != b->method) return static_cast<int>(a->method) < static_cast<int>(b->method);
        return a->grid_value < b->grid_value;
    });

    std::ofstream out(path, std::ios::binary);  // binary: byte-identical reruns
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path.string());

    out << "experiment,method,grid_param,grid_value,fdr,fdr_se,power,power_se,trials,seed\n";
    char line[256];
    for (const MethodResult* r : rows) {
        std::snprintf(line, sizeof(line), "%d,%s,%s,%.12g,%.6f,%.6f,%.6f,%.6f,%d,%" PRIu64 "\n",
                      r->experiment, std::string(method_name(r->method)).c_str(),
                      r->grid_param.c_str(), r->grid_value, r->fdr, r->fdr_se, r->power,
                      r->power_se, r->trials, r->seed);
        out << line;
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path.string());
}

namespace {

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": " + v);
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": " + v);
}

}  // namespace

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "experiment") base.experiment = static_cast<int>(parse_double(value, key));
        else if (key == "alpha") base.alpha = parse_double(value, key);
        else if (key == "nodes") base.nodes = static_cast<std::uint32_t>(parse_double(value, key));
        else if (key == "trials") base.trials = static_cast<int>(parse_double(value, key));
        else if (key == "grid") {
            base.grid.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                base.grid.push_back(parse_double(trim(item), key));
        } else if (key == "estimator") {
            if (value == "storey") base.estimator.kind = EstimatorConfig::Kind::storey;
            else if (value == "spacing") base.estimator.kind = EstimatorConfig::Kind::spacing;
            else throw ConfigError("config: unknown estimator " + value);
        } else if (key == "lambda") base.estimator.lambda = parse_double(value, key);
        else if (key == "l") base.estimator.l = parse_double(value, key);
        else if (key == "size_rule") {
            if (value == "uniform") base.size_rule = SizeRule::uniform;
            else if (value == "power") base.size_rule = SizeRule::power;
            else throw ConfigError("config: unknown size_rule " + value);
        } else if (key == "r1_max") base.r1_max = parse_double(value, key);
        else if (key == "r1_random") base.r1_random = parse_bool(value, key);
        else if (key == "mu_base") base.mu_base = parse_double(value, key);
        else if (key == "n") base.n_fixed = parse_double(value, key);
        else if (key == "cov") {
            if (value == "ar1") base.cov = CovStructure::ar1;
            else if (value == "block") base.cov = CovStructure::block;
            else throw ConfigError("config: unknown cov " + value);
        } else if (key == "block_size")
            base.block_size = static_cast<std::size_t>(parse_double(value, key));
        else if (key == "local_rule") {
            if (value == "proportional") base.local_rule = LocalAlphaRule::proportional;
            else if (value == "global") base.local_rule = LocalAlphaRule::global;
            else throw ConfigError("config: unknown local_rule " + value);
        } else if (key == "threads")
            base.threads = static_cast<unsigned>(parse_double(value, key));
        else if (key == "seed") {
            try {
                std::size_t pos = 0;
                base.seed = std::stoull(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ConfigError("config: bad seed value: " + value);
            }
        } else
            throw ConfigError("config: unknown key " + key);
    }
    return base;
}

}  // namespace distbh
