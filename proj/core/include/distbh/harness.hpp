#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distbh/datagen.hpp"
#include "distbh/estimators.hpp"
#include "distbh/rng.hpp"
#include "distbh/testing.hpp"

namespace distbh {

/// The three procedures compared at every grid point.
enum class Method : int {
    distributed = 0,  // one-shot proportion aggregation, calibrated local BH
    central = 1,      // pooled BH over every p-value in the network
    local_only = 2,   // no communication, size-corrected local BH
};
inline constexpr std::array<Method, 3> kMethods = {Method::distributed, Method::central,
                                                   Method::local_only};
std::string_view method_name(Method m);

enum class CovStructure { ar1, block };

/// Test size of the no-communication baseline.
enum class LocalAlphaRule {
    proportional,  // alpha_i = alpha * m_i / m
    global,        // alpha_i = alpha
};

struct ExperimentConfig {
    int experiment = 1;  // 1..5
    double alpha = 0.2;
    std::uint32_t nodes = 50;
    int trials = 200;

    /// Swept parameter: n for experiments 1/2/4, mu_base for 3, rho for 5.
    std::vector<double> grid;

    EstimatorConfig estimator;
    SizeRule size_rule = SizeRule::uniform;

    double r1_max = 0.3;     // r1_i = r1_max * i / N
    bool r1_random = false;  // draw r1_i ~ Unif[0, r1_max] once per run instead
    double mu_base = 3.0;    // fixed mean scale (experiments 1, 2, 5)
    double n_fixed = 1e4;    // node-size scale for experiments 3 and 5

    CovStructure cov = CovStructure::ar1;  // experiment 5
    std::size_t block_size = 20;

    LocalAlphaRule local_rule = LocalAlphaRule::proportional;
    unsigned threads = 0;  // trial workers; 0 = hardware concurrency
    std::uint64_t seed = 0;

    static ExperimentConfig defaults_for(int experiment);
    void validate() const;
    std::string_view grid_param() const;
};

struct AlphaSummary {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Network-level metrics of one trial, one entry per Method.
struct TrialOutcome {
    std::array<TrialMetrics, 3> by_method;
    AlphaSummary alpha_hat;  // calibrated sizes seen in the distributed round
};

struct MethodResult {
    int experiment = 0;
    Method method = Method::distributed;
    std::string grid_param;
    double grid_value = 0.0;
    double fdr = 0.0;
    double fdr_se = 0.0;
    double power = 0.0;
    double power_se = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    AlphaSummary alpha_hat;  // distributed rows only
};

/// All trials of one grid point; deterministic in (config, grid_value)
/// regardless of the worker-thread count.
std::vector<TrialOutcome> run_grid_point(const ExperimentConfig& cfg, double grid_value);

/// Full sweep: every grid point, every method, aggregated over trials.
std::vector<MethodResult> run_experiment(const ExperimentConfig& cfg);

/// CSV with header experiment,method,grid_param,grid_value,fdr,fdr_se,power,
/// power_se,trials,seed; rows ordered by method then ascending grid value.
/// Refuses empty input; same results produce byte-identical files.
void emit_csv(std::span<const MethodResult> results, const std::filesystem::path& path);

/// Flat key = value config file ('#' comments). Values overlay `base`;
/// unknown keys are ConfigErrors.
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base);

}  // namespace distbh
