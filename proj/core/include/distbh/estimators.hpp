#pragma once

#include <cstddef>
#include <span>

namespace distbh {

struct StoreyConfig {
    double lambda = 0.5;  // in (0,1)
};

struct SpacingConfig {
    double l = 0.5;  // window exponent, > 0
};

/// Empirical CDF at t: #{p <= t} / m.
double empirical_cdf(std::span<const double> pvalues, double t);

/// Storey's null-proportion estimate min{(1 - G_m(lambda)) / (1 - lambda), 1}.
double storey_estimate(std::span<const double> pvalues, const StoreyConfig& cfg);

/// Order-statistic window r_m = max(1, floor(m^{4/5} * (ln m)^{-2l})).
std::size_t spacing_window(std::size_t m, double l);

/// Spacing null-proportion estimate min{2 r_m / (m V_m), 1}, where V_m is the
/// largest r_m-spacing P_(j+r_m) - P_(j-r_m) over r_m+1 <= j <= m-r_m.
/// Returns 1.0 (most conservative) when m < 2 r_m + 2 leaves no valid window.
double spacing_estimate(std::span<const double> pvalues, const SpacingConfig& cfg);

/// Estimator selection carried by node configs.
struct EstimatorConfig {
    enum class Kind { storey, spacing };
    Kind kind = Kind::storey;
    double lambda = 0.5;  // Storey
    double l = 0.5;       // spacing

    StoreyConfig storey() const { return {lambda}; }
    SpacingConfig spacing() const { return {l}; }
};

/// Dispatches to the configured estimator.
double estimate_null_proportion(std::span<const double> pvalues, const EstimatorConfig& cfg);

}  // namespace distbh
