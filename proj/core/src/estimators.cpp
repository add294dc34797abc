#include "distbh/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "distbh/errors.hpp"

namespace distbh {

double empirical_cdf(std::span<const double> pvalues, double t) {
    if (pvalues.empty()) throw InputError("empirical_cdf: empty input");
    if (!(t >= 0.0) || t > 1.0) throw InputError("empirical_cdf: t outside [0,1]");
    std::size_t count = 0;
    for (double p : pvalues)
        if (p <= t) ++count;
    return static_cast<double>(count) / static_cast<double>(pvalues.size());
}

double storey_estimate(std::span<const double> pvalues, const StoreyConfig& cfg) {
    if (!(cfg.lambda > 0.0) || !(cfg.lambda < 1.0))
        throw ConfigError("storey_estimate: lambda must be in (0,1)");
    if (pvalues.empty()) throw InputError("storey_estimate: empty input");
    const double g = empirical_cdf(pvalues, cfg.lambda);
    return std::min((1.0 - g) / (1.0 - cfg.lambda), 1.0);
}

std::size_t spacing_window(std::size_t m, double l) {
    if (!(l > 0.0)) throw ConfigError("spacing_window: l must be positive");
    if (m < 2) return 1;
    const double dm = static_cast<double>(m);
    const double raw = std::pow(dm, 0.8) * std::pow(std::log(dm), -2.0 * l);
    const double floored = std::floor(raw);
    if (floored < 1.0) return 1;
    return static_cast<std::size_t>(floored);
}

double spacing_estimate(std::span<const double> pvalues, const SpacingConfig& cfg) {
    if (pvalues.empty()) throw InputError("spacing_estimate: empty input");
    const std::size_t m = pvalues.size();
    const std::size_t rm = spacing_window(m, cfg.l);
    if (m < 2 * rm + 2) return 1.0;  // no valid window, most conservative value

    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::sort(sorted.begin(), sorted.end());

    // V_m = max over r_m+1 <= j <= m-r_m of P_(j+r_m) - P_(j-r_m), 1-indexed.
    double vmax = 0.0;
    for (std::size_t j = rm + 1; j <= m - rm; ++j) {
        const double spacing = sorted[j + rm - 1] - sorted[j - rm - 1];
        if (spacing > vmax) vmax = spacing;
    }
    if (!(vmax > 0.0)) return 1.0;  // all mass at one point

    return std::min(2.0 * static_cast<double>(rm) /
                        (static_cast<double>(m) * vmax),
                    1.0);
}

double estimate_null_proportion(std::span<const double> pvalues, const EstimatorConfig& cfg) {
    switch (cfg.kind) {
        case EstimatorConfig::Kind::storey:
            return storey_estimate(pvalues, cfg.storey());
        case EstimatorConfig::Kind::spacing:
            return spacing_estimate(pvalues, cfg.spacing());
    }
    throw ConfigError("estimate_null_proportion: unknown estimator kind");
}

}  // namespace distbh
