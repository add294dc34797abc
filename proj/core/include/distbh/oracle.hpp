#pragma once

#include <functional>
#include <vector>

#include "distbh/datagen.hpp"

namespace distbh {

/// One population: null proportion plus the alternative's mean distribution.
struct MixtureSpec {
    double r0 = 0.5;  // in [0,1)
    AlternativeModel alt;

    void validate() const;
};

/// Network of populations with sampling weights q_i (summing to 1).
struct NetworkMixtureSpec {
    std::vector<double> weights;
    std::vector<MixtureSpec> nodes;

    void validate() const;
    double global_null_prop() const;  // r0* = sum q_i r0_i
};

/// F(t): CDF of the two-sided p-value under H1,
/// E_mu[Phi(-z_{t/2} + mu) + Phi(-z_{t/2} - mu)], averaged over the model's
/// uniform mu-interval by adaptive quadrature (absolute error <= 1e-10).
double alternative_cdf(const AlternativeModel& alt, double t);

/// beta(alpha; r0) = ((1/alpha) - r0) / (1 - r0); >= 1 for alpha <= 1.
double calibration_slope(double alpha, double r0);

/// G(t; r0) = r0 t + (1 - r0) F(t).
double mixture_cdf(const MixtureSpec& spec, double t);

/// sup{t in (0, 1/slope] : F(t) = slope * t}, located by a descending grid
/// scan (step 1e-4) plus bisection to 1e-10; 0 when no positive crossing
/// exists. The scan runs downward because multiple crossings can exist and
/// the supremum is wanted.
double asymptotic_threshold(const std::function<double(double)>& alt_cdf, double slope);
double asymptotic_threshold(const MixtureSpec& spec, double alpha);

struct LimitPerformance {
    double fdr = 0.0;
    double power = 0.0;
    double threshold = 0.0;  // network tau*
};

/// Almost-sure limits of network FDP/TDP when every node rejects at the
/// globally calibrated threshold: fdr = r0* tau* / G(tau*; r0*),
/// power = F*(tau*), with F* the weight-mixed alternative CDF.
/// Returns zeros when tau* = 0.
LimitPerformance limit_fdr_power(const NetworkMixtureSpec& spec, double alpha);

/// Almost-sure limit of Storey's estimator: (1 - G(lambda; r0)) / (1 - lambda),
/// clamped to [0,1].
double storey_limit(const MixtureSpec& spec, double lambda);

}  // namespace distbh
