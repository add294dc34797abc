#include "distbh/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "distbh/errors.hpp"
#include "distbh/normal.hpp"

namespace distbh {

namespace {

// Adaptive Simpson on [a,b]; fa/fm/fb are f(a), f(midpoint), f(b).
double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double lm = 0.5 * (a + mid), rm = 0.5 * (mid + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_step(f, a, mid, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, mid, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

void MixtureSpec::validate() const {
    if (!(r0 >= 0.0) || !(r0 < 1.0)) throw InputError("MixtureSpec: r0 outside [0,1)");
    alt.validate();
}

void NetworkMixtureSpec::validate() const {
    if (weights.size() != nodes.size() || weights.empty())
        throw InputError("NetworkMixtureSpec: weights/nodes mismatch");
    double sum = 0.0;
    for (double q : weights) {
        if (!(q >= 0.0)) throw InputError("NetworkMixtureSpec: negative weight");
        sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InputError("NetworkMixtureSpec: weights must sum to 1");
    for (const auto& node : nodes) node.validate();
}

double NetworkMixtureSpec::global_null_prop() const {
    double r0 = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) r0 += weights[i] * nodes[i].r0;
    return r0;
}

double alternative_cdf(const AlternativeModel& alt, double t) {
    if (!(t >= 0.0) || t > 1.0) throw InputError("alternative_cdf: t outside [0,1]");
    alt.validate();
    if (t == 0.0) return 0.0;
    if (t == 1.0) return 1.0;

    // z_{t/2} = Phi^-1(1 - t/2), evaluated on the lower tail for accuracy.
    const double z = -norm_ppf(0.5 * t);
    const auto integrand = [z](double mu) {
        return norm_cdf(mu - z) + norm_cdf(-z - mu);
    };

    // The integrand is even in mu, so the mirrored interval contributes the
    // same mean; only the positive interval is integrated.
    if (alt.half_width == 0.0) return integrand(alt.mu_base);
    const double lo = alt.mu_base - alt.half_width;
    const double hi = alt.mu_base + alt.half_width;
    return integrate(integrand, lo, hi, 1e-12) / (hi - lo);
}

double calibration_slope(double alpha, double r0) {
    if (!(alpha > 0.0) || alpha > 1.0) throw InputError("calibration_slope: alpha outside (0,1]");
    if (!(r0 >= 0.0) || !(r0 < 1.0)) throw InputError("calibration_slope: r0 outside [0,1)");
    return (1.0 / alpha - r0) / (1.0 - r0);
}

double mixture_cdf(const MixtureSpec& spec, double t) {
    spec.validate();
    return spec.r0 * t + (1.0 - spec.r0) * alternative_cdf(spec.alt, t);
}

double asymptotic_threshold(const std::function<double(double)>& alt_cdf, double slope) {
    if (!(slope >= 1.0)) throw InputError("asymptotic_threshold: slope must be >= 1");
    constexpr double kStep = 1e-4;
    constexpr double kTol = 1e-10;

    const double upper = 1.0 / slope;  // crossings of F(t) = slope*t live in (0, 1/slope]
    const auto h = [&](double t) { return alt_cdf(t) - slope * t; };

    double hi = upper;
    double h_hi = h(hi);
    if (h_hi >= 0.0) return upper;  // F(1/slope) = 1: supremum at the edge

    for (double t = upper - kStep; t > 0.0; t -= kStep) {
        const double ht = h(t);
        if (ht >= 0.0) {
            // crossing inside [t, hi]: bisect, keeping h(lo) >= 0 > h(hi)
            double lo = t;
            while (hi - lo > kTol) {
                const double mid = 0.5 * (lo + hi);
                if (h(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        hi = t;
    }
    return 0.0;  // F stays below slope*t on the whole range
}

double asymptotic_threshold(const MixtureSpec& spec, double alpha) {
    spec.validate();
    const double slope = calibration_slope(alpha, spec.r0);
    return asymptotic_threshold(
        [&spec](double t) { return alternative_cdf(spec.alt, t); }, slope);
}

LimitPerformance limit_fdr_power(const NetworkMixtureSpec& spec, double alpha) {
    spec.validate();
    const double r0_star = spec.global_null_prop();
    if (!(r0_star < 1.0)) throw InputError("limit_fdr_power: r0* must be < 1");

    // Effective global alternative CDF: the q-weighted mix of per-node
    // alternative mass, renormalized by 1 - r0*.
    const auto f_star = [&spec, r0_star](double t) {
        double mass = 0.0;
        for (std::size_t i = 0; i < spec.nodes.size(); ++i)
            mass += spec.weights[i] * (1.0 - spec.nodes[i].r0) *
                    alternative_cdf(spec.nodes[i].alt, t);
        return mass / (1.0 - r0_star);
    };

    const double slope = calibration_slope(alpha, r0_star);
    const double tau = asymptotic_threshold(f_star, slope);

    LimitPerformance out;
    if (tau <= 0.0) return out;
    out.threshold = tau;
    const double f_at_tau = f_star(tau);
    const double g_at_tau = r0_star * tau + (1.0 - r0_star) * f_at_tau;
    out.fdr = r0_star * tau / g_at_tau;
    out.power = f_at_tau;
    return out;
}

double storey_limit(const MixtureSpec& spec, double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw InputError("storey_limit: lambda outside (0,1)");
    const double g = mixture_cdf(spec, lambda);
    return std::clamp((1.0 - g) / (1.0 - lambda), 0.0, 1.0);
}

}  // namespace distbh
