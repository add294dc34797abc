#include <doctest.h>

#include <cmath>

#include "distbh/errors.hpp"
#include "distbh/normal.hpp"
#include "distbh/oracle.hpp"
#include "fixture_io.hpp"

using namespace distbh;
using namespace distbh::testsupport;

namespace {

// Closed-form route for the uniform-interval mean model, via the
// antiderivative of Phi: int Phi(u) du = u Phi(u) + phi(u). Independent of
// the quadrature used by alternative_cdf.
double closed_form_alt_cdf(const AlternativeModel& alt, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double z = -norm_ppf(0.5 * t);
    const auto I = [](double u) { return u * norm_cdf(u) + norm_pdf(u); };
    if (alt.half_width == 0.0) return norm_cdf(alt.mu_base - z) + norm_cdf(-z - alt.mu_base);
    const double lo = alt.mu_base - alt.half_width, hi = alt.mu_base + alt.half_width;
    return ((I(hi - z) - I(lo - z)) + (I(-z - lo) - I(-z - hi))) / (hi - lo);
}

}  // namespace

TEST_CASE("alternative_cdf endpoints and worked value") {
    const AlternativeModel point{3.0, 0.0, false};
    CHECK(alternative_cdf(point, 0.0) == 0.0);
    CHECK(alternative_cdf(point, 1.0) == 1.0);
    // F(0.05) = Phi(-z_{0.025} + 3) + Phi(-z_{0.025} - 3)
    CHECK(alternative_cdf(point, 0.05) ==
          doctest::Approx(0.8508387683270562).epsilon(1e-10));
    CHECK_THROWS_AS(alternative_cdf(point, -0.1), InputError);
    CHECK_THROWS_AS(alternative_cdf(point, 1.1), InputError);
}

TEST_CASE("alternative_cdf is symmetric in the sign of mu") {
    // two-sided p-values depend on |mu| only, so mirroring the mean
    // distribution changes nothing; the symmetric flag must not matter
    const AlternativeModel sym{3.0, 0.5, true};
    const AlternativeModel onesided{3.0, 0.5, false};
    for (double t : {0.01, 0.05, 0.2, 0.5, 0.9})
        CHECK(alternative_cdf(sym, t) == doctest::Approx(alternative_cdf(onesided, t)));
}

TEST_CASE("alternative_cdf quadrature agrees with the closed form") {
    for (const auto& alt : {AlternativeModel{3.0, 0.5, true}, AlternativeModel{2.0, 0.5, true},
                            AlternativeModel{4.5, 0.25, false}, AlternativeModel{3.0, 0.0, false}}) {
        for (int i = 1; i <= 40; ++i) {
            const double t = static_cast<double>(i) / 40.0;
            CHECK(std::abs(alternative_cdf(alt, t) - closed_form_alt_cdf(alt, t)) <= 1e-10);
        }
    }
}

TEST_CASE("alternative_cdf is a nondecreasing CDF on a fine grid") {
    const AlternativeModel alt{3.0, 0.5, true};
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = static_cast<double>(i) / 1000.0;
        const double f = alternative_cdf(alt, t);
        CHECK(f >= prev - 1e-12);
        CHECK((f >= 0.0 && f <= 1.0));
        prev = f;
    }
}

TEST_CASE("fixture values match the implementation") {
    const auto fx = load_fixtures(DISTBH_FIXTURE_PATH);
    REQUIRE(!fx.f.empty());
    REQUIRE(!fx.tau.empty());

    for (const auto& rec : fx.f) {
        const AlternativeModel alt{rec.mu_base, rec.half_width, true};
        CHECK(alternative_cdf(alt, rec.t) == doctest::Approx(rec.value).epsilon(1e-9));
    }
    for (const auto& rec : fx.tau) {
        const MixtureSpec spec{rec.r0, AlternativeModel{rec.mu_base, rec.half_width, true}};
        // fixture resolution is half the brute-force grid step (1e-6)
        CHECK(std::abs(asymptotic_threshold(spec, rec.alpha) - rec.value) <= 1e-6);
    }
}

TEST_CASE("calibration_slope") {
    CHECK(calibration_slope(0.2, 0.0) == doctest::Approx(5.0));
    CHECK(calibration_slope(0.2, 0.8) == doctest::Approx(21.0));
    CHECK(calibration_slope(1.0, 0.3) == doctest::Approx(1.0));
    CHECK(calibration_slope(1.0, 0.99) == doctest::Approx(1.0));
    CHECK_THROWS_AS(calibration_slope(0.2, 1.0), InputError);
    CHECK_THROWS_AS(calibration_slope(0.0, 0.5), InputError);
}

TEST_CASE("asymptotic_threshold on the sqrt stub has the closed form root") {
    // F(t) = sqrt(t), slope 5: sup{t : sqrt(t) = 5t} = 1/25
    const auto sqrt_cdf = [](double t) { return std::sqrt(t); };
    CHECK(asymptotic_threshold(sqrt_cdf, 5.0) == doctest::Approx(0.04).epsilon(1e-7));

    // a line below slope*t everywhere: no positive crossing
    const auto weak = [](double t) { return 0.5 * t; };
    CHECK(asymptotic_threshold(weak, 2.0) == 0.0);

    // F == 1 instantly: supremum sits at the scan edge 1/slope
    const auto saturated = [](double) { return 1.0; };
    CHECK(asymptotic_threshold(saturated, 4.0) == doctest::Approx(0.25));
}

TEST_CASE("threshold satisfies the fixed-point equation") {
    for (double alpha : {0.05, 0.2, 0.5}) {
        for (double r0 : {0.0, 0.5, 0.8, 0.95}) {
            const MixtureSpec spec{r0, AlternativeModel{3.0, 0.5, true}};
            const double tau = asymptotic_threshold(spec, alpha);
            if (tau > 0.0) {
                const double slope = calibration_slope(alpha, r0);
                CHECK(std::abs(alternative_cdf(spec.alt, tau) - slope * tau) <= 1e-8);
            }
        }
    }
}

TEST_CASE("storey_limit") {
    SUBCASE("alternatives entirely below lambda give r0 exactly") {
        // mu = 8: F(0.5) is 1 to machine precision
        const MixtureSpec spec{0.8, AlternativeModel{8.0, 0.0, false}};
        CHECK(storey_limit(spec, 0.5) == doctest::Approx(0.8).epsilon(1e-9));
    }
    SUBCASE("worked value via alternative_cdf") {
        const MixtureSpec spec{0.5, AlternativeModel{3.0, 0.0, false}};
        const double f = alternative_cdf(spec.alt, 0.5);  // 0.99009681636281
        CHECK(storey_limit(spec, 0.5) ==
              doctest::Approx(0.5 + 0.5 * (1.0 - f) / 0.5).epsilon(1e-12));
    }
    CHECK_THROWS_AS(storey_limit(MixtureSpec{0.5, AlternativeModel{3, 0.5, true}}, 0.0),
                    InputError);
}

TEST_CASE("limit_fdr_power") {
    SUBCASE("no nulls: zero FDR in the limit") {
        NetworkMixtureSpec net;
        net.weights = {1.0};
        net.nodes = {MixtureSpec{0.0, AlternativeModel{3.0, 0.5, true}}};
        const auto lim = limit_fdr_power(net, 0.2);
        CHECK(lim.fdr == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(lim.power > 0.5);
    }
    SUBCASE("fdr limit collapses to alpha * r0* whenever tau* > 0") {
        // G(tau) = tau/alpha at the crossing, so r0 tau / G(tau) = alpha r0
        NetworkMixtureSpec net;
        net.weights = {0.3, 0.7};
        net.nodes = {MixtureSpec{0.6, AlternativeModel{3.0, 0.5, true}},
                     MixtureSpec{0.9, AlternativeModel{2.5, 0.5, true}}};
        const auto lim = limit_fdr_power(net, 0.2);
        const double r0_star = net.global_null_prop();
        REQUIRE(lim.threshold > 0.0);
        CHECK(lim.fdr == doctest::Approx(0.2 * r0_star).epsilon(1e-6));
        CHECK((lim.power > 0.0 && lim.power < 1.0));
    }
    SUBCASE("weights must sum to one") {
        NetworkMixtureSpec net;
        net.weights = {0.4, 0.4};
        net.nodes = {MixtureSpec{0.5, AlternativeModel{3, 0.5, true}},
                     MixtureSpec{0.5, AlternativeModel{3, 0.5, true}}};
        CHECK_THROWS_AS(limit_fdr_power(net, 0.2), InputError);
    }
}
