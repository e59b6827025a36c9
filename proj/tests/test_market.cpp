#include "doctest.h"

#include <cmath>
#include <random>

#include "nashvar/errors.hpp"
#include "nashvar/market.hpp"
#include "nashvar/normal.hpp"
#include "oracles.hpp"

using namespace nashvar;

namespace {
const LognormalLaw kRefLaw(-0.045, 0.3); // mu=0.03, sigma=0.2, T=4
}

TEST_CASE("normal cdf/quantile identity") {
    for (int i = 1; i <= 99; ++i) {
        double p = i / 100.0;
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(0).scale(0).epsilon(1e-13));
    }
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(norm_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(norm_quantile(1.0), std::invalid_argument);
}

TEST_CASE("law_from_market reproduces the lognormal parameters") {
    MarketParams m(0.03, 0.2, 4.0);
    LognormalLaw law = law_from_market(m);
    CHECK(law.nu == doctest::Approx(-0.045).epsilon(1e-14));
    CHECK(law.tau * law.tau == doctest::Approx(0.09).epsilon(1e-14));

    MarketParams m2(0.06, 0.3, 1.0);
    LognormalLaw law2 = law_from_market(m2);
    CHECK(law2.nu == doctest::Approx(-0.02).epsilon(1e-13));
    CHECK(law2.tau * law2.tau == doctest::Approx(0.04).epsilon(1e-13));

    CHECK_THROWS_AS(law_from_market(MarketParams(0.0, 0.2, 4.0)), std::invalid_argument);
    CHECK_THROWS_AS(MarketParams({0.03, 0.02}, {0.2, 0.1, 0.2, 0.1}, 4.0),
                    std::invalid_argument); // singular volatility
}

TEST_CASE("multi-asset law uses the norm of the market price of risk") {
    // Diagonal volatility: theta = (mu1/s1, mu2/s2).
    MarketParams m({0.03, 0.04}, {0.2, 0.0, 0.0, 0.25}, 2.0);
    double t2 = (0.03 / 0.2) * (0.03 / 0.2) + (0.04 / 0.25) * (0.04 / 0.25);
    LognormalLaw law = law_from_market(m);
    CHECK(law.nu == doctest::Approx(-0.5 * t2 * 2.0).epsilon(1e-12));
    CHECK(law.tau == doctest::Approx(std::sqrt(t2 * 2.0)).epsilon(1e-12));
}

TEST_CASE("quantile matches the printed values") {
    CHECK(quantile(kRefLaw, 0.8) == doctest::Approx(1.2306).epsilon(5e-4));
    CHECK(quantile(kRefLaw, 0.5) == doctest::Approx(std::exp(-0.045)).epsilon(1e-14));
    CHECK(quantile(kRefLaw, 0.2) == doctest::Approx(0.7427).epsilon(5e-4));
    CHECK_THROWS_AS(quantile(kRefLaw, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(quantile(kRefLaw, 1.2), std::invalid_argument);

    for (int i = 1; i <= 99; ++i) {
        double p = i / 100.0;
        CHECK(cdf(kRefLaw, quantile(kRefLaw, p)) == doctest::Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("truncated power moments: closed form vs quadrature") {
    CHECK(truncated_power_moment(kRefLaw, 0.0, ZInterval(0.0, kInfinity)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // Z_T is a density process: E[Z_T] = 1.
    CHECK(truncated_power_moment(kRefLaw, 1.0, ZInterval(0.0, kInfinity)) ==
          doctest::Approx(1.0).epsilon(1e-13));

    double q = 1.0 - 1.0 / 0.7;
    double lo = 1.2306;
    double closed = truncated_power_moment(kRefLaw, q, ZInterval(lo, kInfinity));
    double quad = oracles::lognormal_expect(kRefLaw, [&](double z) { return std::pow(z, q); }, lo);
    CHECK(closed == doctest::Approx(quad).epsilon(0).scale(1).epsilon(1e-9));

    // Telescoping: moment over (0,a) + moment over (a,inf) = full moment.
    for (double a : {0.3, 0.7, 1.0, 1.4, 2.5}) {
        for (double qq : {-1.0, -0.42857142857142855, 0.5, 1.0, 2.0}) {
            double full = truncated_power_moment(kRefLaw, qq, ZInterval(0.0, kInfinity));
            double below = truncated_power_moment(kRefLaw, qq, ZInterval(0.0, a));
            double above = truncated_power_moment(kRefLaw, qq, ZInterval(a, kInfinity));
            CHECK(below + above == doctest::Approx(full).epsilon(1e-12));
        }
    }
}

TEST_CASE("truncated log moment vs quadrature") {
    for (double a : {0.0, 0.5, 1.1}) {
        for (double b : {0.9, 1.5, kInfinity}) {
            if (b <= a) continue;
            double closed = truncated_log_moment(kRefLaw, ZInterval(a, b));
            double quad = oracles::lognormal_expect(kRefLaw, [](double z) { return std::log(z); }, a, b);
            CHECK(closed == doctest::Approx(quad).epsilon(0).scale(1).epsilon(1e-10));
        }
    }
}

TEST_CASE("piecewise wealth: construction, evaluation, canonicalization") {
    PiecewiseWealth merton = PiecewiseWealth::single(2.0, -1.0);
    CHECK(merton(0.5) == doctest::Approx(4.0));
    CHECK(merton.cells().size() == 1);

    // Adjacent identical cells merge.
    PiecewiseWealth merged({WealthCell{0.0, 1.0, 2.0, -1.0}, WealthCell{1.0, kInfinity, 2.0, -1.0}});
    CHECK(merged.cells().size() == 1);

    PiecewiseWealth two({WealthCell{0.0, 1.0, 2.7, -1.0}, WealthCell{1.0, kInfinity, 1.8, -1.0}});
    CHECK(two.cells().size() == 2);
    CHECK(two(0.9) == doctest::Approx(3.0));
    CHECK(two(1.5) == doctest::Approx(1.2));

    CHECK_THROWS_AS(PiecewiseWealth({WealthCell{0.1, kInfinity, 1.0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseWealth({WealthCell{0.0, 2.0, 1.0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseWealth({WealthCell{0.0, 1.0, 1.0, -1.0},
                                     WealthCell{1.5, kInfinity, 1.0, -1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseWealth({WealthCell{0.0, kInfinity, -1.0, -1.0}}), std::invalid_argument);
}

TEST_CASE("price: closed form, linearity, Monte Carlo consistency") {
    // E[Z x0/Z] = x0.
    CHECK(price(kRefLaw, PiecewiseWealth::single(5.0, -1.0)) == doctest::Approx(5.0).epsilon(1e-13));

    // The family-case wealth of the poorer agent prices to x0_2 by construction.
    double z_alpha = quantile(kRefLaw, 0.2);
    double lambda2 = (2.0 - 0.2 * 0.9 * 3.0) / 0.8;
    PiecewiseWealth x2({WealthCell{0.0, z_alpha, 0.9 * 3.0, -1.0},
                        WealthCell{z_alpha, kInfinity, lambda2, -1.0}});
    CHECK(price(kRefLaw, x2) == doctest::Approx(2.0).epsilon(1e-12));

    // Linearity across disjoint supports.
    PiecewiseWealth w1({WealthCell{0.0, 1.0, 3.0, -1.0}, WealthCell{1.0, kInfinity, 1e-9, -1.0}});
    PiecewiseWealth w2({WealthCell{0.0, 1.0, 1e-9, -1.0}, WealthCell{1.0, kInfinity, 4.0, -0.5}});
    PiecewiseWealth w12({WealthCell{0.0, 1.0, 3.0, -1.0}, WealthCell{1.0, kInfinity, 4.0, -0.5}});
    CHECK(price(kRefLaw, w12) ==
          doctest::Approx(price(kRefLaw, w1) + price(kRefLaw, w2) -
                          price(kRefLaw, PiecewiseWealth::single(1e-9, -1.0)))
              .epsilon(1e-10));

    // Randomized wealths against seeded Monte Carlo, three standard errors.
    std::mt19937_64 gen(991);
    std::uniform_real_distribution<double> unif(0.2, 3.0);
    for (int rep = 0; rep < 5; ++rep) {
        double split = unif(gen);
        double c1 = unif(gen), c2 = unif(gen);
        double e1 = -1.0 / unif(gen), e2 = -1.0 / unif(gen);
        PiecewiseWealth w({WealthCell{0.0, split, c1, e1}, WealthCell{split, kInfinity, c2, e2}});
        auto mc = oracles::lognormal_mc(
            kRefLaw, [&](double z) { return z * w(z); }, 1000000, 7000 + rep);
        double exact = price(kRefLaw, w);
        CHECK(std::abs(exact - mc.mean) <= 3.0 * mc.std_error);
    }
}

TEST_CASE("expected utility: log and power closed forms") {
    // E ln(x0/Z) = ln x0 - nu.
    double eu = expected_utility(kRefLaw, PiecewiseWealth::single(3.0, -1.0), 1.0);
    CHECK(eu == doctest::Approx(std::log(3.0) + 0.045).epsilon(1e-13));

    // Power Merton wealth: quadrature oracle.
    double gamma = 0.7;
    double q = 1.0 - 1.0 / gamma;
    double eps_gamma = truncated_power_moment(kRefLaw, q, ZInterval(0.0, kInfinity));
    PiecewiseWealth merton = PiecewiseWealth::single(3.0 / eps_gamma, -1.0 / gamma, gamma);
    double closed = expected_utility(kRefLaw, merton, gamma);
    double quad = oracles::lognormal_expect(kRefLaw, [&](double z) {
        double x = merton(z);
        return std::pow(x, 1.0 - gamma) / (1.0 - gamma);
    });
    CHECK(closed == doctest::Approx(quad).epsilon(0).scale(1).epsilon(1e-9));

    // Log utility vs Monte Carlo for a two-cell wealth.
    PiecewiseWealth w({WealthCell{0.0, 0.9, 2.7, -1.0}, WealthCell{0.9, kInfinity, 1.6, -1.0}});
    auto mc = oracles::lognormal_mc(kRefLaw, [&](double z) { return std::log(w(z)); }, 1000000, 4242);
    CHECK(std::abs(expected_utility(kRefLaw, w, 1.0) - mc.mean) <= 3.0 * mc.std_error);

    CHECK_THROWS_AS(expected_utility(kRefLaw, w, 0.0), std::invalid_argument);
}

TEST_CASE("interval_upper_bound reproduces the figure bands") {
    CHECK(interval_upper_bound(kRefLaw, 0.1, 0.2) == doctest::Approx(0.7427).epsilon(5e-4));
    CHECK(interval_upper_bound(kRefLaw, 0.5, 0.2) == doctest::Approx(0.7547).epsilon(5e-4));
    CHECK(interval_upper_bound(kRefLaw, 0.8, 0.2) == doctest::Approx(0.9391).epsilon(5e-4));
    CHECK(interval_upper_bound(kRefLaw, 1.2, 0.2) == doctest::Approx(1.7274).epsilon(5e-4));

    // Measure identity over a sweep of (c1, alpha).
    for (double c1 : {0.0, 0.2, 0.7, 1.0, 1.5}) {
        for (double alpha : {0.05, 0.2, 0.5, 0.8}) {
            double room = 1.0 - cdf(kRefLaw, c1);
            if (alpha > room) {
                CHECK_THROWS_AS(interval_upper_bound(kRefLaw, c1, alpha), InfeasibleError);
                continue;
            }
            double c2 = interval_upper_bound(kRefLaw, c1, alpha);
            CHECK(cdf(kRefLaw, c2) - cdf(kRefLaw, c1) == doctest::Approx(alpha).epsilon(1e-10));
        }
    }

    CHECK_THROWS_AS(interval_upper_bound(kRefLaw, 1.8, 0.9), InfeasibleError);

    // When alpha exhausts the remaining mass exactly, the bound is +infinity.
    double c1 = quantile(kRefLaw, 0.8);
    double c2 = interval_upper_bound(kRefLaw, c1, 1.0 - cdf(kRefLaw, c1));
    CHECK(c2 == kInfinity);
}
