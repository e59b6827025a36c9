#include "nashvar/two_agent_log.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "nashvar/errors.hpp"

namespace nashvar {

namespace {

void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << name << " = " << v << " must lie in [0,1]";
        throw std::invalid_argument(msg.str());
    }
}

// P(X2 >= beta1 X1) for two wealths with exponent -1 everywhere: compare
// coefficients on the common cell partition.
double beat_probability(const LognormalLaw& law, const PiecewiseWealth& w2,
                        double beta1_x01) {
    double p = 0.0;
    for (const auto& c : w2.cells()) {
        if (c.coeff >= beta1_x01 * (1.0 - 1e-14)) {
            p += cdf(law, c.z_hi) - cdf(law, c.z_lo);
        }
    }
    return p;
}

} // namespace

GameSpec2::GameSpec2(double x01_, double x02_, double alpha1_, double alpha2_,
                     double beta1_, double beta2_, double gamma_)
    : x01(x01_), x02(x02_), alpha1(alpha1_), alpha2(alpha2_),
      beta1(beta1_), beta2(beta2_), gamma(gamma_) {
    if (!(x01 > 0.0) || !(x02 > 0.0)) throw std::invalid_argument("GameSpec2: initial capital must be positive");
    check_unit_interval(alpha1, "alpha1");
    check_unit_interval(alpha2, "alpha2");
    check_unit_interval(beta1, "beta1");
    check_unit_interval(beta2, "beta2");
    if (!(gamma > 0.0)) throw std::invalid_argument("GameSpec2: gamma must be positive");
    if (x02 > x01) {
        std::swap(x01, x02);
        std::swap(alpha1, alpha2);
        std::swap(beta1, beta2);
        relabeled = true;
    }
}

EquilibriumResult2 solve_log2(const GameSpec2& g, const LognormalLaw& law,
                              const std::optional<ZInterval>& a2_choice) {
    if (g.gamma != 1.0) {
        throw std::invalid_argument("solve_log2: logarithmic game requires gamma = 1");
    }
    EquilibriumResult2 res;
    res.diagnostics.relabeled = g.relabeled;

    const double gate = g.alpha2 * g.beta1 * g.x01;
    if (g.x02 < gate) {
        res.case_tag = Log2Case::NoEquilibrium;
        std::ostringstream note;
        note << "x0_2 = " << g.x02 << " < alpha2 beta1 x0_1 = " << gate;
        res.diagnostics.note = note.str();
        return res;
    }

    auto finish = [&](double beat_target) {
        res.diagnostics.budget_residual1 = price(law, *res.wealth1) - g.x01;
        res.diagnostics.budget_residual2 = price(law, *res.wealth2) - g.x02;
        res.diagnostics.probability_residual =
            beat_probability(law, *res.wealth2, g.beta1 * g.x01) - beat_target;
    };

    // Case (a): strict mutual dominance forces identical wealths.
    if (g.alpha1 == 1.0 && g.alpha2 == 1.0 && g.beta1 == 1.0 && g.beta2 == 1.0) {
        if (std::abs(g.x01 - g.x02) > 1e-12 * std::max(g.x01, g.x02)) {
            res.case_tag = Log2Case::NoEquilibrium;
            res.diagnostics.note = "all alphas and betas equal 1 but capitals differ";
            return res;
        }
        res.case_tag = Log2Case::DegenerateFamily;
        res.wealth1 = PiecewiseWealth::single(g.x01, -1.0);
        res.wealth2 = PiecewiseWealth::single(g.x01, -1.0);
        res.diagnostics.note = "family (X, X); canonical representative X = x0_1/Z";
        finish(1.0);
        return res;
    }

    // Case (b): alpha2 = 1 (and alpha1 beta1 beta2 < 1, which holds whenever we
    // are not in case (a)). The gate above already enforced x0_2 >= beta1 x0_1.
    if (g.alpha2 == 1.0) {
        res.case_tag = Log2Case::Unique;
        res.wealth1 = PiecewiseWealth::single(g.x01, -1.0);
        res.wealth2 = PiecewiseWealth::single(g.x02, -1.0);
        res.diagnostics.beta_product_one_branch = (g.beta1 * g.beta2 == 1.0);
        finish(1.0);
        return res;
    }

    // Case (c): alpha2 < 1.
    res.diagnostics.beta_product_one_branch = (g.beta1 * g.beta2 == 1.0);
    if (g.x02 >= g.beta1 * g.x01) {
        res.case_tag = Log2Case::Unique;
        res.wealth1 = PiecewiseWealth::single(g.x01, -1.0);
        res.wealth2 = PiecewiseWealth::single(g.x02, -1.0);
        finish(1.0);
        return res;
    }

    const double lambda2 = (g.x02 - g.alpha2 * g.beta1 * g.x01) / (1.0 - g.alpha2);
    if (!(lambda2 > 0.0)) {
        res.case_tag = Log2Case::NoEquilibrium;
        res.diagnostics.boundary_lambda_zero = true;
        res.diagnostics.note =
            "x0_2 = alpha2 beta1 x0_1 exactly; lambda2 = 0 gives zero wealth off A2";
        return res;
    }

    res.case_tag = Log2Case::FamilyFreeSet;
    res.lambda2 = lambda2;
    res.wealth1 = PiecewiseWealth::single(g.x01, -1.0);
    const double band_coeff = g.beta1 * g.x01;

    if (g.alpha2 == 0.0) {
        if (a2_choice) throw std::invalid_argument("solve_log2: a2_choice must have probability 0");
        res.wealth2 = PiecewiseWealth::single(lambda2, -1.0); // lambda2 = x0_2 here
        finish(0.0);
        return res;
    }

    ZInterval a2 = a2_choice ? *a2_choice : ZInterval(0.0, quantile(law, g.alpha2));
    if (a2_choice) {
        double prob = cdf(law, a2.hi) - cdf(law, a2.lo);
        if (std::abs(prob - g.alpha2) > 1e-10) {
            std::ostringstream msg;
            msg << "solve_log2: a2_choice has probability " << prob << " but alpha2 = " << g.alpha2;
            throw std::invalid_argument(msg.str());
        }
    }
    res.free_set = a2;

    std::vector<WealthCell> cells;
    if (a2.lo > 0.0) cells.push_back(WealthCell{0.0, a2.lo, lambda2, -1.0});
    cells.push_back(WealthCell{a2.lo, a2.hi, band_coeff, -1.0});
    if (!a2.unbounded()) cells.push_back(WealthCell{a2.hi, kInfinity, lambda2, -1.0});
    res.wealth2 = PiecewiseWealth(std::move(cells));
    finish(g.alpha2);
    return res;
}

BenchmarkSolution solve_benchmark(double x0, double beta, double alpha, const MarketParams& m) {
    if (m.num_assets != 1) throw std::invalid_argument("solve_benchmark: one-stock market required");
    if (!(x0 > 0.0)) throw std::invalid_argument("solve_benchmark: x0 must be positive");
    check_unit_interval(beta, "beta");
    check_unit_interval(alpha, "alpha");

    const double mu = m.drift[0];
    const double sigma = m.volatility[0];
    const double T = m.horizon;
    if (std::abs(mu - sigma * sigma) <= 1e-9 * std::max(std::abs(mu), sigma * sigma)) {
        throw std::invalid_argument(
            "solve_benchmark: mu = sigma^2 makes the benchmark exponent singular");
    }
    const LognormalLaw law = law_from_market(m);

    auto merton = [&](double lam) {
        return BenchmarkSolution{PiecewiseWealth::single(lam, -1.0), lam, 0.0, false, std::nullopt};
    };
    if (beta == 0.0 || alpha == 0.0) return merton(x0);

    // beta S_T = c_b z^{p}; Ytilde = beta S_T Z_T = c_b z^{e}, e = 1 + p.
    const double payoff_exp = -sigma * sigma / mu;
    const double e_y = 1.0 + payoff_exp;
    const double c_b = beta * std::exp(0.5 * (mu - sigma * sigma) * T);
    const bool increasing = e_y > 0.0;

    // kappa(lambda): the z with Ytilde(z) = lambda.
    auto kappa = [&](double lam) { return std::pow(lam / c_b, 1.0 / e_y); };

    double lambda_alpha;
    ZInterval beat_region(0.0, kInfinity);
    if (alpha == 1.0) {
        lambda_alpha = kInfinity;
    } else {
        double zstar = quantile(law, increasing ? alpha : 1.0 - alpha);
        lambda_alpha = c_b * std::pow(zstar, e_y);
        beat_region = increasing ? ZInterval(0.0, zstar) : ZInterval(zstar, kInfinity);
    }

    if (x0 >= lambda_alpha) return merton(x0);

    // The region where the wealth is pinned to beta S_T: inside the beat region
    // where Ytilde exceeds lambda.
    auto band_for = [&](double lam) -> std::optional<ZInterval> {
        double k = kappa(lam);
        double lo, hi;
        if (increasing) {
            lo = std::clamp(k, beat_region.lo, beat_region.hi);
            hi = beat_region.hi;
        } else {
            lo = beat_region.lo;
            hi = std::clamp(k, beat_region.lo, beat_region.hi);
        }
        if (!(hi > lo * (1.0 + 1e-15)) || !(hi > lo)) return std::nullopt;
        return ZInterval(lo, hi);
    };

    auto budget = [&](double lam) {
        auto band = band_for(lam);
        if (!band) return lam;
        double band_price = c_b * truncated_power_moment(law, e_y, *band);
        double band_mass = cdf(law, band->hi) - cdf(law, band->lo);
        return lam * (1.0 - band_mass) + band_price;
    };

    const double min_budget = c_b * truncated_power_moment(law, e_y, beat_region);
    if (x0 <= min_budget) {
        std::ostringstream msg;
        msg << "solve_benchmark: budget " << x0
            << " cannot fund the benchmark on the cheapest alpha-band; minimal feasible budget is "
            << min_budget;
        throw InfeasibleError(msg.str());
    }

    double lo = 0.0;
    double hi = std::isfinite(lambda_alpha) ? lambda_alpha : std::max(x0, 1.0);
    while (budget(hi) < x0) hi *= 2.0; // only reachable when alpha = 1
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (budget(mid) < x0) lo = mid; else hi = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    auto band = band_for(lambda);
    if (!band) return merton(x0);

    std::vector<WealthCell> cells;
    if (band->lo > 0.0) cells.push_back(WealthCell{0.0, band->lo, lambda, -1.0});
    cells.push_back(WealthCell{band->lo, band->hi, c_b, payoff_exp});
    if (!band->unbounded()) cells.push_back(WealthCell{band->hi, kInfinity, lambda, -1.0});

    BenchmarkSolution sol{PiecewiseWealth(std::move(cells)), lambda, lambda_alpha, true, band};
    return sol;
}

} // namespace nashvar
