#pragma once

#include <limits>
#include <vector>

namespace nashvar {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Half-open z-interval (lo, hi], lo >= 0, hi may be +infinity.
struct ZInterval {
    double lo = 0.0;
    double hi = kInfinity;

    ZInterval() = default;
    ZInterval(double lo_, double hi_);

    bool unbounded() const { return hi == kInfinity; }
    bool contains(double z) const { return z > lo && z <= hi; }
};

// Black-Scholes primitives with zero interest rate: d stocks, drift mu (per year),
// regular volatility matrix sigma (row-major d x d, per sqrt-year), horizon T.
struct MarketParams {
    std::vector<double> drift;
    std::vector<double> volatility; // row-major d x d
    int num_assets = 0;
    double horizon = 0.0;

    MarketParams(std::vector<double> mu, std::vector<double> sigma, double T);
    MarketParams(double mu, double sigma, double T)
        : MarketParams(std::vector<double>{mu}, std::vector<double>{sigma}, T) {}

    // Market price of risk theta = sigma^{-1} mu.
    const std::vector<double>& theta() const { return theta_; }
    double theta_norm() const { return theta_norm_; }

    // (sigma sigma^T)^{-1} mu, the direction of every replicating amount vector.
    const std::vector<double>& merton_direction() const { return merton_dir_; }

private:
    std::vector<double> theta_;
    std::vector<double> merton_dir_;
    double theta_norm_ = 0.0;
};

// Law of the state price density Z_T: ln Z_T ~ N(nu, tau^2) with tau > 0.
struct LognormalLaw {
    double nu;
    double tau;

    LognormalLaw(double nu_, double tau_);
};

struct WealthCell {
    double z_lo;
    double z_hi; // +infinity allowed on the last cell only
    double coeff;
    double exponent;
};

// Terminal wealth of the form coeff * z^exponent on each cell of a partition of
// (0, inf). All equilibria produced here are of this shape. Adjacent cells with
// equal (coeff, exponent) are merged on construction (relative tolerance 1e-12).
class PiecewiseWealth {
public:
    PiecewiseWealth(std::vector<WealthCell> cells, double gamma = 1.0);

    // Single-cell wealth coeff * z^exponent on all of (0, inf).
    static PiecewiseWealth single(double coeff, double exponent, double gamma = 1.0);

    double operator()(double z) const; // evaluate at z > 0
    const std::vector<WealthCell>& cells() const { return cells_; }
    double gamma() const { return gamma_; }

private:
    std::vector<WealthCell> cells_;
    double gamma_;
};

// ---- operations on the law ----

LognormalLaw law_from_market(const MarketParams& m);

double cdf(const LognormalLaw& law, double z);
double quantile(const LognormalLaw& law, double p);

// E[Z^q 1{lo < Z < hi}] in closed form.
double truncated_power_moment(const LognormalLaw& law, double q, const ZInterval& interval);

// E[ln(Z) 1{lo < Z < hi}] in closed form.
double truncated_log_moment(const LognormalLaw& law, const ZInterval& interval);

// Price E[Z X] of a piecewise wealth.
double price(const LognormalLaw& law, const PiecewiseWealth& w);

// Expected CRRA utility: gamma == 1 is logarithmic, otherwise x^{1-gamma}/(1-gamma).
double expected_utility(const LognormalLaw& law, const PiecewiseWealth& w, double gamma);

// Upper bound c2 with P(c1 < Z < c2) = alpha; throws InfeasibleError naming the
// maximal feasible alpha when P(Z > c1) < alpha.
double interval_upper_bound(const LognormalLaw& law, double c1, double alpha);

} // namespace nashvar
