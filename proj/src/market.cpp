#include "nashvar/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

#include "nashvar/errors.hpp"
#include "nashvar/normal.hpp"

namespace nashvar {

namespace {

bool nearly_equal(double a, double b, double rel_tol) {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel_tol * std::max(scale, 1.0);
}

// Solve A x = b for a small dense system by Gaussian elimination with partial
// pivoting; throws on a (numerically) singular matrix.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        }
        if (std::abs(a[pivot * n + col]) < 1e-14) {
            throw std::invalid_argument("MarketParams: volatility matrix is singular");
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

} // namespace

ZInterval::ZInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo >= 0.0) || !(hi > lo)) {
        throw std::invalid_argument("ZInterval: requires 0 <= lo < hi");
    }
}

MarketParams::MarketParams(std::vector<double> mu, std::vector<double> sigma, double T)
    : drift(std::move(mu)), volatility(std::move(sigma)), horizon(T) {
    num_assets = static_cast<int>(drift.size());
    if (num_assets < 1) throw std::invalid_argument("MarketParams: need at least one asset");
    if (volatility.size() != static_cast<std::size_t>(num_assets) * num_assets) {
        throw std::invalid_argument("MarketParams: volatility must be a d x d matrix");
    }
    if (!(horizon > 0.0)) throw std::invalid_argument("MarketParams: horizon must be positive");

    theta_ = solve_linear(volatility, drift, num_assets);
    double s = 0.0;
    for (double t : theta_) {
        if (!std::isfinite(t)) throw std::invalid_argument("MarketParams: market price of risk is not finite");
        s += t * t;
    }
    theta_norm_ = std::sqrt(s);

    // (sigma sigma^T)^{-1} mu = sigma^{-T} theta.
    std::vector<double> sigma_t(volatility.size());
    for (int r = 0; r < num_assets; ++r)
        for (int c = 0; c < num_assets; ++c) sigma_t[r * num_assets + c] = volatility[c * num_assets + r];
    merton_dir_ = solve_linear(std::move(sigma_t), theta_, num_assets);
}

LognormalLaw::LognormalLaw(double nu_, double tau_) : nu(nu_), tau(tau_) {
    if (!(tau > 0.0)) throw std::invalid_argument("LognormalLaw: tau must be positive");
}

LognormalLaw law_from_market(const MarketParams& m) {
    double t2 = m.theta_norm() * m.theta_norm() * m.horizon;
    if (!(t2 > 0.0)) {
        throw std::invalid_argument(
            "law_from_market: zero market price of risk makes Z_T degenerate");
    }
    return LognormalLaw(-0.5 * t2, std::sqrt(t2));
}

PiecewiseWealth::PiecewiseWealth(std::vector<WealthCell> cells, double gamma)
    : gamma_(gamma) {
    if (cells.empty()) throw std::invalid_argument("PiecewiseWealth: no cells");
    if (!(gamma_ > 0.0)) throw std::invalid_argument("PiecewiseWealth: gamma must be positive");
    if (cells.front().z_lo != 0.0) throw std::invalid_argument("PiecewiseWealth: first cell must start at 0");
    if (cells.back().z_hi != kInfinity) throw std::invalid_argument("PiecewiseWealth: last cell must be unbounded");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        if (!(c.z_hi > c.z_lo)) throw std::invalid_argument("PiecewiseWealth: empty cell");
        if (!(c.coeff > 0.0) || !std::isfinite(c.coeff)) {
            throw std::invalid_argument("PiecewiseWealth: cell coefficient must be positive");
        }
        if (!std::isfinite(c.exponent)) throw std::invalid_argument("PiecewiseWealth: bad exponent");
        if (i + 1 < cells.size() && cells[i + 1].z_lo != c.z_hi) {
            throw std::invalid_argument("PiecewiseWealth: cells must abut exactly");
        }
    }
    // Merge adjacent cells carrying the same payoff.
    for (const auto& c : cells) {
        if (!cells_.empty() && nearly_equal(cells_.back().coeff, c.coeff, 1e-12) &&
            nearly_equal(cells_.back().exponent, c.exponent, 1e-12)) {
            cells_.back().z_hi = c.z_hi;
        } else {
            cells_.push_back(c);
        }
    }
}

PiecewiseWealth PiecewiseWealth::single(double coeff, double exponent, double gamma) {
    return PiecewiseWealth({WealthCell{0.0, kInfinity, coeff, exponent}}, gamma);
}

double PiecewiseWealth::operator()(double z) const {
    if (!(z > 0.0)) throw std::invalid_argument("PiecewiseWealth: z must be positive");
    for (const auto& c : cells_) {
        if (z <= c.z_hi) return c.coeff * std::pow(z, c.exponent);
    }
    const auto& c = cells_.back();
    return c.coeff * std::pow(z, c.exponent);
}

double cdf(const LognormalLaw& law, double z) {
    if (z <= 0.0) return 0.0;
    if (z == kInfinity) return 1.0;
    return norm_cdf((std::log(z) - law.nu) / law.tau);
}

double quantile(const LognormalLaw& law, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile: p must lie in (0,1)");
    return std::exp(law.nu + law.tau * norm_quantile(p));
}

double truncated_power_moment(const LognormalLaw& law, double q, const ZInterval& interval) {
    // E[Z^q 1{lo<Z<hi}] = exp(q nu + q^2 tau^2 / 2) (Phi(d(hi)) - Phi(d(lo))),
    // d(c) = (ln c - nu - q tau^2) / tau, with exact limits at 0 and infinity.
    auto d_cdf = [&](double c) {
        if (c <= 0.0) return 0.0;
        if (c == kInfinity) return 1.0;
        return norm_cdf((std::log(c) - law.nu - q * law.tau * law.tau) / law.tau);
    };
    double scale = std::exp(q * law.nu + 0.5 * q * q * law.tau * law.tau);
    return scale * (d_cdf(interval.hi) - d_cdf(interval.lo));
}

double truncated_log_moment(const LognormalLaw& law, const ZInterval& interval) {
    // E[ln Z 1{lo<Z<hi}] = nu (Phi(b)-Phi(a)) + tau (pdf(a)-pdf(b)).
    auto std_arg = [&](double c) { return (std::log(c) - law.nu) / law.tau; };
    double fa = 0.0, fb = 1.0, pa = 0.0, pb = 0.0;
    if (interval.lo > 0.0) {
        double a = std_arg(interval.lo);
        fa = norm_cdf(a);
        pa = norm_pdf(a);
    }
    if (interval.hi != kInfinity) {
        double b = std_arg(interval.hi);
        fb = norm_cdf(b);
        pb = norm_pdf(b);
    }
    return law.nu * (fb - fa) + law.tau * (pa - pb);
}

double price(const LognormalLaw& law, const PiecewiseWealth& w) {
    double total = 0.0;
    for (const auto& c : w.cells()) {
        total += c.coeff * truncated_power_moment(law, 1.0 + c.exponent, ZInterval(c.z_lo, c.z_hi));
    }
    return total;
}

double expected_utility(const LognormalLaw& law, const PiecewiseWealth& w, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("expected_utility: gamma must be positive");
    double total = 0.0;
    if (gamma == 1.0) {
        for (const auto& c : w.cells()) {
            ZInterval cell(c.z_lo, c.z_hi);
            double mass = cdf(law, c.z_hi) - cdf(law, c.z_lo);
            total += std::log(c.coeff) * mass + c.exponent * truncated_log_moment(law, cell);
        }
    } else {
        for (const auto& c : w.cells()) {
            ZInterval cell(c.z_lo, c.z_hi);
            double q = c.exponent * (1.0 - gamma);
            total += std::pow(c.coeff, 1.0 - gamma) / (1.0 - gamma) *
                     truncated_power_moment(law, q, cell);
        }
    }
    return total;
}

double interval_upper_bound(const LognormalLaw& law, double c1, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("interval_upper_bound: alpha must lie in (0,1)");
    }
    if (c1 < 0.0) throw std::invalid_argument("interval_upper_bound: c1 must be nonnegative");
    double base = cdf(law, c1);
    double target = alpha + base;
    if (target > 1.0) {
        std::ostringstream msg;
        msg << "interval_upper_bound: P(Z > " << c1 << ") = " << (1.0 - base)
            << " < alpha = " << alpha << "; maximal feasible alpha is " << (1.0 - base);
        throw InfeasibleError(msg.str());
    }
    if (target == 1.0) return kInfinity;
    return std::exp(law.nu + law.tau * norm_quantile(target));
}

} // namespace nashvar
