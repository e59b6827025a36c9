#include "nashvar/two_agent_power.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nashvar {

namespace {

double utility(double x, double gamma) { return std::pow(x, 1.0 - gamma) / (1.0 - gamma); }
double inverse_marginal(double y, double gamma) { return std::pow(y, -1.0 / gamma); }

} // namespace

PowerSolveReport solve_power2(const GameSpec2& g, const LognormalLaw& law) {
    if (!(g.gamma > 0.0) || g.gamma == 1.0) {
        throw std::invalid_argument("solve_power2: requires gamma > 0, gamma != 1 (use solve_log2 for gamma = 1)");
    }
    if (!(g.beta1 * g.beta2 < 1.0)) {
        throw std::invalid_argument("solve_power2: beta1 * beta2 >= 1 is unsupported");
    }
    const double gamma = g.gamma;
    const double q = 1.0 - 1.0 / gamma;

    PowerSolveReport r;
    r.epsilon_gamma = truncated_power_moment(law, q, ZInterval(0.0, kInfinity));
    const double merton1 = g.x01 / r.epsilon_gamma;
    r.kappa = std::pow(merton1, -gamma);

    auto merton_pair = [&]() {
        r.feasibility_case = PowerCase::Unconstrained;
        r.wealth1 = PiecewiseWealth::single(merton1, -1.0 / gamma, gamma);
        r.wealth2 = PiecewiseWealth::single(g.x02 / r.epsilon_gamma, -1.0 / gamma, gamma);
        r.lambda2 = std::pow(g.x02 / r.epsilon_gamma, -gamma);
        r.eta2 = 0.0;
        return r;
    };

    // The unconstrained wealths already satisfy both constraints when
    // x0_2 >= beta1 x0_1 (and x0_1 >= beta2 x0_2 holds under the canonical
    // ordering). alpha2 = 0 makes agent 2's constraint vacuous.
    if (g.alpha2 == 0.0 || g.x02 >= g.beta1 * g.x01) return merton_pair();

    if (g.alpha2 == 1.0) {
        r.feasibility_case = PowerCase::Infeasible;
        r.violated = "alpha2 = 1 with x0_2 < beta1 x0_1: the band price beta1 x0_1 exceeds the budget";
        return r;
    }

    const bool low_gamma = gamma < 1.0;
    const double zstar = quantile(law, low_gamma ? 1.0 - g.alpha2 : g.alpha2);
    r.split_quantile = zstar;

    // Band moment = E[Z^q 1{band}]; the band is where X2* = beta1 X1*.
    const ZInterval lower(0.0, zstar);
    const ZInterval upper(zstar, kInfinity);
    const double band_moment = truncated_power_moment(law, q, low_gamma ? upper : lower);
    const double free_moment = truncated_power_moment(law, q, low_gamma ? lower : upper);

    const double band_price = g.beta1 * merton1 * band_moment;
    if (!(g.x02 > band_price)) {
        r.feasibility_case = PowerCase::Infeasible;
        std::ostringstream msg;
        msg << "x0_2 = " << g.x02 << " must exceed the band price (beta1 x0_1/eps_gamma) E[Z^{1-1/gamma} 1{band}] = "
            << band_price << " (feasibility condition for gamma " << (low_gamma ? "< 1" : "> 1") << ")";
        r.violated = msg.str();
        return r;
    }

    r.feasibility_case = low_gamma ? PowerCase::CaseA : PowerCase::CaseB;
    r.lambda2 = std::pow(free_moment, gamma) * std::pow(g.x02 - band_price, -gamma);

    const double free_coeff = std::pow(r.lambda2, -1.0 / gamma);
    const double band_coeff = g.beta1 * merton1;
    r.wealth1 = PiecewiseWealth::single(merton1, -1.0 / gamma, gamma);
    std::vector<WealthCell> cells;
    if (low_gamma) {
        cells.push_back(WealthCell{0.0, zstar, free_coeff, -1.0 / gamma});
        cells.push_back(WealthCell{zstar, kInfinity, band_coeff, -1.0 / gamma});
    } else {
        cells.push_back(WealthCell{0.0, zstar, band_coeff, -1.0 / gamma});
        cells.push_back(WealthCell{zstar, kInfinity, free_coeff, -1.0 / gamma});
    }
    r.wealth2 = PiecewiseWealth(std::move(cells), gamma);

    const double i_l = inverse_marginal(r.lambda2 * zstar, gamma);
    const double i_k = g.beta1 * inverse_marginal(r.kappa * zstar, gamma);
    r.eta2 = utility(i_l, gamma) - utility(i_k, gamma) + r.lambda2 * zstar * (i_k - i_l);
    return r;
}

LagrangianReport verify_lagrangian(const PowerSolveReport& r, const LognormalLaw& law,
                                   const GameSpec2& g) {
    if (r.feasibility_case != PowerCase::CaseA && r.feasibility_case != PowerCase::CaseB) {
        throw std::invalid_argument("verify_lagrangian: report must be CaseA or CaseB");
    }
    const double gamma = g.gamma;
    const double lambda2 = r.lambda2;
    const double kappa = r.kappa;
    const double beta1 = g.beta1;
    const double zstar = r.split_quantile;

    LagrangianReport report;
    auto add = [&](const std::string& name, bool pass, double residual) {
        report.checks.push_back(LagrangianCheck{name, pass, residual});
    };

    // (i) eta2 >= 0.
    add("eta2_nonnegative", r.eta2 >= -1e-12, r.eta2);

    // (ii) F(z*) = 0 for the certificate pair (lambda2, eta2).
    auto F = [&](double z) {
        double il = inverse_marginal(lambda2 * z, gamma);
        double ik = beta1 * inverse_marginal(kappa * z, gamma);
        return utility(il, gamma) - lambda2 * z * il -
               (utility(ik, gamma) - lambda2 * z * ik + r.eta2);
    };
    double f_at_split = F(zstar);
    add("F_vanishes_at_split", std::abs(f_at_split) <= 1e-9, f_at_split);

    // (iii) f(kappa beta1^{-gamma}) = 0.
    const double bk = beta1 * std::pow(kappa, -1.0 / gamma);
    auto f_lambda = [&](double lam) {
        return lam * (bk - std::pow(lam, -1.0 / gamma)) + bk / gamma * (kappa * std::pow(beta1, -gamma) - lam);
    };
    const double lam_root = kappa * std::pow(beta1, -gamma);
    double f_root = f_lambda(lam_root);
    add("f_vanishes_at_root", std::abs(f_root) <= 1e-9, f_root);

    // (iv) sign of f'(lambda) past the root: negative for gamma < 1, positive
    // for gamma > 1.
    double worst = -kInfinity;
    for (int k = 1; k <= 50; ++k) {
        double lam = lam_root * (1.0 + 0.1 * k);
        double fp = (1.0 - 1.0 / gamma) * (bk - std::pow(lam, -1.0 / gamma));
        double violation = (gamma < 1.0) ? fp : -fp; // must stay negative
        worst = std::max(worst, violation);
    }
    add("fprime_sign", worst < 0.0, worst);

    // (v) X2* maximizes L pointwise against both candidate maximizers.
    const PiecewiseWealth& w2 = *r.wealth2;
    auto L = [&](double x, double z) {
        double indicator = (x >= beta1 * inverse_marginal(kappa * z, gamma) * (1.0 - 1e-12)) ? 1.0 : 0.0;
        return utility(x, gamma) - lambda2 * z * x + r.eta2 * indicator;
    };
    double worst_gap = 0.0;
    const int grid_n = 1000;
    for (int k = 1; k <= grid_n; ++k) {
        double z = quantile(law, static_cast<double>(k) / (grid_n + 1));
        double chosen = L(w2(z), z);
        double alt = std::max(L(inverse_marginal(lambda2 * z, gamma), z),
                              L(beta1 * inverse_marginal(kappa * z, gamma), z));
        worst_gap = std::max(worst_gap, alt - chosen);
    }
    add("pointwise_argmax", worst_gap <= 1e-9, worst_gap);

    report.all_pass = true;
    for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
    return report;
}

} // namespace nashvar
