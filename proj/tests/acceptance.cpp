// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every tolerance is pinned in this file. The suite covers the printed
// reference values (quantiles, interval bounds, equilibrium multipliers), the
// full case-classification table, the Lagrangian certificate, the multi-agent
// fixed points against enumeration, replication self-consistency including the
// hedge-error convergence study, the constraint frequency, and the grid-oracle
// cross-validation.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nashvar/errors.hpp"
#include "nashvar/multi_agent.hpp"
#include "nashvar/oracle.hpp"
#include "nashvar/replication.hpp"
#include "nashvar/rng.hpp"
#include "nashvar/two_agent_log.hpp"
#include "nashvar/two_agent_power.hpp"
#include "oracles.hpp"

using namespace nashvar;

namespace {

const LognormalLaw kLaw(-0.045, 0.3);
const MarketParams kMarket(0.03, 0.2, 4.0);
constexpr std::uint64_t kSeed = 20240801;

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- criterion 1: quantile reproduction ----
void criterion_quantile() {
    double q = quantile(kLaw, 0.8);
    bool pass = std::abs(q - 1.2306) <= 5e-4;
    report(1, "quantile(0.8) = 1.2306 within 5e-4", pass, "quantile = " + fmt(q));
}

// ---- criterion 2: interval bounds ----
void criterion_interval_bounds() {
    const double cases[4][2] = {{0.1, 0.7427}, {0.5, 0.7547}, {0.8, 0.9391}, {1.2, 1.7274}};
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        double c2 = interval_upper_bound(kLaw, c[0], 0.2);
        pass = pass && std::abs(c2 - c[1]) <= 5e-4;
        detail += fmt(c[0]) + "->" + fmt(c2) + " ";
    }
    report(2, "interval_upper_bound matches all four reference pairs within 5e-4", pass, detail);
}

double log2_deviation(const PiecewiseWealth& own, const PiecewiseWealth& other, double beta_other,
                      double alpha, double budget) {
    std::vector<double> boundaries;
    for (const auto& c : own.cells()) {
        if (c.z_hi != kInfinity) boundaries.push_back(c.z_hi);
    }
    for (const auto& c : other.cells()) {
        if (c.z_hi != kInfinity) boundaries.push_back(c.z_hi);
    }
    auto cells = build_cells(kLaw, refine_boundaries(kLaw, boundaries, 500));
    for (auto& c : cells) c.floor_value = beta_other * other(c.zbar);
    GridProblem p(std::move(cells), alpha, budget, 1.0);
    return deviation_search(p, discretize(own, p.cells)).improvement;
}

// ---- criterion 3: two-agent log equilibrium ----
void criterion_log2() {
    GameSpec2 g(3.0, 2.0, 0.5, 0.2, 0.9, 0.5);
    EquilibriumResult2 res = solve_log2(g, kLaw);
    bool pass = res.case_tag == Log2Case::FamilyFreeSet;
    double lambda2 = res.lambda2 ? *res.lambda2 : -1.0;
    pass = pass && std::abs(lambda2 - 1.825) <= 1e-12;
    pass = pass && std::abs(res.diagnostics.budget_residual1) <= 1e-10 &&
           std::abs(res.diagnostics.budget_residual2) <= 1e-10 &&
           std::abs(res.diagnostics.probability_residual) <= 1e-10;
    double d2 = log2_deviation(*res.wealth2, *res.wealth1, g.beta1, g.alpha2, g.x02);
    double d1 = log2_deviation(*res.wealth1, *res.wealth2, g.beta2, g.alpha1, g.x01);
    pass = pass && d1 <= 1e-6 && d2 <= 1e-6;
    report(3, "figure-1 log equilibrium: lambda2 = 1.825, residuals, no deviation", pass,
           "lambda2 = " + fmt(lambda2) + ", deviations = (" + fmt(d1) + ", " + fmt(d2) + ")");
}

// ---- criterion 4: case classification table ----
void criterion_classification() {
    const double x01 = 3.0, x02 = 2.0, alpha1 = 0.5, beta2 = 0.5;
    int agree = 0, total = 0;
    for (int ia = 0; ia <= 5; ++ia) {
        for (int ib = 0; ib <= 5; ++ib) {
            double alpha2 = 0.2 * ia;
            double beta1 = 0.2 * ib;
            EquilibriumResult2 res = solve_log2(GameSpec2(x01, x02, alpha1, alpha2, beta1, beta2), kLaw);
            Log2Case expected;
            if (x02 < alpha2 * beta1 * x01) {
                expected = Log2Case::NoEquilibrium;
            } else if (alpha2 == 1.0) {
                expected = Log2Case::Unique; // alpha1 beta1 beta2 < 1 on this sweep
            } else if (x02 >= beta1 * x01) {
                expected = Log2Case::Unique;
            } else if ((x02 - alpha2 * beta1 * x01) > 0.0) {
                expected = Log2Case::FamilyFreeSet;
            } else {
                expected = Log2Case::NoEquilibrium;
            }
            ++total;
            if (res.case_tag == expected) ++agree;
        }
    }
    report(4, "case-classification sweep agrees with direct inequalities",
           agree == total, std::to_string(agree) + "/" + std::to_string(total) + " cells agree");
}

// ---- criterion 5: power equilibrium certificate ----
void criterion_power() {
    GameSpec2 g(3.0, 2.0, 0.5, 0.5, 0.9, 0.5, 0.7);
    PowerSolveReport r = solve_power2(g, kLaw);
    bool pass = r.feasibility_case == PowerCase::CaseA;
    LagrangianReport rep = verify_lagrangian(r, kLaw, g);
    pass = pass && rep.all_pass;
    std::string detail = "checks:";
    for (const auto& c : rep.checks) {
        detail += std::string(" ") + (c.pass ? "+" : "-") + c.name;
    }
    // Structural band side: gamma < 1 constrained on the upper z-interval.
    pass = pass && r.wealth2->cells().size() == 2 &&
           r.wealth2->cells()[1].coeff == g.beta1 * (g.x01 / r.epsilon_gamma);
    GameSpec2 gb(3.0, 2.0, 0.5, 0.3, 0.9, 0.5, 1.5);
    PowerSolveReport rb = solve_power2(gb, kLaw);
    pass = pass && rb.feasibility_case == PowerCase::CaseB && rb.wealth2->cells().size() == 2 &&
           rb.wealth2->cells()[0].coeff == gb.beta1 * (gb.x01 / rb.epsilon_gamma);
    double budget_res = price(kLaw, *r.wealth2) - g.x02;
    pass = pass && std::abs(budget_res) <= 1e-9;
    report(5, "figure-9 power equilibrium: Lagrangian certificate, band side, budget", pass,
           detail + ", budget residual = " + fmt(budget_res));
}

// ---- criterion 6: multi-agent fixed point ----
void criterion_multi() {
    std::vector<std::vector<double>> beta(4, std::vector<double>(4, 0.3));
    for (int i = 0; i < 4; ++i) beta[i][i] = 0.0;
    GameSpecN g({5.0, 4.0, 3.0, 2.0}, {0.2, 0.2, 0.2, 0.2}, beta);
    DisjointEquilibrium eq = solve_disjoint(g, kLaw);
    const double reference[4] = {5.0, 4.0, 2.9547, 1.6034};
    bool pass = eq.lambdas[0] == 5.0; // richest agent exactly
    for (int i = 0; i < 4; ++i) pass = pass && std::abs(eq.lambdas[i] - reference[i]) <= 1e-3;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        double lb = eq.lambda_beta[i];
        double rhs = (g.x0[i] >= lb) ? g.x0[i] : (g.x0[i] - g.alpha[i] * lb) / (1.0 - g.alpha[i]);
        worst = std::max(worst, std::abs(eq.lambdas[i] - rhs));
    }
    pass = pass && worst <= 1e-10;
    NashVerification v = verify_nash_n(eq, g, kLaw, 500);
    pass = pass && v.all_pass && v.max_improvement <= 1e-6;
    report(6, "four-agent fixed point: reference lambdas, residual, no deviation", pass,
           "lambda = (" + fmt(eq.lambdas[0]) + ", " + fmt(eq.lambdas[1]) + ", " + fmt(eq.lambdas[2]) +
               ", " + fmt(eq.lambdas[3]) + "), residual = " + fmt(worst) +
               ", max improvement = " + fmt(v.max_improvement));
}

// ---- criterion 7: partition solver vs exhaustive enumeration ----
void criterion_partition_enumeration() {
    struct Instance {
        std::vector<double> x0, alpha;
        double beta;
        int m;
    };
    std::vector<Instance> instances = {
        {{3.0, 2.0, 1.0}, {0.4, 0.4, 0.4}, 0.4, 5},
        {{2.5, 2.0, 1.5}, {0.5, 0.25, 0.5}, 0.3, 4},
    };
    bool pass = true;
    double worst_gap = 0.0;
    for (const auto& inst : instances) {
        int n = static_cast<int>(inst.x0.size());
        std::vector<std::vector<double>> beta(n, std::vector<double>(n, inst.beta));
        for (int i = 0; i < n; ++i) beta[i][i] = 0.0;
        GameSpecN g(inst.x0, inst.alpha, beta);
        PartitionEquilibrium eq = solve_partition(g, kLaw, inst.m);
        if (!eq.converged) {
            pass = false;
            continue;
        }
        for (int i = 0; i < n; ++i) {
            std::vector<double> thresholds(inst.m);
            for (int k = 0; k < inst.m; ++k) {
                double t = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j != i) t += g.beta[i][j] * eq.lambda[k][j];
                }
                thresholds[k] = t;
            }
            double fixed_obj = 0.0;
            for (int k = 0; k < inst.m; ++k) fixed_obj += std::log(eq.lambda[k][i]);
            double best = -1e300;
            for (const auto& subset : oracles::subsets(inst.m, eq.ell[i])) {
                std::vector<std::uint8_t> sel(inst.m, 0);
                for (int idx : subset) sel[idx] = 1;
                try {
                    best = std::max(best,
                                    partition_response_on_set(thresholds, sel, g.x0[i]).objective);
                } catch (const InfeasibleError&) {
                    // this selection cannot be funded; not a candidate response
                }
            }
            double gap = (best - fixed_obj) / inst.m; // per-cell utility units
            worst_gap = std::max(worst_gap, std::abs(gap));
            pass = pass && std::abs(gap) <= 1e-9;
        }
    }
    report(7, "partition fixed points match exhaustive indicator enumeration", pass,
           "worst utility gap = " + fmt(worst_gap));
}

// ---- criterion 8: replication self-consistency ----
void criterion_replication() {
    // (i) band additivity of digital pairs, exact to 1e-12.
    double worst_add = 0.0;
    for (double t : {0.0, 1.0, 2.0, 3.5}) {
        for (double z : {0.4, 0.75, 1.0, 1.6}) {
            PathState s{t, z, {0.0}};
            PortfolioPoint merton = digital_pair(DigitalBand(0.0, kInfinity), s, kMarket);
            PortfolioPoint low = digital_pair(DigitalBand(0.0, 0.75), s, kMarket);
            PortfolioPoint mid = digital_pair(DigitalBand(0.75, 1.2), s, kMarket);
            PortfolioPoint high = digital_pair(DigitalBand(1.2, kInfinity), s, kMarket);
            worst_add = std::max(worst_add,
                                 std::abs(low.wealth + mid.wealth + high.wealth - merton.wealth));
            worst_add = std::max(
                worst_add, std::abs(low.amounts[0] + mid.amounts[0] + high.amounts[0] - merton.amounts[0]));
        }
    }
    bool pass_add = worst_add <= 1e-12;

    // (ii) initial price of the equilibrium pair.
    GameSpec2 g(3.0, 2.0, 0.5, 0.2, 0.9, 0.5);
    double worst_p0 = 0.0;
    for (double c1 : {0.0, 0.75, 1.2}) {
        double c2 = (c1 <= 0.0) ? quantile(kLaw, 0.2) : interval_upper_bound(kLaw, c1, 0.2);
        PathState s0{0.0, 1.0, {0.0}};
        double p0 = equilibrium_pair(g, DigitalBand(c1, c2), s0, kMarket).wealth;
        worst_p0 = std::max(worst_p0, std::abs(p0 - 2.0));
    }
    bool pass_p0 = worst_p0 <= 1e-9;

    // (iii) hedge-error convergence: the same 10^3 Brownian paths (coupled via
    // a fine grid) hedged at 250/500/1000/2000 steps. The criterion pins the
    // literal halving band [0.4, 0.6] per doubling; the strong rate of the
    // discretized hedge is 1/2 (factor ~0.71), so this clause records the
    // measured factors honestly rather than loosening the band.
    DigitalBand band(0.0, quantile(kLaw, 0.2));
    ReplicationClaim claim = claim_from_equilibrium(g, band, kLaw);
    const int fine = 2000, n_paths = 1000;
    const double T = kMarket.horizon, mu = kMarket.drift[0], sg = kMarket.volatility[0];
    std::vector<double> gaps;
    for (int steps : {250, 500, 1000, 2000}) {
        int stride = fine / steps;
        double dt = T / steps, fdt = T / fine;
        double total = 0.0;
        for (int p = 0; p < n_paths; ++p) {
            Philox rng(kSeed, p);
            std::vector<double> dw(steps, 0.0);
            for (int k = 0; k < fine; ++k) dw[k / stride] += std::sqrt(fdt) * rng.next_normal();
            double w = 0.0;
            PortfolioPoint pair = replication_pair(claim, make_path_state(kMarket, 0.0, {0.0}), kMarket);
            double self = pair.wealth;
            for (int k = 0; k < steps; ++k) {
                double ratio = std::exp((mu - 0.5 * sg * sg) * dt + sg * dw[k]);
                self += pair.amounts[0] * (ratio - 1.0);
                w += dw[k];
                double t_next = (k + 1 == steps) ? T : (k + 1) * dt;
                PathState s = make_path_state(kMarket, t_next, {w});
                if (k + 1 < steps) pair = replication_pair(claim, s, kMarket);
                else total += std::abs(self - claim_payoff(claim, s.z));
            }
        }
        gaps.push_back(total / n_paths);
    }
    bool pass_conv = true;
    std::string ratios;
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        double r = gaps[i] / gaps[i - 1];
        ratios += fmt(r) + " ";
        pass_conv = pass_conv && (r >= 0.4 && r <= 0.6);
    }

    bool pass = pass_add && pass_p0 && pass_conv;
    report(8, "replication: band additivity 1e-12, initial price 1e-9, gap halves per doubling",
           pass,
           "additivity = " + fmt(worst_add) + ", price residual = " + fmt(worst_p0) +
               ", gap factors per doubling = " + ratios +
               (pass_conv ? "" : "(outside the literal halving band [0.4,0.6]; measured rate ~2^-0.5, see ledger)"));
}

// ---- criterion 9: constraint frequency ----
void criterion_frequency() {
    GameSpec2 g(3.0, 2.0, 0.5, 0.2, 0.9, 0.5);
    DigitalBand band(0.0, quantile(kLaw, 0.2));
    ReplicationClaim claim = claim_from_equilibrium(g, band, kLaw);
    SimulationOptions opt;
    opt.steps = 800;
    opt.n_paths = 10000;
    opt.seed = kSeed;
    auto paths = simulate_paths(kMarket, claim, opt);
    int hits = 0;
    for (const auto& p : paths) {
        if (p.points.back().wealth_closed >= p.terminal_payoff_target * (1.0 - 1e-12)) ++hits;
    }
    double freq = static_cast<double>(hits) / opt.n_paths;
    double se = std::sqrt(0.2 * 0.8 / opt.n_paths);
    bool pass = std::abs(freq - 0.2) <= 3.0 * se;
    report(9, "terminal outperformance frequency within 3 binomial SE of alpha2 = 0.2", pass,
           "frequency = " + fmt(freq) + ", band = 0.2 +- " + fmt(3.0 * se));
}

// ---- criterion 10: oracle cross-validation ----
void criterion_oracle() {
    const double lambda2_exact = 1.825;
    bool pass = true;
    std::string detail = "lambda errors:";
    double prev_err = kInfinity;
    double err500 = kInfinity;
    for (int m : {125, 250, 500, 1000}) {
        auto cells = build_cells(kLaw, quantile_boundaries(kLaw, m));
        for (auto& c : cells) c.floor_value = 0.9 * 3.0 / c.zbar;
        GridProblem p(std::move(cells), 0.2, 2.0, 1.0);
        GridSolution sol = solve_partial(p);
        double err = std::abs(sol.lambda - lambda2_exact);
        if (m == 500) err500 = err;
        pass = pass && err <= prev_err + 1e-12; // monotone decrease (ties at float noise allowed)
        prev_err = err;
        detail += " " + fmt(err);
    }
    pass = pass && err500 <= 1e-4 * lambda2_exact;
    report(10, "grid oracle reproduces lambda2 within 1e-4 with refinement-monotone error", pass,
           detail);
}

} // namespace

int main() {
    std::printf("nashvar acceptance suite\n");
    criterion_quantile();
    criterion_interval_bounds();
    criterion_log2();
    criterion_classification();
    criterion_power();
    criterion_multi();
    criterion_partition_enumeration();
    criterion_replication();
    criterion_frequency();
    criterion_oracle();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion/criteria FAILED\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
