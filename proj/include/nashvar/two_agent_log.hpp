#pragma once

#include <optional>
#include <string>

#include "nashvar/market.hpp"

namespace nashvar {

// Two-agent game parameters. Canonicalized so that x01 >= x02; when the inputs
// arrive the other way round, agents are relabeled (alphas and betas swap) and
// the flag records it. beta1 multiplies agent 1's wealth in agent 2's
// constraint P(X2 >= beta1 X1) >= alpha2, and symmetrically for beta2.
struct GameSpec2 {
    double x01, x02;
    double alpha1, alpha2;
    double beta1, beta2;
    double gamma;
    bool relabeled = false;

    GameSpec2(double x01_, double x02_, double alpha1_, double alpha2_,
              double beta1_, double beta2_, double gamma_ = 1.0);
};

enum class Log2Case {
    NoEquilibrium,
    DegenerateFamily, // all alphas/betas = 1, equal capitals
    Unique,
    FamilyFreeSet,    // family parameterized by the free set A2
};

struct Log2Diagnostics {
    double budget_residual1 = 0.0;
    double budget_residual2 = 0.0;
    double probability_residual = 0.0; // P(X2 >= beta1 X1) minus its target
    bool boundary_lambda_zero = false; // x02 = alpha2 beta1 x01 tie, lambda2 = 0 excluded
    bool beta_product_one_branch = false;
    bool relabeled = false;
    std::string note;
};

struct EquilibriumResult2 {
    Log2Case case_tag = Log2Case::NoEquilibrium;
    std::optional<PiecewiseWealth> wealth1;
    std::optional<PiecewiseWealth> wealth2;
    std::optional<ZInterval> free_set;
    std::optional<double> lambda2;
    Log2Diagnostics diagnostics;
};

// Full case analysis of the two-agent logarithmic game. The optional a2_choice
// overrides the default free set A2 = (0, z_{alpha2}]; its probability must
// equal alpha2 within 1e-10.
EquilibriumResult2 solve_log2(const GameSpec2& g, const LognormalLaw& law,
                              const std::optional<ZInterval>& a2_choice = std::nullopt);

// Single-agent benchmark problem: maximize E ln(X) subject to
// P(X >= beta S_T) >= alpha and E[Z X] = x0, in a one-stock market.
struct BenchmarkSolution {
    PiecewiseWealth wealth;
    double lambda = 0.0;        // budget multiplier (lambda/Z form)
    double lambda_alpha = 0.0;  // alpha-quantile of beta S_T Z_T
    bool constrained = false;   // false when x0 >= lambda_alpha
    std::optional<ZInterval> band; // where the wealth equals beta S_T
};

BenchmarkSolution solve_benchmark(double x0, double beta, double alpha, const MarketParams& m);

} // namespace nashvar
