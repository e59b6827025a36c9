#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nashvar/market.hpp"
#include "nashvar/oracle.hpp"

namespace nashvar {

// n-agent logarithmic game (n >= 3). Canonicalized to decreasing initial
// capital; `order` maps canonical slot -> original index. Row i of beta weighs
// the other agents in agent i's constraint; rows must sum to at most 1.
struct GameSpecN {
    std::vector<double> x0;
    std::vector<double> alpha;
    std::vector<std::vector<double>> beta;
    std::vector<int> order;

    GameSpecN(std::vector<double> x0_, std::vector<double> alpha_,
              std::vector<std::vector<double>> beta_);

    int n() const { return static_cast<int>(x0.size()); }
};

struct DisjointEquilibrium {
    std::vector<double> lambdas;
    std::vector<double> lambda_beta;            // lambda_beta^{-i} at the fixed point
    std::vector<std::optional<ZInterval>> sets; // A_i, disjoint; empty when alpha_i = 0
    std::vector<PiecewiseWealth> wealths;
    int iterations = 0;
    double residual = 0.0;
};

// Coupled fixed point of lambda_i = (x0_i - alpha_i max{x0_i, lambda_beta^{-i}}) / (1 - alpha_i)
// solved by damped Gauss-Seidel sweeps in decreasing-wealth order. Requires
// sum(alpha) <= 1 and alpha_i < 1. Throws NoEquilibriumError when the round
// limit is exhausted or a lambda leaves (0, x0_i].
DisjointEquilibrium solve_disjoint(
    const GameSpecN& g, const LognormalLaw& law,
    const std::optional<std::vector<std::optional<ZInterval>>>& user_sets = std::nullopt);

struct PartitionEquilibrium {
    int m = 0;
    std::vector<int> ell;                     // alpha_i = ell_i / m
    std::vector<ZInterval> cells;             // B_k, consecutive, probability 1/m each
    std::vector<std::vector<double>> lambda;  // [k][i]
    std::vector<std::vector<std::uint8_t>> indicator; // [k][i]
    bool converged = false;
    int rounds = 0;
    std::vector<PiecewiseWealth> wealths;     // built on convergence

    std::vector<std::uint8_t> indicator_column(int agent) const {
        std::vector<std::uint8_t> col(indicator.size());
        for (std::size_t k = 0; k < indicator.size(); ++k) col[k] = indicator[k][agent];
        return col;
    }
};

// Round-robin best-response dynamics on the discrete programs (PD_i). Each
// alpha_i must equal ell_i / m. Non-convergence (round limit or revisited
// state) is reported through the converged flag.
PartitionEquilibrium solve_partition(const GameSpecN& g, const LognormalLaw& law, int m);

// Exact best response of one agent in (PD_i): pick the ell cheapest cells by
// threshold (ties to the lower index), then solve the budget exactly.
struct PartitionBestResponse {
    std::vector<double> lambda;   // per cell
    std::vector<std::uint8_t> indicator;
    double multiplier = 0.0;
    double objective = 0.0;       // sum_k ln(lambda_k)
};
PartitionBestResponse partition_best_response(const std::vector<double>& thresholds,
                                              int ell, double x0);

// Same inner budget solve for a caller-fixed selection (enumeration oracles).
PartitionBestResponse partition_response_on_set(const std::vector<double>& thresholds,
                                                const std::vector<std::uint8_t>& selected,
                                                double x0);

struct NashCheck {
    int agent = 0;
    double improvement = 0.0;
    double improvement_ce = 0.0;
    bool pass = false;
};

struct NashVerification {
    std::vector<NashCheck> agents;
    double max_improvement = 0.0;
    bool all_pass = false;
};

// Oracle-level no-deviation check: each agent's wealth against the others on a
// common partition refined to at least min_cells cells.
NashVerification verify_nash_n(const DisjointEquilibrium& eq, const GameSpecN& g,
                               const LognormalLaw& law, int min_cells = 500,
                               double tolerance = 1e-6);
NashVerification verify_nash_n(const PartitionEquilibrium& eq, const GameSpecN& g,
                               const LognormalLaw& law, int min_cells = 500,
                               double tolerance = 1e-6);

} // namespace nashvar
