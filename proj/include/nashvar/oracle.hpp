#pragma once

#include <vector>

#include "nashvar/market.hpp"

namespace nashvar {

// One cell of a discretized state space: z-interval, probability mass, the
// conditional mean zbar = E[Z | cell] and the opponent floor value Y_k at zbar.
struct GridCell {
    ZInterval interval;
    double mass = 0.0;
    double zbar = 0.0;
    double floor_value = 0.0;
};

// Discretized constrained utility maximization: maximize sum m_k U(x_k) subject
// to sum m_k zbar_k x_k = budget and x_k >= Y_k on a selected cell set of total
// mass >= alpha.
struct GridProblem {
    std::vector<GridCell> cells;
    double alpha = 1.0;
    double budget = 1.0;
    double gamma = 1.0;

    GridProblem(std::vector<GridCell> cells_, double alpha_, double budget_, double gamma_);
};

struct GridSolution {
    std::vector<double> values;    // wealth per cell
    std::vector<char> selected;    // 1 on the constraint-satisfaction set
    double lambda = 0.0;           // budget multiplier (log: lambda/Z form)
    double utility = 0.0;
};

struct DeviationReport {
    double eu_candidate = 0.0;
    double eu_best = 0.0;
    double improvement = 0.0;      // utility units
    double improvement_ce = 0.0;   // certainty-equivalent units
};

// Cells between consecutive boundaries (0, b_1], (b_1, b_2], ..., (b_last, inf).
// Boundaries must be positive, strictly increasing. For gamma = 1 the
// representative zbar is the conditional mean E[Z | cell], which prices
// cell-constant and coefficient-form wealths exactly; for power utility it is
// the q-power mean (E[Z^q | cell])^{1/q} with q = 1 - 1/gamma, which makes
// price and utility of every c z^{-1/gamma} wealth exact on the grid.
std::vector<GridCell> build_cells(const LognormalLaw& law, const std::vector<double>& boundaries,
                                  double gamma = 1.0);

// Interior quantile boundaries z_{k/m}, k = 1..m-1.
std::vector<double> quantile_boundaries(const LognormalLaw& law, int m);

// Merge base boundaries with a quantile grid so the result has at least
// min_cells cells; duplicates (relative 1e-12) are dropped.
std::vector<double> refine_boundaries(const LognormalLaw& law,
                                      std::vector<double> base,
                                      int min_cells);

// Candidate wealth sampled at each cell's representative point.
std::vector<double> discretize(const PiecewiseWealth& w, const std::vector<GridCell>& cells);

double grid_price(const GridProblem& p, const std::vector<double>& values);
double grid_utility(const GridProblem& p, const std::vector<double>& values);

// Optimal wealth when the floor must hold on every cell (alpha = 1):
// x_k = max{Y_k, I(lambda zbar_k)}. Exact budget solve.
GridSolution solve_floor(const GridProblem& p);

// Log-utility problem with the floor required only on a cell set of mass alpha,
// placed where Ytilde = Y Z is smallest (ties to the lower cell index).
GridSolution solve_partial(const GridProblem& p);

// Best response with the floor required on a fixed cell set (power utility path;
// the set is chosen by the caller).
GridSolution solve_on_set(const GridProblem& p, const std::vector<char>& selected);

// Gap between the oracle best response and a feasible candidate.
DeviationReport deviation_search(const GridProblem& p, const std::vector<double>& candidate);

} // namespace nashvar
