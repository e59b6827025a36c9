#include "nashvar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nashvar/errors.hpp"

namespace nashvar {

namespace {

double crra_utility(double x, double gamma) {
    if (gamma == 1.0) return std::log(x);
    return std::pow(x, 1.0 - gamma) / (1.0 - gamma);
}

double certainty_equivalent(double eu, double gamma) {
    if (gamma == 1.0) return std::exp(eu);
    return std::pow((1.0 - gamma) * eu, 1.0 / (1.0 - gamma));
}

// Exact budget solve for sum_k m_k max{ytilde_k, lambda} over active cells plus
// lambda * free_mass = budget; increasing piecewise-linear in lambda.
double solve_log_budget(const std::vector<double>& ytilde_active,
                        const std::vector<double>& mass_active,
                        double free_mass, double budget) {
    // Sort active thresholds descending and walk the linear regimes.
    std::vector<std::size_t> order(ytilde_active.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ytilde_active[a] > ytilde_active[b]; });

    double floor_price = 0.0;
    double lin_mass = free_mass;
    for (std::size_t j = 0; j < order.size(); ++j) {
        floor_price += ytilde_active[order[j]] * mass_active[order[j]];
        lin_mass += mass_active[order[j]];
    }
    // Regime 0: lambda >= all thresholds.
    double lambda = budget / lin_mass;
    double top = order.empty() ? -kInfinity : ytilde_active[order[0]];
    if (order.empty() || lambda >= top * (1.0 - 1e-12)) return lambda;

    double fixed_sum = 0.0; // sum of m * ytilde for thresholds above lambda
    for (std::size_t j = 0; j < order.size(); ++j) {
        double t = ytilde_active[order[j]];
        fixed_sum += t * mass_active[order[j]];
        lin_mass -= mass_active[order[j]];
        double next_t = (j + 1 < order.size()) ? ytilde_active[order[j + 1]] : 0.0;
        if (lin_mass <= 0.0) break;
        lambda = (budget - fixed_sum) / lin_mass;
        if (lambda <= t * (1.0 + 1e-12) && lambda >= next_t * (1.0 - 1e-12)) return lambda;
    }
    std::ostringstream msg;
    msg << "grid budget " << budget << " cannot fund the floor; minimal feasible budget is "
        << floor_price;
    throw InfeasibleError(msg.str());
}

} // namespace

GridProblem::GridProblem(std::vector<GridCell> cells_, double alpha_, double budget_, double gamma_)
    : cells(std::move(cells_)), alpha(alpha_), budget(budget_), gamma(gamma_) {
    if (cells.empty()) throw std::invalid_argument("GridProblem: no cells");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("GridProblem: alpha must lie in [0,1]");
    if (!(budget > 0.0)) throw std::invalid_argument("GridProblem: budget must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("GridProblem: gamma must be positive");
    double total = 0.0;
    for (const auto& c : cells) {
        if (!(c.mass > 0.0) || !(c.zbar > 0.0)) throw std::invalid_argument("GridProblem: bad cell");
        if (!(c.floor_value >= 0.0) || !std::isfinite(c.floor_value)) {
            throw std::invalid_argument("GridProblem: floors must be finite and nonnegative");
        }
        total += c.mass;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("GridProblem: cell masses must sum to 1");
    }
}

std::vector<GridCell> build_cells(const LognormalLaw& law, const std::vector<double>& boundaries,
                                  double gamma) {
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        if (!(boundaries[i] > 0.0) || (i > 0 && !(boundaries[i] > boundaries[i - 1]))) {
            throw std::invalid_argument("build_cells: boundaries must be positive and increasing");
        }
    }
    if (!(gamma > 0.0)) throw std::invalid_argument("build_cells: gamma must be positive");
    const double q = 1.0 - 1.0 / gamma;
    std::vector<GridCell> cells;
    cells.reserve(boundaries.size() + 1);
    double lo = 0.0;
    for (std::size_t i = 0; i <= boundaries.size(); ++i) {
        double hi = (i < boundaries.size()) ? boundaries[i] : kInfinity;
        ZInterval cell(lo, hi);
        double mass = cdf(law, hi) - cdf(law, lo);
        if (mass <= 0.0) throw std::invalid_argument("build_cells: cell with zero mass");
        double zbar = (gamma == 1.0)
                          ? truncated_power_moment(law, 1.0, cell) / mass
                          : std::pow(truncated_power_moment(law, q, cell) / mass, 1.0 / q);
        cells.push_back(GridCell{cell, mass, zbar, 0.0});
        lo = hi;
    }
    return cells;
}

std::vector<double> quantile_boundaries(const LognormalLaw& law, int m) {
    if (m < 2) throw std::invalid_argument("quantile_boundaries: m must be at least 2");
    std::vector<double> b;
    b.reserve(m - 1);
    for (int k = 1; k < m; ++k) b.push_back(quantile(law, static_cast<double>(k) / m));
    return b;
}

std::vector<double> refine_boundaries(const LognormalLaw& law,
                                      std::vector<double> base,
                                      int min_cells) {
    std::vector<double> merged = quantile_boundaries(law, std::max(min_cells, 2));
    merged.insert(merged.end(), base.begin(), base.end());
    std::sort(merged.begin(), merged.end());
    std::vector<double> out;
    for (double b : merged) {
        if (!(b > 0.0) || !std::isfinite(b)) continue;
        if (!out.empty() && b - out.back() <= 1e-12 * std::max(1.0, b)) continue;
        out.push_back(b);
    }
    return out;
}

std::vector<double> discretize(const PiecewiseWealth& w, const std::vector<GridCell>& cells) {
    std::vector<double> values;
    values.reserve(cells.size());
    for (const auto& c : cells) values.push_back(w(c.zbar));
    return values;
}

double grid_price(const GridProblem& p, const std::vector<double>& values) {
    double total = 0.0;
    for (std::size_t k = 0; k < p.cells.size(); ++k) {
        total += p.cells[k].mass * p.cells[k].zbar * values[k];
    }
    return total;
}

double grid_utility(const GridProblem& p, const std::vector<double>& values) {
    double total = 0.0;
    for (std::size_t k = 0; k < p.cells.size(); ++k) {
        total += p.cells[k].mass * crra_utility(values[k], p.gamma);
    }
    return total;
}

GridSolution solve_on_set(const GridProblem& p, const std::vector<char>& selected) {
    const std::size_t n = p.cells.size();
    if (selected.size() != n) throw std::invalid_argument("solve_on_set: selection size mismatch");
    GridSolution sol;
    sol.selected = selected;
    sol.values.assign(n, 0.0);

    if (p.gamma == 1.0) {
        std::vector<double> ytilde, mass;
        double free_mass = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (selected[k]) {
                ytilde.push_back(p.cells[k].floor_value * p.cells[k].zbar);
                mass.push_back(p.cells[k].mass);
            } else {
                free_mass += p.cells[k].mass;
            }
        }
        double lambda = solve_log_budget(ytilde, mass, free_mass, p.budget);
        if (!(lambda > 0.0)) {
            throw InfeasibleError("solve_on_set: budget leaves no wealth off the constraint set");
        }
        sol.lambda = lambda;
        for (std::size_t k = 0; k < n; ++k) {
            double yt = p.cells[k].floor_value * p.cells[k].zbar;
            double coeff = selected[k] ? std::max(yt, lambda) : lambda;
            sol.values[k] = coeff / p.cells[k].zbar;
        }
    } else {
        // Power utility: x_k = max{Y_k 1{selected}, (lambda zbar_k)^{-1/gamma}}.
        // The floor at cell k activates for lambda >= U'(Y_k)/zbar_k; walk the
        // regimes in threshold order and solve each closed form.
        struct Entry {
            double threshold;
            double cost;   // m zbar Y
            double merton; // m zbar^{1-1/gamma}
            std::size_t idx;
        };
        std::vector<Entry> entries;
        double merton_total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double mert = p.cells[k].mass * std::pow(p.cells[k].zbar, 1.0 - 1.0 / p.gamma);
            merton_total += mert;
            if (selected[k] && p.cells[k].floor_value > 0.0) {
                double thr = std::pow(p.cells[k].floor_value, -p.gamma) / p.cells[k].zbar;
                entries.push_back(Entry{thr, p.cells[k].mass * p.cells[k].zbar * p.cells[k].floor_value,
                                        mert, k});
            }
        }
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.threshold < b.threshold; });

        double floor_cost = 0.0;       // sum of active floor prices
        double merton_mass = merton_total;
        double lambda = -1.0;
        // Regime j: entries[0..j) active; valid for lambda in [thr_{j-1}, thr_j).
        for (std::size_t j = 0; j <= entries.size(); ++j) {
            double lo = (j == 0) ? 0.0 : entries[j - 1].threshold;
            double hi = (j < entries.size()) ? entries[j].threshold : kInfinity;
            double remaining = p.budget - floor_cost;
            if (remaining > 0.0 && merton_mass > 0.0) {
                double cand = std::pow(merton_mass / remaining, p.gamma);
                if (cand >= lo * (1.0 - 1e-12) && cand < hi * (1.0 + 1e-12)) {
                    lambda = cand;
                    break;
                }
            }
            if (j < entries.size()) {
                floor_cost += entries[j].cost;
                merton_mass -= entries[j].merton;
            }
        }
        if (!(lambda > 0.0)) {
            std::ostringstream msg;
            msg << "solve_on_set: budget " << p.budget
                << " cannot fund the floor; minimal feasible budget is " << floor_cost;
            throw InfeasibleError(msg.str());
        }
        sol.lambda = lambda;
        for (std::size_t k = 0; k < n; ++k) {
            double merton = std::pow(lambda * p.cells[k].zbar, -1.0 / p.gamma);
            sol.values[k] = selected[k] ? std::max(p.cells[k].floor_value, merton) : merton;
        }
    }
    sol.utility = grid_utility(p, sol.values);
    return sol;
}

GridSolution solve_floor(const GridProblem& p) {
    if (p.alpha != 1.0) throw std::invalid_argument("solve_floor: requires alpha = 1");
    return solve_on_set(p, std::vector<char>(p.cells.size(), 1));
}

GridSolution solve_partial(const GridProblem& p) {
    if (p.gamma != 1.0) throw std::invalid_argument("solve_partial: stated for log utility only");
    const std::size_t n = p.cells.size();
    // Order by Ytilde = Y * Z (cheapest-to-beat first), ties to lower index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double ya = p.cells[a].floor_value * p.cells[a].zbar;
        double yb = p.cells[b].floor_value * p.cells[b].zbar;
        if (ya != yb) return ya < yb;
        return a < b;
    });
    std::vector<char> selected(n, 0);
    double acc = 0.0;
    for (std::size_t j = 0; j < n && acc < p.alpha - 1e-12; ++j) {
        selected[order[j]] = 1;
        acc += p.cells[order[j]].mass;
    }
    return solve_on_set(p, selected);
}

DeviationReport deviation_search(const GridProblem& p, const std::vector<double>& candidate) {
    const std::size_t n = p.cells.size();
    if (candidate.size() != n) throw std::invalid_argument("deviation_search: candidate size mismatch");

    double cand_price = grid_price(p, candidate);
    if (std::abs(cand_price - p.budget) > 1e-8 * std::max(1.0, p.budget)) {
        std::ostringstream msg;
        msg << "deviation_search: candidate infeasible, price " << cand_price
            << " differs from budget " << p.budget;
        throw InfeasibleError(msg.str());
    }
    double beat_mass = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (candidate[k] >= p.cells[k].floor_value * (1.0 - 1e-10) - 1e-14) beat_mass += p.cells[k].mass;
    }
    if (beat_mass < p.alpha - 1e-9) {
        std::ostringstream msg;
        msg << "deviation_search: candidate infeasible, beats the floor on mass " << beat_mass
            << " < alpha = " << p.alpha;
        throw InfeasibleError(msg.str());
    }

    GridSolution best;
    if (p.gamma == 1.0) {
        best = solve_partial(p);
    } else {
        // Power utility: the optimal constraint set is a z-band at one end of the
        // state space; try both ends and keep the better response.
        auto band = [&](bool from_low) {
            std::vector<char> sel(n, 0);
            double acc = 0.0;
            if (from_low) {
                for (std::size_t k = 0; k < n && acc < p.alpha - 1e-12; ++k) {
                    sel[k] = 1;
                    acc += p.cells[k].mass;
                }
            } else {
                for (std::size_t k = n; k-- > 0 && acc < p.alpha - 1e-12;) {
                    sel[k] = 1;
                    acc += p.cells[k].mass;
                }
            }
            return sel;
        };
        GridSolution low = solve_on_set(p, band(true));
        GridSolution high = solve_on_set(p, band(false));
        best = (low.utility >= high.utility) ? low : high;
    }

    DeviationReport report;
    report.eu_candidate = grid_utility(p, candidate);
    report.eu_best = best.utility;
    report.improvement = report.eu_best - report.eu_candidate;
    report.improvement_ce = certainty_equivalent(report.eu_best, p.gamma) -
                            certainty_equivalent(report.eu_candidate, p.gamma);
    return report;
}

} // namespace nashvar
