#include "nashvar/multi_agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "nashvar/errors.hpp"

namespace nashvar {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

GameSpecN::GameSpecN(std::vector<double> x0_, std::vector<double> alpha_,
                     std::vector<std::vector<double>> beta_)
    : x0(std::move(x0_)), alpha(std::move(alpha_)), beta(std::move(beta_)) {
    const int n_agents = static_cast<int>(x0.size());
    if (n_agents < 3) throw std::invalid_argument("GameSpecN: needs at least 3 agents");
    if (alpha.size() != x0.size() || beta.size() != x0.size()) {
        throw std::invalid_argument("GameSpecN: alpha and beta must match the number of agents");
    }
    for (int i = 0; i < n_agents; ++i) {
        if (!(x0[i] > 0.0)) throw std::invalid_argument("GameSpecN: initial capital must be positive");
        if (!(alpha[i] >= 0.0 && alpha[i] <= 1.0)) throw std::invalid_argument("GameSpecN: alpha must lie in [0,1]");
        if (beta[i].size() != x0.size()) throw std::invalid_argument("GameSpecN: beta must be n x n");
        double row = 0.0;
        for (int j = 0; j < n_agents; ++j) {
            if (!(beta[i][j] >= 0.0 && beta[i][j] <= 1.0)) {
                throw std::invalid_argument("GameSpecN: weights must lie in [0,1]");
            }
            if (j == i && beta[i][j] != 0.0) {
                throw std::invalid_argument("GameSpecN: beta must have a zero diagonal");
            }
            if (j != i) row += beta[i][j];
        }
        if (row > 1.0 + 1e-12) {
            throw std::invalid_argument("GameSpecN: sum_j beta_ij must not exceed 1");
        }
    }

    order.resize(n_agents);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return x0[a] > x0[b]; });
    std::vector<double> x0_s(n_agents), alpha_s(n_agents);
    std::vector<std::vector<double>> beta_s(n_agents, std::vector<double>(n_agents));
    for (int i = 0; i < n_agents; ++i) {
        x0_s[i] = x0[order[i]];
        alpha_s[i] = alpha[order[i]];
        for (int j = 0; j < n_agents; ++j) beta_s[i][j] = beta[order[i]][order[j]];
    }
    x0 = std::move(x0_s);
    alpha = std::move(alpha_s);
    beta = std::move(beta_s);
}

DisjointEquilibrium solve_disjoint(
    const GameSpecN& g, const LognormalLaw& law,
    const std::optional<std::vector<std::optional<ZInterval>>>& user_sets) {
    const int n = g.n();
    double alpha_sum = std::accumulate(g.alpha.begin(), g.alpha.end(), 0.0);
    if (alpha_sum > 1.0 + 1e-12) {
        throw std::invalid_argument("solve_disjoint: sum of alphas exceeds 1 (use solve_partition)");
    }
    for (double a : g.alpha) {
        if (a >= 1.0) throw std::invalid_argument("solve_disjoint: requires alpha_i < 1");
    }

    std::vector<double> lambda = g.x0;
    std::vector<double> last_delta(n, 0.0);
    auto lambda_beta_of = [&](int i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) s += g.beta[i][j] * lambda[j];
        }
        return s;
    };
    auto target = [&](int i, double lb) {
        // x0_i >= lb collapses the update to exactly x0_i.
        if (g.x0[i] >= lb) return g.x0[i];
        return (g.x0[i] - g.alpha[i] * lb) / (1.0 - g.alpha[i]);
    };

    const int max_rounds = 10000;
    int round = 0;
    double residual = kInfinity;
    for (; round < max_rounds; ++round) {
        for (int i = 0; i < n; ++i) {
            double t = target(i, lambda_beta_of(i));
            double delta = t - lambda[i];
            // Damp when the update direction flips to break oscillations.
            if (delta * last_delta[i] < 0.0) t = 0.5 * (t + lambda[i]);
            last_delta[i] = delta;
            lambda[i] = t;
        }
        residual = 0.0;
        for (int i = 0; i < n; ++i) {
            residual = std::max(residual, std::abs(lambda[i] - target(i, lambda_beta_of(i))));
        }
        if (residual <= 1e-13) break;
    }
    if (residual > 1e-12) {
        std::ostringstream msg;
        msg << "solve_disjoint: no fixed point after " << round
            << " rounds, residual " << residual;
        throw NoEquilibriumError(msg.str());
    }

    DisjointEquilibrium eq;
    eq.iterations = round + 1;
    eq.residual = residual;
    eq.lambdas = lambda;
    eq.lambda_beta.resize(n);
    for (int i = 0; i < n; ++i) {
        eq.lambda_beta[i] = lambda_beta_of(i);
        if (!(lambda[i] > 0.0)) {
            std::ostringstream msg;
            msg << "solve_disjoint: lambda_" << (i + 1) << " = " << lambda[i]
                << " <= 0 (alpha_i lambda_beta exceeds x0_i)";
            throw NoEquilibriumError(msg.str());
        }
        if (g.alpha[i] * eq.lambda_beta[i] > g.x0[i] + 1e-12) {
            std::ostringstream msg;
            msg << "solve_disjoint: alpha_" << (i + 1) << " lambda_beta = "
                << g.alpha[i] * eq.lambda_beta[i] << " exceeds x0 = " << g.x0[i];
            throw NoEquilibriumError(msg.str());
        }
    }

    if (user_sets) {
        if (static_cast<int>(user_sets->size()) != n) {
            throw std::invalid_argument("solve_disjoint: need one set per agent");
        }
        double mass_seen = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& s = (*user_sets)[i];
            if (!s) {
                if (g.alpha[i] > 1e-10) throw std::invalid_argument("solve_disjoint: missing set for alpha_i > 0");
                continue;
            }
            double p = cdf(law, s->hi) - cdf(law, s->lo);
            if (std::abs(p - g.alpha[i]) > 1e-10) {
                throw std::invalid_argument("solve_disjoint: user set probability does not match alpha_i");
            }
            for (int j = 0; j < i; ++j) {
                const auto& o = (*user_sets)[j];
                if (o && s->lo < o->hi && o->lo < s->hi) {
                    throw std::invalid_argument("solve_disjoint: user sets must be pairwise disjoint");
                }
            }
            mass_seen += p;
        }
        (void)mass_seen;
        eq.sets = *user_sets;
    } else {
        eq.sets.resize(n);
        double cum = 0.0;
        for (int i = 0; i < n; ++i) {
            if (g.alpha[i] <= 0.0) {
                eq.sets[i] = std::nullopt;
                continue;
            }
            double lo = (cum <= 0.0) ? 0.0 : quantile(law, cum);
            cum += g.alpha[i];
            double hi = (cum >= 1.0) ? kInfinity : quantile(law, cum);
            eq.sets[i] = ZInterval(lo, hi);
        }
    }

    for (int i = 0; i < n; ++i) {
        double on_coeff = std::max(g.x0[i], eq.lambda_beta[i]);
        if (!eq.sets[i]) {
            eq.wealths.push_back(PiecewiseWealth::single(lambda[i], -1.0));
            continue;
        }
        const ZInterval& a = *eq.sets[i];
        std::vector<WealthCell> cells;
        if (a.lo > 0.0) cells.push_back(WealthCell{0.0, a.lo, lambda[i], -1.0});
        cells.push_back(WealthCell{a.lo, a.hi, on_coeff, -1.0});
        if (!a.unbounded()) cells.push_back(WealthCell{a.hi, kInfinity, lambda[i], -1.0});
        eq.wealths.push_back(PiecewiseWealth(std::move(cells)));
    }
    return eq;
}

PartitionBestResponse partition_response_on_set(const std::vector<double>& thresholds,
                                                const std::vector<std::uint8_t>& selected,
                                                double x0) {
    const int m = static_cast<int>(thresholds.size());
    // Budget: sum_{k selected} max{t_k, lam} + (m - #selected) lam = m x0.
    std::vector<double> sel_t;
    for (int k = 0; k < m; ++k) {
        if (selected[k]) sel_t.push_back(thresholds[k]);
    }
    std::sort(sel_t.begin(), sel_t.end(), std::greater<double>());

    const double total = static_cast<double>(m) * x0;
    double fixed = 0.0;
    double free_count = m;
    double lam = total / free_count;
    bool found = sel_t.empty() || lam >= sel_t.front() * (1.0 - 1e-12);
    if (!found) {
        for (std::size_t j = 0; j < sel_t.size(); ++j) {
            fixed += sel_t[j];
            free_count -= 1.0;
            double next_t = (j + 1 < sel_t.size()) ? sel_t[j + 1] : 0.0;
            if (free_count <= 0.0) break;
            lam = (total - fixed) / free_count;
            if (lam <= sel_t[j] * (1.0 + 1e-12) && lam >= next_t * (1.0 - 1e-12)) {
                found = true;
                break;
            }
        }
    }
    if (!found || !(lam > 0.0)) {
        std::ostringstream msg;
        msg << "partition budget " << x0 << " cannot fund the selected thresholds";
        throw InfeasibleError(msg.str());
    }

    PartitionBestResponse br;
    br.multiplier = lam;
    br.indicator.assign(selected.begin(), selected.end());
    br.lambda.resize(m);
    br.objective = 0.0;
    for (int k = 0; k < m; ++k) {
        br.lambda[k] = selected[k] ? std::max(thresholds[k], lam) : lam;
        br.objective += std::log(br.lambda[k]);
    }
    return br;
}

PartitionBestResponse partition_best_response(const std::vector<double>& thresholds,
                                              int ell, double x0) {
    const int m = static_cast<int>(thresholds.size());
    if (ell < 0 || ell > m) throw std::invalid_argument("partition_best_response: bad ell");
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (thresholds[a] != thresholds[b]) return thresholds[a] < thresholds[b];
        return a < b;
    });
    std::vector<std::uint8_t> selected(m, 0);
    for (int j = 0; j < ell; ++j) selected[order[j]] = 1;
    return partition_response_on_set(thresholds, selected, x0);
}

PartitionEquilibrium solve_partition(const GameSpecN& g, const LognormalLaw& law, int m) {
    const int n = g.n();
    if (m < 1) throw std::invalid_argument("solve_partition: m must be positive");

    PartitionEquilibrium eq;
    eq.m = m;
    eq.ell.resize(n);
    for (int i = 0; i < n; ++i) {
        double li = g.alpha[i] * m;
        double rounded = std::round(li);
        if (std::abs(li - rounded) > 1e-9 * std::max(1.0, static_cast<double>(m))) {
            std::ostringstream msg;
            msg << "solve_partition: alpha_" << (i + 1) << " = " << g.alpha[i]
                << " is not a multiple of 1/" << m;
            throw std::invalid_argument(msg.str());
        }
        eq.ell[i] = static_cast<int>(rounded);
    }

    eq.cells.reserve(m);
    double lo = 0.0;
    for (int k = 1; k <= m; ++k) {
        double hi = (k == m) ? kInfinity : quantile(law, static_cast<double>(k) / m);
        eq.cells.push_back(ZInterval(lo, hi));
        lo = hi;
    }

    eq.lambda.assign(m, std::vector<double>(n, 0.0));
    eq.indicator.assign(m, std::vector<std::uint8_t>(n, 0));
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < n; ++i) eq.lambda[k][i] = g.x0[i];
    }

    auto state_hash = [&]() {
        std::uint64_t h = 1469598103934665603ULL;
        for (int k = 0; k < m; ++k) {
            h = fnv1a(eq.lambda[k].data(), n * sizeof(double), h);
            h = fnv1a(eq.indicator[k].data(), n, h);
        }
        return h;
    };

    std::unordered_set<std::uint64_t> seen;
    seen.insert(state_hash());

    const int max_rounds = 1000;
    std::vector<double> thresholds(m);
    for (eq.rounds = 0; eq.rounds < max_rounds; ++eq.rounds) {
        double max_change = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < m; ++k) {
                double t = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j != i) t += g.beta[i][j] * eq.lambda[k][j];
                }
                thresholds[k] = t;
            }
            PartitionBestResponse br = partition_best_response(thresholds, eq.ell[i], g.x0[i]);
            for (int k = 0; k < m; ++k) {
                max_change = std::max(max_change, std::abs(br.lambda[k] - eq.lambda[k][i]));
                eq.lambda[k][i] = br.lambda[k];
                eq.indicator[k][i] = br.indicator[k];
            }
        }
        if (max_change <= 1e-12) {
            eq.converged = true;
            ++eq.rounds;
            break;
        }
        if (!seen.insert(state_hash()).second) {
            eq.converged = false; // cycle: the dynamics revisited a state
            ++eq.rounds;
            break;
        }
    }

    if (eq.converged) {
        for (int i = 0; i < n; ++i) {
            std::vector<WealthCell> cells;
            cells.reserve(m);
            for (int k = 0; k < m; ++k) {
                cells.push_back(WealthCell{eq.cells[k].lo, eq.cells[k].hi, eq.lambda[k][i], -1.0});
            }
            eq.wealths.push_back(PiecewiseWealth(std::move(cells)));
        }
    }
    return eq;
}

namespace {

NashVerification verify_wealth_profile(const std::vector<PiecewiseWealth>& wealths,
                                       const GameSpecN& g, const LognormalLaw& law,
                                       int min_cells, double tolerance) {
    const int n = g.n();
    std::vector<double> boundaries;
    for (const auto& w : wealths) {
        for (const auto& c : w.cells()) {
            if (c.z_hi != kInfinity) boundaries.push_back(c.z_hi);
        }
    }
    std::vector<double> refined = refine_boundaries(law, std::move(boundaries), min_cells);
    std::vector<GridCell> base = build_cells(law, refined);

    NashVerification v;
    v.max_improvement = 0.0;
    v.all_pass = true;
    for (int i = 0; i < n; ++i) {
        std::vector<GridCell> cells = base;
        for (auto& c : cells) {
            double floor = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j != i) floor += g.beta[i][j] * wealths[j](c.zbar);
            }
            c.floor_value = floor;
        }
        GridProblem p(std::move(cells), g.alpha[i], g.x0[i], 1.0);
        std::vector<double> candidate = discretize(wealths[i], p.cells);
        DeviationReport rep = deviation_search(p, candidate);
        NashCheck check{i, rep.improvement, rep.improvement_ce, rep.improvement <= tolerance};
        v.agents.push_back(check);
        v.max_improvement = std::max(v.max_improvement, rep.improvement);
        v.all_pass = v.all_pass && check.pass;
    }
    return v;
}

} // namespace

NashVerification verify_nash_n(const DisjointEquilibrium& eq, const GameSpecN& g,
                               const LognormalLaw& law, int min_cells, double tolerance) {
    return verify_wealth_profile(eq.wealths, g, law, min_cells, tolerance);
}

NashVerification verify_nash_n(const PartitionEquilibrium& eq, const GameSpecN& g,
                               const LognormalLaw& law, int min_cells, double tolerance) {
    if (!eq.converged) throw std::invalid_argument("verify_nash_n: partition dynamics did not converge");
    return verify_wealth_profile(eq.wealths, g, law, min_cells, tolerance);
}

} // namespace nashvar
