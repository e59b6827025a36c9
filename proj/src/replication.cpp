#include "nashvar/replication.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nashvar/normal.hpp"
#include "nashvar/rng.hpp"

namespace nashvar {

DigitalBand::DigitalBand(double c1_, double c2_) : c1(c1_), c2(c2_) {
    if (!(c1 >= 0.0) || !(c2 > c1)) {
        throw std::invalid_argument("DigitalBand: requires 0 <= c1 < c2");
    }
}

PathState make_path_state(const MarketParams& m, double t, std::vector<double> brownian) {
    if (brownian.size() != static_cast<std::size_t>(m.num_assets)) {
        throw std::invalid_argument("make_path_state: Brownian dimension mismatch");
    }
    double tw = 0.0;
    for (int i = 0; i < m.num_assets; ++i) tw += m.theta()[i] * brownian[i];
    double z = std::exp(-tw - 0.5 * m.theta_norm() * m.theta_norm() * t);
    return PathState{t, z, std::move(brownian)};
}

namespace {

struct BandTerms {
    double value;    // Phi(f(c2)) - Phi(f(c1)), scaled by 1/Z in the pair
    double pdf_term; // pdf(f(c2)) - pdf(f(c1))
};

// f(c,t) = (ln c - ln Z_t + theta^2 (T-t)/2) / (theta sqrt(T-t)); limits at
// c = 0 and c = inf give Phi -> {0,1} and pdf -> 0.
BandTerms band_terms(const DigitalBand& band, double z, double t, double theta_norm, double T) {
    double sq = theta_norm * std::sqrt(T - t);
    auto f = [&](double c) { return (std::log(c) - std::log(z) + 0.5 * theta_norm * theta_norm * (T - t)) / sq; };
    double cdf_hi = 1.0, pdf_hi = 0.0, cdf_lo = 0.0, pdf_lo = 0.0;
    if (band.c2 != kInfinity) {
        double fhi = f(band.c2);
        cdf_hi = norm_cdf(fhi);
        pdf_hi = norm_pdf(fhi);
    }
    if (band.c1 > 0.0) {
        double flo = f(band.c1);
        cdf_lo = norm_cdf(flo);
        pdf_lo = norm_pdf(flo);
    }
    return BandTerms{cdf_hi - cdf_lo, pdf_hi - pdf_lo};
}

} // namespace

PortfolioPoint digital_pair(const DigitalBand& band, const PathState& state,
                            const MarketParams& m) {
    if (!(state.t < m.horizon)) {
        throw std::invalid_argument("digital_pair: requires t < horizon (use the payoff at T)");
    }
    BandTerms bt = band_terms(band, state.z, state.t, m.theta_norm(), m.horizon);
    double wealth = bt.value / state.z;
    double scalar = wealth + bt.pdf_term / (state.z * m.theta_norm() * std::sqrt(m.horizon - state.t));
    PortfolioPoint p;
    p.wealth = wealth;
    p.amounts.resize(m.num_assets);
    for (int i = 0; i < m.num_assets; ++i) p.amounts[i] = scalar * m.merton_direction()[i];
    return p;
}

ReplicationClaim claim_from_equilibrium(const GameSpec2& g, const DigitalBand& band,
                                        const LognormalLaw& law) {
    if (g.gamma != 1.0) throw std::invalid_argument("claim_from_equilibrium: log utility only");
    if (!(g.alpha2 < 1.0) || !(g.x02 < g.beta1 * g.x01)) {
        throw std::invalid_argument(
            "claim_from_equilibrium: requires the free-set family case (x0_2 < beta1 x0_1, alpha2 < 1)");
    }
    double prob = cdf(law, band.c2) - cdf(law, band.c1);
    if (std::abs(prob - g.alpha2) > 1e-10) {
        std::ostringstream msg;
        msg << "claim_from_equilibrium: band probability " << prob << " differs from alpha2 = " << g.alpha2;
        throw std::invalid_argument(msg.str());
    }
    double lambda2 = (g.x02 - g.alpha2 * g.beta1 * g.x01) / (1.0 - g.alpha2);
    if (!(lambda2 > 0.0)) {
        throw std::invalid_argument("claim_from_equilibrium: lambda2 must be positive");
    }
    return ReplicationClaim{lambda2, g.beta1 * g.x01, band, g.beta1 * g.x01};
}

PortfolioPoint equilibrium_pair(const GameSpec2& g, const DigitalBand& band,
                                const PathState& state, const MarketParams& m) {
    ReplicationClaim claim = claim_from_equilibrium(g, band, law_from_market(m));
    PortfolioPoint inside = digital_pair(band, state, m);
    // The complement of the band is the two outer digitals; their pair is the
    // Merton pair minus the in-band pair (band additivity).
    PortfolioPoint merton = digital_pair(DigitalBand(0.0, kInfinity), state, m);
    PortfolioPoint p;
    p.wealth = claim.outside_coeff * (merton.wealth - inside.wealth) + claim.inside_coeff * inside.wealth;
    p.amounts.resize(m.num_assets);
    for (int i = 0; i < m.num_assets; ++i) {
        p.amounts[i] = claim.outside_coeff * (merton.amounts[i] - inside.amounts[i]) +
                       claim.inside_coeff * inside.amounts[i];
    }
    return p;
}

PortfolioPoint replication_pair(const ReplicationClaim& claim, const PathState& state,
                                const MarketParams& m) {
    PortfolioPoint inside = digital_pair(claim.band, state, m);
    PortfolioPoint merton = digital_pair(DigitalBand(0.0, kInfinity), state, m);
    PortfolioPoint p;
    p.wealth = claim.outside_coeff * (merton.wealth - inside.wealth) + claim.inside_coeff * inside.wealth;
    p.amounts.resize(m.num_assets);
    for (int i = 0; i < m.num_assets; ++i) {
        p.amounts[i] = claim.outside_coeff * (merton.amounts[i] - inside.amounts[i]) +
                       claim.inside_coeff * inside.amounts[i];
    }
    return p;
}

double claim_payoff(const ReplicationClaim& claim, double z_T) {
    bool in_band = z_T > claim.band.c1 && z_T < claim.band.c2;
    return (in_band ? claim.inside_coeff : claim.outside_coeff) / z_T;
}

namespace {

StrategyPath simulate_one(const MarketParams& m, const ReplicationClaim& claim,
                          const SimulationOptions& opt, int path_index) {
    const int d = m.num_assets;
    const double T = m.horizon;
    const double dt = T / opt.steps;
    const double sqdt = std::sqrt(dt);

    Philox rng(opt.seed, static_cast<std::uint64_t>(path_index));

    StrategyPath path;
    path.path_index = path_index;

    std::vector<double> w(d, 0.0);
    std::vector<double> stock(d, 1.0);
    std::vector<double> drift_adj(d);
    for (int i = 0; i < d; ++i) {
        double var = 0.0;
        for (int l = 0; l < d; ++l) var += m.volatility[i * d + l] * m.volatility[i * d + l];
        drift_adj[i] = (m.drift[i] - 0.5 * var) * dt;
    }

    PathState state = make_path_state(m, 0.0, w);
    PortfolioPoint pair = replication_pair(claim, state, m);
    double self_wealth = pair.wealth;

    for (int k = 0; k <= opt.steps; ++k) {
        double t = (k == opt.steps) ? T : k * dt;
        PathPoint point;
        point.t = t;
        point.z = state.z;
        if (k == opt.steps) {
            point.wealth_closed = claim_payoff(claim, state.z);
            point.wealth_self = self_wealth;
            point.amounts.assign(d, 0.0);
            path.points.push_back(std::move(point));
            break;
        }
        point.wealth_closed = pair.wealth;
        point.wealth_self = self_wealth;
        point.amounts = pair.amounts;
        for (double& a : point.amounts) {
            if (std::abs(a) > opt.amount_cap) {
                a = std::copysign(opt.amount_cap, a);
                point.capped = true;
            }
        }
        path.points.push_back(point);

        // Exact lognormal stock increments; the Brownian increment drives both
        // the stocks and the exact Z update.
        std::vector<double> dw(d);
        for (int l = 0; l < d; ++l) dw[l] = sqdt * rng.next_normal();
        double gain = 0.0;
        for (int i = 0; i < d; ++i) {
            double diff = 0.0;
            for (int l = 0; l < d; ++l) diff += m.volatility[i * d + l] * dw[l];
            double ratio = std::exp(drift_adj[i] + diff);
            gain += path.points.back().amounts[i] * (ratio - 1.0);
            stock[i] *= ratio;
        }
        self_wealth += gain;
        for (int l = 0; l < d; ++l) w[l] += dw[l];

        double t_next = (k + 1 == opt.steps) ? T : (k + 1) * dt;
        state = make_path_state(m, t_next, w);
        if (k + 1 < opt.steps) pair = replication_pair(claim, state, m);
    }

    path.terminal_payoff_target =
        (claim.target_coeff > 0.0) ? claim.target_coeff / state.z : 0.0;
    return path;
}

int thread_budget(int max_threads, int n_paths) {
    int n = max_threads;
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
    }
    if (const char* env = std::getenv("NASHVAR_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, std::min(n, n_paths));
}

} // namespace

std::vector<StrategyPath> simulate_paths(const MarketParams& m, const ReplicationClaim& claim,
                                         const SimulationOptions& options) {
    if (options.steps < 2) throw std::invalid_argument("simulate_paths: steps must be at least 2");
    if (options.n_paths < 1) throw std::invalid_argument("simulate_paths: n_paths must be positive");
    if (!(claim.outside_coeff >= 0.0) || !(claim.inside_coeff >= 0.0)) {
        throw std::invalid_argument("simulate_paths: claim coefficients must be nonnegative");
    }
    law_from_market(m); // rejects degenerate markets up front

    std::vector<StrategyPath> paths(options.n_paths);
    int n_threads = thread_budget(options.max_threads, options.n_paths);
    if (n_threads == 1) {
        for (int p = 0; p < options.n_paths; ++p) paths[p] = simulate_one(m, claim, options, p);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w]() {
                for (int p = w; p < options.n_paths; p += n_threads) {
                    paths[p] = simulate_one(m, claim, options, p);
                }
            });
        }
        for (auto& th : workers) th.join();
    }
    return paths;
}

} // namespace nashvar
