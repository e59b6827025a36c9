#pragma once

#include <optional>
#include <vector>

#include "nashvar/market.hpp"
#include "nashvar/two_agent_log.hpp"

namespace nashvar {

// Band {c1 < Z_T < c2} underlying a digital claim Z_T^{-1} 1{c1 < Z_T < c2}.
struct DigitalBand {
    double c1 = 0.0;
    double c2 = kInfinity;

    DigitalBand() = default;
    DigitalBand(double c1_, double c2_);
};

// Market state along a path: time, Brownian value and the state price density
// Z_t reconstructed exactly from it.
struct PathState {
    double t = 0.0;
    double z = 1.0;
    std::vector<double> brownian;
};

PathState make_path_state(const MarketParams& m, double t, std::vector<double> brownian);

struct PortfolioPoint {
    double wealth = 0.0;
    std::vector<double> amounts; // money in each stock
};

// Replicating wealth-portfolio pair of the unit digital claim on the band;
// requires state.t < horizon.
PortfolioPoint digital_pair(const DigitalBand& band, const PathState& state,
                            const MarketParams& m);

// Replicating pair for the family-case equilibrium wealth of agent 2 with
// A2 = {c1 < Z_T < c2}: lambda2/Z_T off the band, beta1 x0_1 / Z_T on it.
PortfolioPoint equilibrium_pair(const GameSpec2& g, const DigitalBand& band,
                                const PathState& state, const MarketParams& m);

// A claim expressed through one band: coefficient of 1/Z_T outside and inside.
// target_coeff/Z_T is the competitor target recorded with each simulated path
// (0 when not applicable).
struct ReplicationClaim {
    double outside_coeff = 0.0;
    double inside_coeff = 1.0;
    DigitalBand band;
    double target_coeff = 0.0;
};

ReplicationClaim claim_from_equilibrium(const GameSpec2& g, const DigitalBand& band,
                                        const LognormalLaw& law);

// Closed-form pair of a band claim at one state (t < horizon).
PortfolioPoint replication_pair(const ReplicationClaim& claim, const PathState& state,
                                const MarketParams& m);

// Terminal payoff of a band claim.
double claim_payoff(const ReplicationClaim& claim, double z_T);

struct PathPoint {
    double t = 0.0;
    double z = 0.0;
    double wealth_closed = 0.0;
    double wealth_self = 0.0;
    bool capped = false;
    std::vector<double> amounts;
};

struct StrategyPath {
    int path_index = 0;
    double terminal_payoff_target = 0.0;
    std::vector<PathPoint> points;
};

struct SimulationOptions {
    int steps = 500;
    int n_paths = 1;
    std::uint64_t seed = 0;
    double amount_cap = 1e6;
    int max_threads = 0; // 0: hardware concurrency, capped by NASHVAR_THREADS
};

// Simulates Brownian paths, evaluates the closed-form pair on the exact Z_t at
// every grid time and integrates the self-financing wealth with exact lognormal
// stock increments. Paths are deterministic functions of (seed, path index).
std::vector<StrategyPath> simulate_paths(const MarketParams& m, const ReplicationClaim& claim,
                                         const SimulationOptions& options);

} // namespace nashvar
