#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nashvar/market.hpp"
#include "nashvar/two_agent_log.hpp"

namespace nashvar {

enum class PowerCase {
    Unconstrained, // both agents hold the Merton wealth
    CaseA,         // gamma < 1, constrained band is the upper z-interval
    CaseB,         // gamma > 1, constrained band is the lower z-interval
    Infeasible,    // outside the covered parameter region
};

struct PowerSolveReport {
    PowerCase feasibility_case = PowerCase::Infeasible;
    std::optional<PiecewiseWealth> wealth1;
    std::optional<PiecewiseWealth> wealth2;
    double lambda2 = 0.0;        // agent 2's budget multiplier
    double kappa = 0.0;          // U'(x0_1 / eps_gamma)
    double eta2 = 0.0;           // Lagrangian indicator weight
    double split_quantile = 0.0; // z_{1-alpha2} (CaseA) or z_{alpha2} (CaseB)
    double epsilon_gamma = 0.0;  // E[Z^{1-1/gamma}]
    std::string violated;        // the inequality that failed, for Infeasible
};

// Two-agent power-utility game. Requires gamma > 0, gamma != 1 and
// beta1 beta2 < 1.
PowerSolveReport solve_power2(const GameSpec2& g, const LognormalLaw& law);

struct LagrangianCheck {
    std::string name;
    bool pass = false;
    double residual = 0.0;
};

struct LagrangianReport {
    std::vector<LagrangianCheck> checks;
    bool all_pass = false;
};

// Verifies the Lagrangian certificate of a CaseA/CaseB report: eta2 sign, the
// root F(z*) = 0, the root f(kappa beta1^{-gamma}) = 0, the sign of f' beyond
// that root, and the pointwise argmax property of X2* on a z-grid.
LagrangianReport verify_lagrangian(const PowerSolveReport& r, const LognormalLaw& law,
                                   const GameSpec2& g);

} // namespace nashvar
