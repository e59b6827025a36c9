#pragma once

#include <stdexcept>
#include <string>

namespace nashvar {

// Thrown when a game admits no Nash equilibrium under the requested solver.
struct NoEquilibriumError : std::runtime_error {
    explicit NoEquilibriumError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when parameters fall outside the region the solver's case analysis covers,
// or when a budget cannot fund the constraint at all.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative scheme exhausts its round limit or revisits a state.
struct NonConvergenceError : std::runtime_error {
    explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nashvar
