#pragma once

#include <stdexcept>
#include <string>

namespace swipt {

// Bad call arguments: negative powers, ratios outside [0,1], etc.
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Config file problems: unknown keys, bad units, violated invariants.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dual variable outside the range where the per-state maximizer exists
// (e.g. an energy price at or above 1/sigma2).
struct infeasible_dual_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested average-energy target outside the achievable region.
struct infeasible_target_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver exhausted its budget before meeting its tolerances.
// Carries the last dual iterate so the caller can log where it stalled.
struct convergence_error : std::runtime_error {
    double last_lambda = 0.0;
    double last_beta = 0.0;
    double residual = 0.0;
    convergence_error(const std::string& what, double lambda, double beta, double res)
        : std::runtime_error(what), last_lambda(lambda), last_beta(beta), residual(res) {}
};

// Problem size beyond a hard cap (e.g. exhaustive search over 2^M subsets).
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Boundary comparison impossible (no overlapping energy support).
struct comparison_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace swipt
