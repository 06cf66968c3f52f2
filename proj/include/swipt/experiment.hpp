#pragma once

#include <string>

#include "swipt/config.hpp"
#include "swipt/region.hpp"

namespace swipt {

// CSV image of a traced boundary: fixed header
// q_target_watts,avg_energy_watts,avg_rate_bits,lambda_star,beta_star,iterations
// with doubles printed to 17 significant digits, so text -> double recovers
// bit-identical values.
std::string boundary_to_csv(const REBoundary& boundary);

// Inverse of boundary_to_csv for the given scheme; rejects a mismatched
// header or malformed rows with config_error.
REBoundary boundary_from_csv(const SchemeId& id, const std::string& csv);

// Run one scenario end to end: sample the shared fading ensemble, trace every
// configured scheme (each trace parallelizes internally; writes stay
// serialized), and emit into cfg.out_dir
//   re_<scheme>.csv        one per scheme
//   summary.txt            config echo, corner points, ordering/concavity
//                          checks, subset-selection diagnostics
//   plot_re_region.py      matplotlib script consuming the CSVs
// Returns 0 on success.  On a solver or I/O failure returns 1; if every trace
// succeeds but an ordering or concavity invariant is violated returns 2.  In
// both failure cases run_error.txt records error_type, message, and the
// schemes completed so far as `key = value` lines.
int run_experiment(const ScenarioConfig& cfg);

} // namespace swipt
