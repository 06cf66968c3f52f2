#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swipt/fading.hpp"
#include "swipt/region.hpp"
#include "swipt/siso.hpp"

namespace swipt {

// One experiment scenario: link constants, channel model, sampling, solver
// tolerances, and output location.  Defaults reproduce the reference SISO
// scenario (P_avg = 0.1 W, P_peak = 0.2 W, sigma2 = -50 dBm, mean gain -40 dB,
// K = 3, xi = 0.5) traced over the six SISO scheme/CSIT combinations.
struct ScenarioConfig {
    LinkParams link;
    RicianConfig fading;
    int num_states = 100000;
    std::uint64_t seed = 1;
    int n_points = 25;
    std::vector<SchemeId> schemes;
    double bisection_tol = 1e-6;
    double ellipsoid_tol = 1e-5;
    int ellipsoid_max_iters = 500;
    double root_tol = 1e-10;
    double epsilon = 0.1; // subset-sum trimming accuracy
    double eta = 0.1;     // subset-sum early-exit slack
    double bandwidth_hz = 1e7; // presentation only; rates stay per-Hz
    std::string out_dir = "out";
};

ScenarioConfig default_config();

void validate(const ScenarioConfig& cfg);

// Set one field from its textual form.  Keys are the flat snake_case field
// names; values may carry unit suffixes (W, mW, uW, dBm for powers; dB for
// gains and rician_k; Hz/kHz/MHz/GHz for bandwidth).  Scheme lists are
// comma-separated tokens as accepted by parse_scheme_token.  Unknown keys and
// malformed values raise config_error.
void apply_key(ScenarioConfig& cfg, const std::string& key, const std::string& value);

// Environment overrides: for every known key, SWIPT_<KEY-in-upper-case>
// replaces the configured value (e.g. SWIPT_SEED=7).  Applied after the file,
// before validation, so CI can retarget a run without editing configs.
void apply_env_overrides(ScenarioConfig& cfg);

// defaults -> file -> environment -> validate.  The file holds `key = value`
// lines; blank lines and text after '#' are ignored.  Parse and validation
// failures carry the file name and line number.
ScenarioConfig load_config(const std::string& path);

// Solver knobs subset, in the shape trace_boundary consumes.
SolveOptions solve_options(const ScenarioConfig& cfg);

// Canonical `key = value` echo of every field (one per line), suitable for
// run summaries and for re-loading.
std::string render_config(const ScenarioConfig& cfg);

} // namespace swipt
