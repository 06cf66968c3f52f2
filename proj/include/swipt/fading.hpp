#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swipt/errors.hpp"

namespace swipt {

// Rician block-fading channel description.  mean_power_gain is E[h_m] per
// antenna; rician_k is the LOS-to-scatter power ratio K (K = +inf collapses to
// a pure LOS channel); ula_phase is the phase increment of the LOS steering
// vector between adjacent antennas of the linear array.
struct RicianConfig {
    double rician_k = 3.0;
    double mean_power_gain = 1e-4;
    int num_antennas = 1;
    double ula_phase = -1.5707963267948966; // -pi/2
};

void validate(const RicianConfig& cfg);

// Equal-probability Monte Carlo ensemble of channel power gains, row-major
// num_states x num_antennas.  Every expectation downstream is an arithmetic
// mean over the rows.  Immutable after creation; safe to share across threads.
struct FadingEnsemble {
    int num_states = 0;
    int num_antennas = 0;
    std::vector<double> gains;

    std::span<const double> row(int state) const {
        return {gains.data() + static_cast<std::size_t>(state) * num_antennas,
                static_cast<std::size_t>(num_antennas)};
    }
    double total_gain(int state) const;
};

// Sum of per-antenna gains: the equivalent single-antenna power gain.
double total_gain(std::span<const double> state_gains);

// Draw num_states i.i.d. channel states.  Deterministic in (config,
// num_states, seed); per-state draws use a counter-based generator keyed by
// (seed, state, antenna), so the parallel and serial samplers emit identical
// bits regardless of scheduling.
FadingEnsemble sample_rician(const RicianConfig& cfg, int num_states, std::uint64_t seed);
FadingEnsemble sample_rician_serial(const RicianConfig& cfg, int num_states, std::uint64_t seed);

} // namespace swipt
