#include "swipt/fading.hpp"

#include <cmath>

namespace swipt {

void validate(const RicianConfig& cfg) {
    if (std::isnan(cfg.rician_k) || cfg.rician_k < 0.0)
        throw config_error("rician_k must be >= 0");
    if (!(cfg.mean_power_gain > 0.0) || !std::isfinite(cfg.mean_power_gain))
        throw config_error("mean_power_gain must be positive and finite");
    if (cfg.num_antennas < 1)
        throw config_error("num_antennas must be >= 1");
    if (!std::isfinite(cfg.ula_phase))
        throw config_error("ula_phase must be finite");
}

double FadingEnsemble::total_gain(int state) const {
    return swipt::total_gain(row(state));
}

double total_gain(std::span<const double> state_gains) {
    double sum = 0.0;
    for (double g : state_gains) {
        if (g < 0.0) throw argument_error("channel power gains must be >= 0");
        sum += g;
    }
    return sum;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// SplitMix64 finalizer.  Keyed by (seed, counter) below; statistically solid
// for Monte Carlo channel draws and fully order-independent.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform draw in (0,1]: the +1 keeps log() below finite.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = mix64(seed ^ mix64(counter)) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1p-53;
}

// One channel power gain h_m = |LOS + scatter|^2 via Box-Muller.
double gain_draw(const RicianConfig& cfg, std::uint64_t seed, std::uint64_t state, int antenna) {
    double los_power, scatter_var;
    if (std::isinf(cfg.rician_k)) {
        los_power = cfg.mean_power_gain;
        scatter_var = 0.0;
    } else {
        los_power = cfg.mean_power_gain * cfg.rician_k / (cfg.rician_k + 1.0);
        scatter_var = cfg.mean_power_gain / (cfg.rician_k + 1.0);
    }
    const double phase = static_cast<double>(antenna) * cfg.ula_phase;

    const std::uint64_t ctr = 2 * (state * static_cast<std::uint64_t>(cfg.num_antennas) + antenna);
    const double u1 = uniform01(seed, ctr);
    const double u2 = uniform01(seed, ctr + 1);
    const double amp = std::sqrt(-2.0 * std::log(u1));
    // CSCG scatter: real/imag each N(0, scatter_var/2)
    const double s = std::sqrt(scatter_var * 0.5);
    const double re = std::sqrt(los_power) * std::cos(phase) + s * amp * std::cos(kTwoPi * u2);
    const double im = std::sqrt(los_power) * std::sin(phase) + s * amp * std::sin(kTwoPi * u2);
    return re * re + im * im;
}

FadingEnsemble make_ensemble(const RicianConfig& cfg, int num_states) {
    validate(cfg);
    if (num_states < 1) throw config_error("num_states must be >= 1");
    FadingEnsemble ens;
    ens.num_states = num_states;
    ens.num_antennas = cfg.num_antennas;
    ens.gains.resize(static_cast<std::size_t>(num_states) * cfg.num_antennas);
    return ens;
}

} // namespace

FadingEnsemble sample_rician(const RicianConfig& cfg, int num_states, std::uint64_t seed) {
    FadingEnsemble ens = make_ensemble(cfg, num_states);
    const int m_count = cfg.num_antennas;
#pragma omp parallel for schedule(static)
    for (int s = 0; s < num_states; ++s) {
        for (int m = 0; m < m_count; ++m)
            ens.gains[static_cast<std::size_t>(s) * m_count + m] =
                gain_draw(cfg, seed, static_cast<std::uint64_t>(s), m);
    }
    return ens;
}

FadingEnsemble sample_rician_serial(const RicianConfig& cfg, int num_states, std::uint64_t seed) {
    FadingEnsemble ens = make_ensemble(cfg, num_states);
    const int m_count = cfg.num_antennas;
    for (int s = 0; s < num_states; ++s)
        for (int m = 0; m < m_count; ++m)
            ens.gains[static_cast<std::size_t>(s) * m_count + m] =
                gain_draw(cfg, seed, static_cast<std::uint64_t>(s), m);
    return ens;
}

} // namespace swipt
