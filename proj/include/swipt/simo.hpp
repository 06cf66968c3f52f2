#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "swipt/duality.hpp"
#include "swipt/errors.hpp"
#include "swipt/fading.hpp"
#include "swipt/siso.hpp"

namespace swipt {

// Split of the receive antennas into a decoding set and a harvesting set,
// encoded as a bitmask (bit m set: antenna m routes to the decoder).
struct AntennaPartition {
    std::uint64_t id_mask = 0;
    int num_antennas = 0;

    bool decodes(int m) const { return (id_mask >> m) & 1u; }
    std::uint64_t all_mask() const {
        return num_antennas >= 64 ? ~0ull : (1ull << num_antennas) - 1ull;
    }
    std::uint64_t eh_mask() const { return ~id_mask & all_mask(); }
};

// ln(1 + sum_m alpha_m*h_m*p / sigma2): rate of maximal-ratio combining over
// the decoder-side fractions.
double mrc_rate(std::span<const double> h, std::span<const double> alpha, double p, double sigma2);

// Rate/energy outcome of transmitting at power p against a fixed antenna
// split; split_id reports the decoder's share of the received power.
StateDecision partition_decision(std::span<const double> h, const AntennaPartition& partition,
                                 double p, const LinkParams& params);

// Uniform power splitting collapses an M-antenna state to its sum gain; the
// single-antenna solvers then apply unchanged and the resulting split ratio
// is used identically on every antenna.
FadingEnsemble ups_reduce(const FadingEnsemble& ens);

// Best decode/harvest antenna split at fixed transmit power P for energy
// price lambda: maximizes ln(1 + sum_ID h_m P / sigma2) + lambda*sum_EH h_m*P
// over all 2^M splits.  Ties go to the lowest bitmask.
AntennaPartition antenna_switch_exhaustive_no_csit(std::span<const double> h, double P,
                                                   double sigma2, double lambda);

// Optimal transmit power for a fixed split: peak when the energy credit
// lambda*sum_EH h_m already outweighs the power price beta, otherwise
// water-filling against the residual price beta - lambda*sum_EH h_m, clamped
// to [0, P_peak].
double antenna_switch_power(const AntennaPartition& partition, std::span<const double> h,
                            double lambda, double beta, const LinkParams& params);

// Joint split + power search: every split priced by its own optimal power.
std::pair<AntennaPartition, double> antenna_switch_exhaustive_csit(std::span<const double> h,
                                                                   const LinkParams& params,
                                                                   double lambda, double beta);

// Per-call instrumentation of subset_select.
struct SubsetStats {
    bool early_exit = false;   // stopped before considering every antenna
    int max_list_size = 0;     // largest trimmed list across stages
    double tau = 0.0;          // target / smallest positive element
    double achieved_sum = 0.0;
    bool size_bound_ok = true; // trimmed lists within the analytic size bound
};

// Trimmed-list subset-sum selection: picks the decoder set whose received
// power is closest to, but not above, target.  epsilon controls the trim
// ratio (1 + epsilon/2M); epsilon = 0 keeps every distinct sum (exhaustive
// mode, only allowed for M <= 20).  eta allows an early stop once some sum
// reaches target/(1+eta).
AntennaPartition subset_select(std::span<const double> received_powers, double target,
                               double epsilon, double eta, SubsetStats* stats = nullptr);

// Low-complexity antenna switching that imitates the uniform-splitting
// optimum: route to the decoder a subset of antennas whose received power
// approximates the decoder share 1/lambda - sigma2 from below.  With CSIT the
// transmit power comes first from the sum-gain power-splitting policy.
StateDecision approx_switching_policy(std::span<const double> h, CsitMode mode,
                                      const DualPoint& duals, const LinkParams& params,
                                      double epsilon = 0.1, double eta = 0.1,
                                      SubsetStats* stats = nullptr);

} // namespace swipt
