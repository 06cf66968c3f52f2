#pragma once

#include "swipt/errors.hpp"

namespace swipt {

// Link-level constants.  tx_power_avg doubles as the fixed transmit power P
// when the transmitter has no channel knowledge.  noise_power is the receiver
// processing noise sigma2; harvest_efficiency is the energy-transducer loss xi.
struct LinkParams {
    double tx_power_avg = 0.1;
    double tx_power_peak = 0.2;
    double noise_power = 1e-8;
    double harvest_efficiency = 0.5;
};

void validate(const LinkParams& params);

// Transmitter channel knowledge: fixed transmit power without CSIT, adaptive
// power control with CSIT.
enum class CsitMode { no_csit, csit };

// Outcome of one fading state: transmit power p, fraction split_id of the
// received power routed to the decoder, and the induced rate (nats per
// channel use) and harvested power (watts, efficiency included).  For the
// ideal-receiver bound split_id stays 1 while energy still counts the full
// received power; elsewhere energy = xi*(1-split_id)*h*p.
struct StateDecision {
    double power = 0.0;
    double split_id = 1.0;
    double rate = 0.0;
    double energy = 0.0;
};

// r = ln(1 + alpha*h*p/sigma2), in nats.
double rate(double h, double p, double alpha, double sigma2);

// Q = xi*(1-alpha)*h*p, in watts.
double energy(double h, double p, double alpha, double xi);

// Bundle (p, alpha) with the rate and harvested power they induce.
StateDecision make_state_decision(double h, double p, double alpha, const LinkParams& params);

// --- fixed transmit power (no CSIT) ------------------------------------

// Optimal splitting ratio for energy price lambda: decode min(hP, 1/lambda -
// sigma2) of the received power, harvest the rest.  lambda = 0 means no
// energy demand (alpha = 1); lambda above 1/sigma2 admits no maximizer.
double dps_alpha_no_csit(double h, double P, double sigma2, double lambda);

// Gain threshold h_bar solving ln(1 + h*P/sigma2) = lambda_ts*h*P; below it a
// time-switching receiver decodes, above it it harvests.
double ts_threshold_no_csit(double P, double sigma2, double lambda_ts,
                            double root_tol = 1e-10);

// On-off split at fixed power: alpha = 1 if h <= h_bar else 0.
StateDecision ts_policy_no_csit(double h, double P, double sigma2, double lambda_ts);

// --- power control (CSIT) -----------------------------------------------

// Joint (p, alpha) maximizer of the per-state Lagrangian with energy price
// lambda and power price beta.  Two-case, four-branch closed form; degenerate
// lambda = 0 and/or beta = 0 reduce to their analytic limits (peak power /
// capped water-filling).
StateDecision dps_policy_with_csit(double h, const LinkParams& params, double lambda, double beta);

// Largest root h_hat of ln(h/(beta*sigma2)) - 1 + beta*sigma2/h
// - lambda*h*P_peak + beta*P_peak = 0; above it a time-switching receiver
// harvests at peak power.
double ts_good_state_threshold(const LinkParams& params, double lambda, double beta,
                               double root_tol = 1e-10);

// Gain thresholds of the time-switching CSIT rule for one price pair,
// computed once and applied to many states.
struct TsCsitRule {
    LinkParams params;
    double lambda = 0.0;
    double beta = 0.0;
    double off_below = 0.0;  // beta*sigma2; transmitter off at or below (beta > 0)
    double good_above = 0.0; // peak-power harvesting strictly above
};

TsCsitRule make_ts_csit_rule(const LinkParams& params, double lambda, double beta,
                             double root_tol = 1e-10);

// Time switching with power control: off below the water level, water-filling
// (capped at peak) while decoding in the moderate band, peak-power harvesting
// above h_hat.  lambda = 0 decodes everywhere; beta = 0 transmits at peak and
// splits at the fixed-power threshold.
StateDecision ts_policy_with_csit(double h, const LinkParams& params, double lambda, double beta);
StateDecision ts_policy_with_csit(double h, const TsCsitRule& rule);

// Ideal receiver that decodes and harvests the same signal: power is peak
// above h = beta/lambda, else water-filling against the residual price
// beta - lambda*h.  rate = ln(1+h*p/sigma2) and energy = xi*h*p together.
StateDecision upper_bound_policy(double h, const LinkParams& params, double lambda, double beta);

} // namespace swipt
