#include "swipt/siso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swipt {

void validate(const LinkParams& params) {
    if (!(params.tx_power_avg > 0.0) || !std::isfinite(params.tx_power_avg))
        throw config_error("tx_power_avg must be positive and finite");
    if (!(params.tx_power_peak >= params.tx_power_avg) || !std::isfinite(params.tx_power_peak))
        throw config_error("tx_power_peak must be >= tx_power_avg");
    if (!(params.noise_power > 0.0) || !std::isfinite(params.noise_power))
        throw config_error("noise_power must be positive and finite");
    if (!(params.harvest_efficiency > 0.0) || params.harvest_efficiency > 1.0)
        throw config_error("harvest_efficiency must be in (0,1]");
}

double rate(double h, double p, double alpha, double sigma2) {
    if (!(h >= 0.0) || !(p >= 0.0)) throw argument_error("rate: h and p must be >= 0");
    if (!(alpha >= 0.0) || !(alpha <= 1.0)) throw argument_error("rate: alpha must be in [0,1]");
    if (!(sigma2 > 0.0)) throw argument_error("rate: sigma2 must be > 0");
    return std::log1p(alpha * h * p / sigma2);
}

double energy(double h, double p, double alpha, double xi) {
    if (!(h >= 0.0) || !(p >= 0.0)) throw argument_error("energy: h and p must be >= 0");
    if (!(alpha >= 0.0) || !(alpha <= 1.0)) throw argument_error("energy: alpha must be in [0,1]");
    if (!(xi > 0.0) || xi > 1.0) throw argument_error("energy: xi must be in (0,1]");
    return xi * (1.0 - alpha) * h * p;
}

namespace {

// Bisection on a bracketed sign change, relative tolerance on the interval.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, double rel_tol) {
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // interval exhausted in floating point
        const double f_mid = f(mid);
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

StateDecision make_state_decision(double h, double p, double alpha, const LinkParams& params) {
    StateDecision d;
    d.power = p;
    d.split_id = alpha;
    d.rate = rate(h, p, alpha, params.noise_power);
    d.energy = energy(h, p, alpha, params.harvest_efficiency);
    return d;
}

double dps_alpha_no_csit(double h, double P, double sigma2, double lambda) {
    if (!(h >= 0.0) || !(P > 0.0) || !(sigma2 > 0.0) || !(lambda >= 0.0))
        throw argument_error("dps_alpha_no_csit: bad arguments");
    if (lambda > 1.0 / sigma2)
        throw infeasible_dual_error("dps_alpha_no_csit: lambda above 1/sigma2");
    if (lambda == 0.0 || h == 0.0) return 1.0; // threshold at +inf / no signal
    const double threshold = 1.0 / (lambda * P) - sigma2 / P;
    if (h >= threshold) return 1.0 / (lambda * h * P) - sigma2 / (h * P);
    return 1.0;
}

double ts_threshold_no_csit(double P, double sigma2, double lambda_ts, double root_tol) {
    if (!(P > 0.0) || !(sigma2 > 0.0))
        throw argument_error("ts_threshold_no_csit: bad arguments");
    const double c = lambda_ts * sigma2;
    if (!(c > 0.0) || c >= 1.0)
        throw infeasible_dual_error("ts_threshold_no_csit: no positive root for this lambda");
    // Normalized root of ln(1+x) = c*x with x = h*P/sigma2: f starts positive
    // (slope 1-c at 0) and crosses once since the log grows sublinearly.
    auto f = [c](double x) { return std::log1p(x) - c * x; };
    double lo = 1e-12, hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    while (f(lo) <= 0.0) lo *= 0.5; // paranoia for c very close to 1
    if (!(root_tol > 0.0)) throw argument_error("ts_threshold_no_csit: root_tol must be > 0");
    const double x = bisect(f, lo, hi, f(lo), root_tol);
    return x * sigma2 / P;
}

StateDecision ts_policy_no_csit(double h, double P, double sigma2, double lambda_ts) {
    if (!(h >= 0.0)) throw argument_error("ts_policy_no_csit: h must be >= 0");
    LinkParams params;
    params.tx_power_avg = P;
    params.tx_power_peak = P;
    params.noise_power = sigma2;
    params.harvest_efficiency = 1.0;
    if (lambda_ts == 0.0) return make_state_decision(h, P, 1.0, params); // no energy demand
    if (lambda_ts * sigma2 >= 1.0) return make_state_decision(h, P, 0.0, params); // limit h_bar -> 0
    const double h_bar = ts_threshold_no_csit(P, sigma2, lambda_ts);
    return make_state_decision(h, P, h <= h_bar ? 1.0 : 0.0, params);
}

StateDecision dps_policy_with_csit(double h, const LinkParams& params, double lambda, double beta) {
    validate(params);
    if (!(h >= 0.0) || !(lambda >= 0.0) || !(beta >= 0.0))
        throw argument_error("dps_policy_with_csit: bad arguments");
    const double sigma2 = params.noise_power;
    const double p_peak = params.tx_power_peak;
    if (lambda >= 1.0 / sigma2)
        throw infeasible_dual_error("dps_policy_with_csit: lambda must be below 1/sigma2");

    if (lambda == 0.0) {
        if (beta == 0.0) return make_state_decision(h, p_peak, 1.0, params); // no prices at all
        // pure water-filling, capped at peak
        if (h <= beta * sigma2) return make_state_decision(h, 0.0, 1.0, params);
        return make_state_decision(h, std::min(1.0 / beta - sigma2 / h, p_peak), 1.0, params);
    }

    // h_tilde: the gain above which peak power plus a partial split keeps the
    // decoded power pinned at 1/lambda - sigma2.
    const double h_tilde = (1.0 / lambda - sigma2) / p_peak;

    if (beta <= lambda * h_tilde) {
        // low power price: transmit at peak whenever the water-filling level
        // would exceed it, water-fill in the thin band below, else stay off;
        // above h_tilde a partial split pins the decoded power
        if (h >= h_tilde && h > 0.0)
            return make_state_decision(h, p_peak, h_tilde / h, params);
        const double wf_cap = beta * p_peak < 1.0
                                  ? beta * sigma2 / (1.0 - beta * p_peak)
                                  : std::numeric_limits<double>::infinity();
        if (h >= wf_cap) return make_state_decision(h, p_peak, 1.0, params);
        if (h >= beta * sigma2 && h > 0.0)
            return make_state_decision(h, std::min(1.0 / beta - sigma2 / h, p_peak), 1.0, params);
        return make_state_decision(h, 0.0, 1.0, params);
    }
    // high power price: peak power only above beta/lambda, water-fill between
    if (lambda * h >= beta && h > 0.0)
        return make_state_decision(h, p_peak, h_tilde / h, params);
    if (h >= beta * sigma2 && h > 0.0)
        return make_state_decision(h, std::min(1.0 / beta - sigma2 / h, p_peak), 1.0, params);
    return make_state_decision(h, 0.0, 1.0, params);
}

double ts_good_state_threshold(const LinkParams& params, double lambda, double beta,
                               double root_tol) {
    validate(params);
    if (!(lambda > 0.0) || !(beta > 0.0))
        throw infeasible_dual_error("ts_good_state_threshold: needs strictly positive duals");
    const double sigma2 = params.noise_power;
    const double p_peak = params.tx_power_peak;
    if (lambda * sigma2 >= 1.0)
        throw infeasible_dual_error("ts_good_state_threshold: lambda must be below 1/sigma2");

    const double h0 = beta * sigma2;
    auto phi = [&](double h) {
        return std::log(h / h0) - 1.0 + h0 / h - lambda * h * p_peak + beta * p_peak;
    };
    // phi(h0) = beta*P_peak*(1 - lambda*sigma2) > 0 and phi -> -inf, so a root
    // exists beyond h0.  phi can dip and recover once (its derivative has at
    // most two zeros), hence the log-spaced scan for the LAST sign change.
    double hi = 2.0 * h0;
    const double crit_disc = 1.0 - 4.0 * lambda * p_peak * h0;
    if (crit_disc > 0.0)
        hi = std::max(hi, (1.0 + std::sqrt(crit_disc)) / (2.0 * lambda * p_peak));
    int guard = 0;
    while (phi(hi) > 0.0 && guard++ < 2000) hi *= 2.0;
    if (phi(hi) > 0.0)
        throw infeasible_dual_error("ts_good_state_threshold: no root in bracket");

    const int n_scan = 1 << 10;
    const double lo0 = h0 * (1.0 + 1e-12);
    const double log_lo = std::log(lo0), log_hi = std::log(hi);
    double lo = lo0, f_lo = phi(lo0);
    double best_lo = 0.0, best_hi = 0.0, best_f_lo = 0.0;
    for (int i = 1; i <= n_scan; ++i) {
        const double x = std::exp(log_lo + (log_hi - log_lo) * i / n_scan);
        const double f_x = phi(x);
        if ((f_x > 0.0) != (f_lo > 0.0)) {
            best_lo = lo;
            best_hi = x;
            best_f_lo = f_lo;
        }
        lo = x;
        f_lo = f_x;
    }
    if (best_hi == 0.0)
        throw infeasible_dual_error("ts_good_state_threshold: no sign change in scan");
    return bisect(phi, best_lo, best_hi, best_f_lo, root_tol);
}

TsCsitRule make_ts_csit_rule(const LinkParams& params, double lambda, double beta,
                             double root_tol) {
    validate(params);
    if (!(lambda >= 0.0) || !(beta >= 0.0))
        throw argument_error("ts_policy_with_csit: prices must be >= 0");
    const double sigma2 = params.noise_power;
    if (lambda >= 1.0 / sigma2)
        throw infeasible_dual_error("ts_policy_with_csit: lambda must be below 1/sigma2");
    TsCsitRule rule{params, lambda, beta, 0.0, std::numeric_limits<double>::infinity()};
    if (beta == 0.0) {
        // free transmit power: always peak, split at the fixed-power threshold
        if (lambda > 0.0)
            rule.good_above = ts_threshold_no_csit(params.tx_power_peak, sigma2, lambda, root_tol);
    } else {
        rule.off_below = beta * sigma2;
        // lambda = 0 pushes h_hat to +inf: water-fill everywhere above the level
        if (lambda > 0.0) rule.good_above = ts_good_state_threshold(params, lambda, beta, root_tol);
    }
    return rule;
}

StateDecision ts_policy_with_csit(double h, const TsCsitRule& rule) {
    if (!(h >= 0.0)) throw argument_error("ts_policy_with_csit: h must be >= 0");
    const LinkParams& params = rule.params;
    const double p_peak = params.tx_power_peak;
    if (rule.beta == 0.0)
        return make_state_decision(h, p_peak, h <= rule.good_above ? 1.0 : 0.0, params);
    if (h <= rule.off_below) return make_state_decision(h, 0.0, 1.0, params);
    if (h <= rule.good_above)
        return make_state_decision(
            h, std::min(1.0 / rule.beta - params.noise_power / h, p_peak), 1.0, params);
    return make_state_decision(h, p_peak, 0.0, params);
}

StateDecision ts_policy_with_csit(double h, const LinkParams& params, double lambda, double beta) {
    return ts_policy_with_csit(h, make_ts_csit_rule(params, lambda, beta));
}

StateDecision upper_bound_policy(double h, const LinkParams& params, double lambda, double beta) {
    validate(params);
    if (!(h >= 0.0) || !(lambda >= 0.0) || !(beta >= 0.0))
        throw argument_error("upper_bound_policy: bad arguments");
    if (lambda == 0.0 && beta == 0.0)
        throw argument_error("upper_bound_policy: lambda and beta cannot both be zero");
    const double sigma2 = params.noise_power;
    const double p_peak = params.tx_power_peak;

    double p;
    if (beta <= lambda * h) {
        p = p_peak; // energy price buys peak power outright
    } else if (h == 0.0) {
        p = 0.0;
    } else {
        p = std::clamp(1.0 / (beta - lambda * h) - sigma2 / h, 0.0, p_peak);
    }
    // ideal receiver: same signal feeds the decoder and the harvester
    StateDecision d;
    d.power = p;
    d.split_id = 1.0;
    d.rate = rate(h, p, 1.0, sigma2);
    d.energy = params.harvest_efficiency * h * p;
    return d;
}

} // namespace swipt
