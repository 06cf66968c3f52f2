#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "swipt/errors.hpp"
#include "swipt/fading.hpp"
#include "swipt/siso.hpp"

namespace swipt {

// Prices on the two average constraints: lambda for harvested energy, beta
// for transmit power (zero / unused in the fixed-power problems).  lambda is
// quoted against the pre-efficiency harvested power: the closed forms assume
// xi = 1, and running them against xi-scaled measurements is the same as
// solving the xi = 1 problem at target q/xi.
struct DualPoint {
    double lambda = 0.0;
    double beta = 0.0;
};

struct EllipsoidState {
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 4> shape{0.0, 0.0, 0.0, 0.0}; // row-major, symmetric PD
    int iteration = 0;
};

struct PolicySummary {
    double avg_rate = 0.0;   // nats per channel use
    double avg_energy = 0.0; // watts, efficiency included
    double avg_power = 0.0;  // watts
    std::vector<StateDecision> per_state;
};

// (avg_energy - q_target, p_avg - avg_power): the constraint residuals of a
// policy, measured in delivered-energy units.  Zero in both slots means both
// average constraints are met exactly.
std::array<double, 2> subgradient(const PolicySummary& summary, double q_target, double p_avg);

namespace detail {

struct Sums {
    double rate = 0.0;
    double energy = 0.0;
    double power = 0.0;
};

enum class ErrKind { none, argument, config, infeasible_dual, infeasible_target, other };

struct ErrCapture {
    ErrKind kind = ErrKind::none;
    std::string msg;
};

[[noreturn]] void rethrow(const ErrCapture& err);

// Applies decide to every state and accumulates rate/energy/power sums over a
// fixed chunk grid (independent of the thread count), so repeated runs and
// any OMP_NUM_THREADS produce bit-identical totals.  Optionally stores the
// per-state decisions.
template <class DecideFn>
Sums policy_sums(const FadingEnsemble& ens, DecideFn&& decide, std::vector<StateDecision>* store) {
    const int n = ens.num_states;
    if (n < 1) throw argument_error("evaluate_policy: empty ensemble");
    const int chunks = std::min(n, 256);
    std::vector<Sums> partial(chunks);
    ErrCapture err;
    bool failed = false;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        if (failed) continue;
        const int lo = static_cast<int>(static_cast<long long>(n) * c / chunks);
        const int hi = static_cast<int>(static_cast<long long>(n) * (c + 1) / chunks);
        Sums s;
        try {
            for (int i = lo; i < hi; ++i) {
                const StateDecision d = decide(ens.row(i));
                s.rate += d.rate;
                s.energy += d.energy;
                s.power += d.power;
                if (store) (*store)[i] = d;
            }
        } catch (const argument_error& e) {
#pragma omp critical(swipt_policy_sums_err)
            if (!failed) { err = {ErrKind::argument, e.what()}; failed = true; }
        } catch (const infeasible_dual_error& e) {
#pragma omp critical(swipt_policy_sums_err)
            if (!failed) { err = {ErrKind::infeasible_dual, e.what()}; failed = true; }
        } catch (const config_error& e) {
#pragma omp critical(swipt_policy_sums_err)
            if (!failed) { err = {ErrKind::config, e.what()}; failed = true; }
        } catch (const std::exception& e) {
#pragma omp critical(swipt_policy_sums_err)
            if (!failed) { err = {ErrKind::other, e.what()}; failed = true; }
        }
        partial[c] = s;
    }
    if (failed) rethrow(err);
    Sums total;
    for (const Sums& s : partial) {
        total.rate += s.rate;
        total.energy += s.energy;
        total.power += s.power;
    }
    return total;
}

} // namespace detail

template <class DecideFn>
PolicySummary evaluate_policy(const FadingEnsemble& ens, DecideFn&& decide) {
    PolicySummary out;
    out.per_state.resize(ens.num_states);
    const detail::Sums s = detail::policy_sums(ens, decide, &out.per_state);
    out.avg_rate = s.rate / ens.num_states;
    out.avg_energy = s.energy / ens.num_states;
    out.avg_power = s.power / ens.num_states;
    return out;
}

// Plain single-loop reference; results agree with the parallel version to
// rounding.  Kept for tests and the kernel benchmark.
template <class DecideFn>
PolicySummary evaluate_policy_serial(const FadingEnsemble& ens, DecideFn&& decide) {
    const int n = ens.num_states;
    if (n < 1) throw argument_error("evaluate_policy: empty ensemble");
    PolicySummary out;
    out.per_state.resize(n);
    double rate = 0.0, energy = 0.0, power = 0.0;
    for (int i = 0; i < n; ++i) {
        const StateDecision d = decide(ens.row(i));
        out.per_state[i] = d;
        rate += d.rate;
        energy += d.energy;
        power += d.power;
    }
    out.avg_rate = rate / n;
    out.avg_energy = energy / n;
    out.avg_power = power / n;
    return out;
}

struct P1Result {
    double lambda = 0.0;
    PolicySummary policy;
    int iterations = 0;
};

struct P2Result {
    DualPoint duals;
    PolicySummary policy;
    int iterations = 0;
    EllipsoidState state;
};

// --- generic engines ------------------------------------------------------
//
// A Family maps a DualPoint to a per-state decision functor; the engines below
// only rely on the induced average energy being monotone in lambda (bisection)
// or on the dual function being convex in (lambda, beta) (ellipsoid).

// Bisection on lambda in [0, (1-1e-9)/sigma2] until |avg_energy - q_target|
// <= tol_watts.  When the family is discrete (time/antenna switching on a
// finite ensemble) the induced energy is a step function and the tolerance may
// be unreachable; the engine then returns the energy-feasible bracket end.
template <class Family>
P1Result solve_energy_bisection(const FadingEnsemble& ens, const LinkParams& params,
                                double q_target, double tol_watts, Family&& family,
                                double q_max) {
    validate(params);
    if (q_target < 0.0) throw argument_error("solve_energy_bisection: q_target must be >= 0");
    if (q_target > q_max)
        throw infeasible_target_error("solve_energy_bisection: q_target above Q_max");
    const int n = ens.num_states;
    int iters = 0;
    auto energy_at = [&](double lambda) {
        ++iters;
        return detail::policy_sums(ens, family(DualPoint{lambda, 0.0}), nullptr).energy / n;
    };
    auto finish = [&](double lambda) {
        P1Result res;
        res.lambda = lambda;
        res.policy = evaluate_policy(ens, family(DualPoint{lambda, 0.0}));
        res.iterations = iters;
        return res;
    };
    if (q_target == 0.0) return finish(0.0); // constraint inactive

    double lo = 0.0;
    double hi = (1.0 - 1e-9) / params.noise_power;
    const double q_hi = energy_at(hi);
    if (q_hi < q_target - tol_watts)
        throw convergence_error("solve_energy_bisection: target unreachable inside dual bracket",
                                hi, 0.0, q_target - q_hi);
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double q_mid = energy_at(mid);
        if (std::abs(q_mid - q_target) <= tol_watts) return finish(mid);
        if (q_mid < q_target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break; // step family: settle on the feasible side
    }
    return finish(hi);
}

namespace detail {

// One deep/central ellipsoid cut.  Returns false when the cut certifies the
// remaining ellipsoid empty (or the geometry degenerated numerically).
bool ellipsoid_cut(EllipsoidState& st, double g0, double g1, double violation);

double max_total_gain(const FadingEnsemble& ens);

} // namespace detail

// beta-only solve at lambda = 0: water-filling against the power budget.
// Used when the energy constraint is inactive (q_target = 0).
template <class Family>
P2Result solve_power_only(const FadingEnsemble& ens, const LinkParams& params, Family&& family) {
    validate(params);
    const int n = ens.num_states;
    const double p_avg = params.tx_power_avg;
    int iters = 0;
    auto power_at = [&](double beta) {
        ++iters;
        return detail::policy_sums(ens, family(DualPoint{0.0, beta}), nullptr).power / n;
    };
    double lo = 1e-9 / params.tx_power_peak;
    double hi = 4.0 / params.tx_power_peak;
    double beta_star = lo;
    if (power_at(lo) >= p_avg) {
        int guard = 0;
        while (power_at(hi) > p_avg && guard++ < 200) hi *= 2.0;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            const double p_mid = power_at(mid);
            if (std::abs(p_mid - p_avg) <= 1e-9 * p_avg) {
                beta_star = mid;
                break;
            }
            if (p_mid > p_avg)
                lo = mid;
            else
                hi = mid;
            beta_star = hi; // power-feasible side
            if (hi - lo <= 1e-15 * hi) break;
        }
    }
    P2Result res;
    res.duals = DualPoint{0.0, beta_star};
    res.policy = evaluate_policy(ens, family(res.duals));
    res.iterations = iters;
    res.state.center = {0.0, beta_star};
    res.state.iteration = iters;
    return res;
}

// Ellipsoid method on (lambda, beta) >= 0 minimizing the dual function.
// lambda prices the pre-conversion decoded-vs-harvested split (the closed-form
// policies never see xi), so the energy component of the cut and of the
// slackness gap is the residual in pre-conversion units, (avg_energy -
// q_target)/xi; the power component is p_avg - avg_power.  Succeeds when the
// ellipsoid has shrunk below tol_rel (relative to the initial search box) AND
// the best iterate meets the constraints and complementary slackness within 1%.
template <class Family>
P2Result solve_energy_power_ellipsoid(const FadingEnsemble& ens, const LinkParams& params,
                                      double q_target, double tol_rel, int max_iters,
                                      Family&& family, double q_max) {
    validate(params);
    if (q_target < 0.0) throw argument_error("solve_energy_power_ellipsoid: q_target must be >= 0");
    if (q_target > q_max)
        throw infeasible_target_error("solve_energy_power_ellipsoid: q_target above Q_max");
    if (q_target == 0.0) return solve_power_only(ens, params, family);

    const int n = ens.num_states;
    const double sigma2 = params.noise_power;
    const double p_avg = params.tx_power_avg;
    const double xi = params.harvest_efficiency;
    const double lam_cap = (1.0 - 1e-9) / sigma2;
    const double lam_scale = 1.0 / sigma2;
    // beta* is bounded by the largest per-state marginal value of power,
    // max_h h*(1/sigma2 + lambda) < 2*h_max/sigma2; keep a 10/P_avg floor for
    // tiny-gain ensembles.
    const double beta_scale = std::max(10.0 / p_avg, 2.0 * detail::max_total_gain(ens) / sigma2);
    const double q_den = std::max(q_target, 1e-3 * q_max);

    // objective scale for the slackness checks: rate of the pure WF solution
    const double r_scale =
        std::max(solve_power_only(ens, params, family).policy.avg_rate, 1e-12);

    EllipsoidState st;
    st.center = {0.5 * lam_scale, 0.5 * beta_scale};
    st.shape = {0.5 * lam_scale * lam_scale, 0.0, 0.0, 0.5 * beta_scale * beta_scale};

    DualPoint best{};
    double best_score = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < max_iters; ++it) {
        const double lam = st.center[0];
        const double bet = st.center[1];
        double g0, g1, violation = 0.0;
        if (lam < 0.0) {
            g0 = -1.0; g1 = 0.0; violation = -lam;
        } else if (bet < 0.0) {
            g0 = 0.0; g1 = -1.0; violation = -bet;
        } else if (lam > lam_cap) {
            g0 = 1.0; g1 = 0.0; violation = lam - lam_cap;
        } else {
            const detail::Sums sums =
                detail::policy_sums(ens, family(DualPoint{lam, bet}), nullptr);
            const double qe = sums.energy / n;
            const double pe = sums.power / n;
            g0 = (qe - q_target) / xi;
            g1 = p_avg - pe;
            const double score =
                std::max({std::max(0.0, q_target - qe) / q_den,
                          std::max(0.0, pe - p_avg) / p_avg,
                          lam * std::abs(qe - q_target) / (xi * r_scale),
                          bet * std::abs(pe - p_avg) / r_scale});
            if (score < best_score) {
                best_score = score;
                best = DualPoint{lam, bet};
            }
            const double spread = std::max(std::sqrt(st.shape[0]) / lam_scale,
                                           std::sqrt(st.shape[3]) / beta_scale);
            if (spread <= tol_rel && best_score <= 0.01) {
                ++it;
                break;
            }
        }
        if (!detail::ellipsoid_cut(st, g0, g1, violation)) break;
    }
    if (!(best_score <= 0.01))
        throw convergence_error("solve_energy_power_ellipsoid: constraint residuals above 1%",
                                best.lambda, best.beta, best_score);
    P2Result res;
    res.duals = best;
    res.policy = evaluate_policy(ens, family(best));
    res.iterations = it;
    res.state = st;
    return res;
}

// --- power-splitting instantiations ----------------------------------------

// Fixed transmit power, splitting per dps_alpha_no_csit.
P1Result solve_p1_bisection(const FadingEnsemble& ens, const LinkParams& params, double q_target,
                            double tol_watts);

// Joint power control and splitting per dps_policy_with_csit.
P2Result solve_p2_ellipsoid(const FadingEnsemble& ens, const LinkParams& params, double q_target,
                            double tol_rel, int max_iters = 500);

// Greedy peak-power energy maximization: the energy corner of the CSIT
// region, xi included.
double greedy_peak_energy(const FadingEnsemble& ens, const LinkParams& params);

} // namespace swipt
