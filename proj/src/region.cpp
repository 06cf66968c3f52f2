#include "swipt/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <utility>

namespace swipt {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// ---- per-scheme decision families (DualPoint -> per-state functor) --------

struct TsNoCsitFamily {
    LinkParams params;
    double root_tol = 1e-10;
    auto operator()(DualPoint d) const {
        const LinkParams p = params;
        double h_bar = std::numeric_limits<double>::infinity();
        if (d.lambda > 0.0)
            h_bar = d.lambda * p.noise_power >= 1.0
                        ? 0.0
                        : ts_threshold_no_csit(p.tx_power_avg, p.noise_power, d.lambda, root_tol);
        return [p, h_bar](std::span<const double> row) {
            return make_state_decision(row[0], p.tx_power_avg, row[0] <= h_bar ? 1.0 : 0.0, p);
        };
    }
};

struct TsCsitFamily {
    LinkParams params;
    double root_tol = 1e-10;
    auto operator()(DualPoint d) const {
        const TsCsitRule rule = make_ts_csit_rule(params, d.lambda, d.beta, root_tol);
        return [rule](std::span<const double> row) { return ts_policy_with_csit(row[0], rule); };
    }
};

struct AsNoCsitFamily {
    LinkParams params;
    auto operator()(DualPoint d) const {
        const LinkParams p = params;
        const double lam = d.lambda;
        return [p, lam](std::span<const double> row) {
            const AntennaPartition part =
                antenna_switch_exhaustive_no_csit(row, p.tx_power_avg, p.noise_power, lam);
            return partition_decision(row, part, p.tx_power_avg, p);
        };
    }
};

struct AsCsitFamily {
    LinkParams params;
    auto operator()(DualPoint d) const {
        const LinkParams p = params;
        const DualPoint dd = d;
        return [p, dd](std::span<const double> row) {
            const auto [part, power] = antenna_switch_exhaustive_csit(row, p, dd.lambda, dd.beta);
            return partition_decision(row, part, power, p);
        };
    }
};

struct UpperBoundFamily {
    LinkParams params;
    auto operator()(DualPoint d) const {
        const LinkParams p = params;
        const DualPoint dd = d;
        return [p, dd](std::span<const double> row) {
            return upper_bound_policy(row[0], p, dd.lambda, dd.beta);
        };
    }
};

// ---- helpers ---------------------------------------------------------------

REPoint to_point(double q_target, double lambda, double beta, int iterations,
                 const PolicySummary& policy) {
    REPoint pt;
    pt.q_target = q_target;
    pt.energy = policy.avg_energy;
    pt.rate_bits = policy.avg_rate / kLn2;
    pt.lambda = lambda;
    pt.beta = beta;
    pt.iterations = iterations;
    return pt;
}

// Greedy peak-power allocation (strongest states first until the average
// power budget is spent): the energy-max limit of the CSIT schemes.  Returns
// (rate bits, energy watts).
std::pair<double, double> greedy_peak_point(const FadingEnsemble& ens, const LinkParams& params) {
    const int n = ens.num_states;
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ha = ens.total_gain(a), hb = ens.total_gain(b);
        if (ha != hb) return ha > hb;
        return a < b;
    });
    double budget = static_cast<double>(n) * params.tx_power_avg;
    double rate = 0.0, sum = 0.0;
    for (int idx : order) {
        if (budget <= 0.0) break;
        const double p = std::min(params.tx_power_peak, budget);
        const double h = ens.total_gain(idx);
        rate += std::log1p(h * p / params.noise_power);
        sum += h * p;
        budget -= p;
    }
    return {rate / n / kLn2, params.harvest_efficiency * sum / n};
}

// Bracketed root refinement (false position with the Illinois stale-side
// halving); f need not be linear, only sign-changing on [a,b].  Stops when
// |f| <= f_tol or the bracket collapses.
template <class F>
double illinois(F&& f, double a, double fa, double b, double fb, double f_tol, int max_iter) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    double x = 0.5 * (a + b);
    for (int k = 0; k < max_iter; ++k) {
        x = (a * fb - b * fa) / (fb - fa);
        if (!std::isfinite(x) || x <= std::min(a, b) || x >= std::max(a, b)) x = 0.5 * (a + b);
        const double fx = f(x);
        if (std::abs(fx) <= f_tol) return x;
        if ((fx > 0.0) == (fb > 0.0)) {
            b = x;
            fb = fx;
            fa *= 0.5; // stale side: Illinois damping
        } else {
            a = b;
            fa = fb;
            b = x;
            fb = fx;
        }
        if (std::abs(b - a) <= 1e-14 * std::max(std::abs(a), std::abs(b))) break;
    }
    return x;
}

// Energy-target solver for the ideal-receiver bound with CSIT.  The dual
// price of energy is unbounded near the energy corner (unlike the splitting
// schemes), so instead of the ellipsoid this nests two monotone root solves:
// an outer one on lambda driving the harvested energy to q_target, an inner
// one on beta holding the average power at the budget.
class UpperBoundCsitSolver {
  public:
    UpperBoundCsitSolver(const FadingEnsemble& ens, const LinkParams& params, double tol_watts)
        : ens_(ens), params_(params), family_{params}, tol_watts_(tol_watts) {
        n_ = ens.num_states;
        p_avg_ = params.tx_power_avg;
        base_beta_ = solve_beta(0.0);
        base_ = eval(0.0, base_beta_);
    }

    P2Result solve(double q_target) {
        evals_ = 0;
        double lambda, beta;
        if (q_target <= base_.energy / n_) {
            lambda = 0.0;
            beta = base_beta_;
        } else {
            // expand an energy-feasible upper bracket for lambda
            double lo = lam_hint_;
            double f_lo = energy_at(lo) - q_target;
            while (f_lo > 0.0 && lo > 0.0) { // warm start overshot: restart from 0
                lo = 0.0;
                f_lo = base_.energy / n_ - q_target;
            }
            double hi = std::max(2.0 * lam_hint_, 1.0 / params_.noise_power);
            double f_hi = energy_at(hi) - q_target;
            int guard = 0;
            while (f_hi < 0.0 && guard++ < 300) {
                lo = hi;
                f_lo = f_hi;
                hi *= 2.0;
                f_hi = energy_at(hi) - q_target;
            }
            if (f_hi < 0.0)
                throw convergence_error("upper bound solve: energy target unreachable", hi,
                                        beta_hint_, -f_hi);
            lambda = illinois([&](double lam) { return energy_at(lam) - q_target; }, lo, f_lo, hi,
                              f_hi, tol_watts_, 200);
            beta = solve_beta(lambda);
            lam_hint_ = lambda;
        }
        P2Result res;
        res.duals = DualPoint{lambda, beta};
        res.policy = evaluate_policy(ens_, family_(res.duals));
        res.iterations = evals_;
        res.state.center = {lambda, beta};
        res.state.iteration = evals_;
        return res;
    }

  private:
    detail::Sums eval(double lambda, double beta) {
        ++evals_;
        return detail::policy_sums(ens_, family_(DualPoint{lambda, beta}), nullptr);
    }

    // E[p] is strictly decreasing in beta at fixed lambda
    double solve_beta(double lambda) {
        double lo = beta_hint_ > 0.0 ? beta_hint_ / 2.0 : 1e-9 / params_.tx_power_peak;
        double hi = beta_hint_ > 0.0 ? beta_hint_ * 2.0 : 8.0 / params_.tx_power_peak;
        auto residual = [&](double b) { return eval(lambda, b).power / n_ - p_avg_; };
        double f_lo = residual(lo);
        int guard = 0;
        while (f_lo < 0.0 && guard++ < 400) {
            lo /= 4.0;
            f_lo = residual(lo);
        }
        if (f_lo < 0.0) return lo; // budget slack even at ~zero price
        double f_hi = residual(hi);
        guard = 0;
        while (f_hi > 0.0 && guard++ < 400) {
            hi *= 4.0;
            f_hi = residual(hi);
        }
        if (f_hi > 0.0)
            throw convergence_error("upper bound solve: power budget unreachable", lambda, hi, f_hi);
        const double beta = illinois(residual, lo, f_lo, hi, f_hi, 1e-9 * p_avg_, 200);
        beta_hint_ = beta;
        return beta;
    }

    double energy_at(double lambda) { return eval(lambda, solve_beta(lambda)).energy / n_; }

    const FadingEnsemble& ens_;
    LinkParams params_;
    UpperBoundFamily family_;
    double tol_watts_;
    int n_ = 0;
    double p_avg_ = 0.0;
    double base_beta_ = 0.0;
    detail::Sums base_;
    double lam_hint_ = 0.0;
    double beta_hint_ = 0.0;
    int evals_ = 0;
};

} // namespace

std::string scheme_token(const SchemeId& id) {
    std::string s;
    switch (id.scheme) {
        case Scheme::dps: s = "dps"; break;
        case Scheme::ts: s = "ts"; break;
        case Scheme::as_exhaustive: s = "as_exhaustive"; break;
        case Scheme::as_approx: s = "as_approx"; break;
        case Scheme::ups: s = "ups"; break;
        case Scheme::upper_bound: s = "upper_bound"; break;
    }
    return s + (id.mode == CsitMode::csit ? "_csit" : "_no_csit");
}

SchemeId parse_scheme_token(std::string_view token) {
    SchemeId id;
    std::string_view base;
    if (token.ends_with("_no_csit")) {
        id.mode = CsitMode::no_csit;
        base = token.substr(0, token.size() - 8);
    } else if (token.ends_with("_csit")) {
        id.mode = CsitMode::csit;
        base = token.substr(0, token.size() - 5);
    } else {
        throw config_error("unknown scheme token (expected *_no_csit or *_csit): " +
                           std::string(token));
    }
    if (base == "dps") id.scheme = Scheme::dps;
    else if (base == "ts") id.scheme = Scheme::ts;
    else if (base == "as_exhaustive") id.scheme = Scheme::as_exhaustive;
    else if (base == "as_approx") id.scheme = Scheme::as_approx;
    else if (base == "ups") id.scheme = Scheme::ups;
    else if (base == "upper_bound") id.scheme = Scheme::upper_bound;
    else throw config_error("unknown scheme token: " + std::string(token));
    return id;
}

Corners corner_points(const FadingEnsemble& ens, const LinkParams& params, const SchemeId& id) {
    validate(params);
    if (ens.num_states < 1) throw argument_error("corner_points: empty ensemble");
    Corners c;
    if (id.mode == CsitMode::no_csit) {
        // one pass reports both extremes: the rate at full decoding and the
        // energy at full harvesting (the two ends of the splitting range)
        auto decide = [p = params](std::span<const double> row) {
            const double h = total_gain(row);
            StateDecision d;
            d.power = p.tx_power_avg;
            d.split_id = 1.0;
            d.rate = rate(h, p.tx_power_avg, 1.0, p.noise_power);
            d.energy = energy(h, p.tx_power_avg, 0.0, p.harvest_efficiency);
            return d;
        };
        const detail::Sums sums = detail::policy_sums(ens, decide, nullptr);
        c.rate_max_bits = sums.rate / ens.num_states / kLn2;
        c.energy_max = sums.energy / ens.num_states;
    } else {
        c.energy_max = greedy_peak_energy(ens, params);
        const FadingEnsemble reduced = ups_reduce(ens);
        const P2Result wf =
            solve_power_only(reduced, params, [&](DualPoint d) {
                return [p = params, d](std::span<const double> row) {
                    return dps_policy_with_csit(row[0], p, d.lambda, d.beta);
                };
            });
        c.rate_max_bits = wf.policy.avg_rate / kLn2;
    }
    return c;
}

REBoundary trace_boundary(const FadingEnsemble& ens, const LinkParams& params, const SchemeId& id,
                          int n_points, const SolveOptions& opts) {
    validate(params);
    if (n_points < 2) throw argument_error("trace_boundary: n_points must be >= 2");
    const bool csit = id.mode == CsitMode::csit;

    // schemes driven by the sum gain (and the approx-switching dual solves)
    // work on the reduced ensemble; antenna switching evaluates on the rows
    FadingEnsemble reduced_storage;
    const FadingEnsemble* reduced = &ens;
    if (id.scheme != Scheme::as_exhaustive && ens.num_antennas > 1) {
        reduced_storage = ups_reduce(ens);
        reduced = &reduced_storage;
    }

    const Corners corners = corner_points(ens, params, id);
    const double q_max = corners.energy_max;
    const double tol_watts = opts.bisection_tol * q_max;

    std::vector<REPoint> pts;
    auto tag_failure = [&](double q, const std::exception& e) -> std::string {
        return scheme_token(id) + " at q_target=" + std::to_string(q) + " W: " + e.what();
    };

    if (id.scheme == Scheme::upper_bound && !csit) {
        // ideal receiver needs no trade-off without CSIT: the region is the
        // full box and the boundary a single point
        REPoint pt;
        pt.q_target = q_max;
        pt.energy = q_max;
        pt.rate_bits = corners.rate_max_bits;
        pts.push_back(pt);
        REBoundary b;
        b.id = id;
        b.points = pts;
        b.corner_rate_max = pts.front();
        b.corner_energy_max = pts.back();
        return b;
    }

    UpperBoundCsitSolver* ub_solver = nullptr;
    std::unique_ptr<UpperBoundCsitSolver> ub_storage;
    if (id.scheme == Scheme::upper_bound && csit) {
        ub_storage = std::make_unique<UpperBoundCsitSolver>(*reduced, params, tol_watts);
        ub_solver = ub_storage.get();
    }

    // interior targets stop one uniform step short of Q_max: the exact corner
    // is appended analytically, and the dual prices blow up as q -> Q_max
    const int n_targets = n_points - 1;
    for (int i = 0; i < n_targets; ++i) {
        const double q = q_max * static_cast<double>(i) / n_targets;
        try {
            switch (id.scheme) {
                case Scheme::dps:
                case Scheme::ups: {
                    if (!csit) {
                        const P1Result r = solve_p1_bisection(*reduced, params, q, tol_watts);
                        pts.push_back(to_point(q, r.lambda, 0.0, r.iterations, r.policy));
                    } else {
                        const P2Result r = solve_p2_ellipsoid(*reduced, params, q,
                                                              opts.ellipsoid_tol,
                                                              opts.ellipsoid_max_iters);
                        pts.push_back(
                            to_point(q, r.duals.lambda, r.duals.beta, r.iterations, r.policy));
                    }
                    break;
                }
                case Scheme::ts: {
                    if (!csit) {
                        const P1Result r = solve_energy_bisection(*reduced, params, q, tol_watts,
                                                                  TsNoCsitFamily{params, opts.root_tol}, q_max);
                        pts.push_back(to_point(q, r.lambda, 0.0, r.iterations, r.policy));
                    } else {
                        const P2Result r = solve_energy_power_ellipsoid(
                            *reduced, params, q, opts.ellipsoid_tol, opts.ellipsoid_max_iters,
                            TsCsitFamily{params, opts.root_tol}, q_max);
                        pts.push_back(
                            to_point(q, r.duals.lambda, r.duals.beta, r.iterations, r.policy));
                    }
                    break;
                }
                case Scheme::as_exhaustive: {
                    if (!csit) {
                        const P1Result r = solve_energy_bisection(ens, params, q, tol_watts,
                                                                  AsNoCsitFamily{params}, q_max);
                        pts.push_back(to_point(q, r.lambda, 0.0, r.iterations, r.policy));
                    } else {
                        const P2Result r = solve_energy_power_ellipsoid(
                            ens, params, q, opts.ellipsoid_tol, opts.ellipsoid_max_iters,
                            AsCsitFamily{params}, q_max);
                        pts.push_back(
                            to_point(q, r.duals.lambda, r.duals.beta, r.iterations, r.policy));
                    }
                    break;
                }
                case Scheme::as_approx: {
                    // duals come from the sum-gain (uniform-splitting) solve;
                    // the traced point is what the switching imitation achieves
                    DualPoint duals;
                    int iters = 0;
                    if (!csit) {
                        const P1Result r = solve_p1_bisection(*reduced, params, q, tol_watts);
                        duals = DualPoint{r.lambda, 0.0};
                        iters = r.iterations;
                    } else {
                        const P2Result r = solve_p2_ellipsoid(*reduced, params, q,
                                                              opts.ellipsoid_tol,
                                                              opts.ellipsoid_max_iters);
                        duals = r.duals;
                        iters = r.iterations;
                    }
                    const CsitMode mode = id.mode;
                    const LinkParams p = params;
                    const double eps = opts.epsilon, eta = opts.eta;
                    const PolicySummary s =
                        evaluate_policy(ens, [&, p, mode, eps, eta](std::span<const double> row) {
                            return approx_switching_policy(row, mode, duals, p, eps, eta);
                        });
                    pts.push_back(to_point(q, duals.lambda, duals.beta, iters, s));
                    break;
                }
                case Scheme::upper_bound: {
                    const P2Result r = ub_solver->solve(q);
                    pts.push_back(
                        to_point(q, r.duals.lambda, r.duals.beta, r.iterations, r.policy));
                    break;
                }
            }
        } catch (const convergence_error& e) {
            throw convergence_error(tag_failure(q, e), e.last_lambda, e.last_beta, e.residual);
        } catch (const infeasible_target_error& e) {
            throw infeasible_target_error(tag_failure(q, e));
        } catch (const infeasible_dual_error& e) {
            throw infeasible_dual_error(tag_failure(q, e));
        }
    }

    // analytic energy corner
    REPoint corner;
    corner.q_target = q_max;
    corner.energy = q_max;
    corner.rate_bits = 0.0;
    if (id.scheme == Scheme::upper_bound && csit)
        corner.rate_bits = greedy_peak_point(*reduced, params).first;
    pts.push_back(corner);

    // enforce strictly increasing energies; earlier point (higher rate) wins
    std::vector<REPoint> cleaned;
    for (const REPoint& pt : pts)
        if (cleaned.empty() || pt.energy > cleaned.back().energy) cleaned.push_back(pt);

    REBoundary b;
    b.id = id;
    b.points = std::move(cleaned);
    b.corner_rate_max = b.points.front();
    b.corner_energy_max = b.points.back();
    return b;
}

namespace {

double rate_at(const REBoundary& b, double e) {
    const auto& pts = b.points;
    if (e <= pts.front().energy) return pts.front().rate_bits; // down-closed region
    if (e >= pts.back().energy) return pts.back().rate_bits;
    auto it = std::upper_bound(pts.begin(), pts.end(), e,
                               [](double v, const REPoint& p) { return v < p.energy; });
    const REPoint& hi = *it;
    const REPoint& lo = *(it - 1);
    const double t = (e - lo.energy) / (hi.energy - lo.energy);
    return lo.rate_bits + t * (hi.rate_bits - lo.rate_bits);
}

} // namespace

DominanceReport region_dominates(const REBoundary& a, const REBoundary& b, double tol) {
    if (a.points.empty() || b.points.empty())
        throw comparison_error("region_dominates: empty boundary");
    if (!(tol >= 0.0)) throw argument_error("region_dominates: tol must be >= 0");
    const double e_max = std::min(a.points.back().energy, b.points.back().energy);
    std::vector<double> knots{0.0, e_max};
    for (const REPoint& p : a.points)
        if (p.energy <= e_max) knots.push_back(p.energy);
    for (const REPoint& p : b.points)
        if (p.energy <= e_max) knots.push_back(p.energy);

    DominanceReport rep;
    rep.dominates = true;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (double e : knots) {
        const double ra = rate_at(a, e);
        const double rb = rate_at(b, e);
        const double margin = ra - (1.0 - tol) * rb;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_energy = e;
            rep.rate_a = ra;
            rep.rate_b = rb;
        }
    }
    rep.dominates = rep.worst_margin >= 0.0;
    return rep;
}

} // namespace swipt
