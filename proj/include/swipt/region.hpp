#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "swipt/duality.hpp"
#include "swipt/fading.hpp"
#include "swipt/simo.hpp"
#include "swipt/siso.hpp"

namespace swipt {

enum class Scheme { dps, ts, as_exhaustive, as_approx, ups, upper_bound };

struct SchemeId {
    Scheme scheme = Scheme::dps;
    CsitMode mode = CsitMode::no_csit;
    bool operator==(const SchemeId&) const = default;
};

// e.g. "dps_no_csit", "upper_bound_csit"
std::string scheme_token(const SchemeId& id);
SchemeId parse_scheme_token(std::string_view token); // throws config_error

// One traced trade-off point: the requested energy target, the achieved
// averages, and the prices/effort that produced them.
struct REPoint {
    double q_target = 0.0;  // watts
    double energy = 0.0;    // achieved average harvested power, watts
    double rate_bits = 0.0; // bits/s/Hz
    double lambda = 0.0;
    double beta = 0.0;
    int iterations = 0;
};

// Boundary of one scheme: points ordered by strictly increasing energy with
// non-increasing rates; the corners duplicate the first/last entries.
struct REBoundary {
    SchemeId id;
    std::vector<REPoint> points;
    REPoint corner_rate_max;
    REPoint corner_energy_max;
};

struct Corners {
    double rate_max_bits = 0.0; // bits/s/Hz at zero harvested energy
    double energy_max = 0.0;    // watts at zero (or, for the bound, maximal) rate
};

// Extremes of the trade-off for the scheme's CSIT mode: without CSIT the
// energy corner is xi*mean(h)*P and the rate corner the ergodic rate at fixed
// power; with CSIT they come from greedy peak-power allocation and pure
// water-filling.
Corners corner_points(const FadingEnsemble& ens, const LinkParams& params, const SchemeId& id);

struct SolveOptions {
    double bisection_tol = 1e-6; // on achieved energy, relative to Q_max
    double ellipsoid_tol = 1e-5; // on the dual search box
    int ellipsoid_max_iters = 500;
    double root_tol = 1e-10;     // gain-threshold root refinement
    double epsilon = 0.1; // subset-selection trim control
    double eta = 0.1;     // subset-selection early-stop control
};

// Solves the scheme's dual problem at the energy targets i*Q_max/(n_points-1)
// for i = 0 .. n_points-2 and appends the analytic energy corner, so the grid
// covers [0, Q_max] uniformly; consecutive points with equal achieved energy
// collapse to the first (higher-rate) one.
REBoundary trace_boundary(const FadingEnsemble& ens, const LinkParams& params, const SchemeId& id,
                          int n_points, const SolveOptions& opts = {});

struct DominanceReport {
    bool dominates = false;
    double worst_energy = 0.0; // watts at the tightest comparison point
    double rate_a = 0.0;
    double rate_b = 0.0;
    double worst_margin = 0.0; // min over knots of rate_a - (1-tol)*rate_b
};

// True iff boundary a achieves rate_a >= (1-tol)*rate_b at every energy in
// the overlap of supports, under linear interpolation.  Regions are
// down-closed: below a boundary's first knot the rate stays at its first
// value.
DominanceReport region_dominates(const REBoundary& a, const REBoundary& b, double tol);

} // namespace swipt
