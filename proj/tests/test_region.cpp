#include <doctest.h>

#include <cmath>
#include <vector>

#include "swipt/region.hpp"
#include "oracles.hpp"

using namespace swipt;

namespace {

const LinkParams kRef{0.1, 0.2, 1e-8, 0.5};

REBoundary make_boundary(std::vector<std::pair<double, double>> knots) {
    REBoundary b;
    for (auto [e, r] : knots) {
        REPoint p;
        p.energy = e;
        p.rate_bits = r;
        b.points.push_back(p);
    }
    if (!b.points.empty()) {
        b.corner_rate_max = b.points.front();
        b.corner_energy_max = b.points.back();
    }
    return b;
}

void check_trace_shape(const REBoundary& b, const Corners& c) {
    REQUIRE(b.points.size() >= 2);
    const double r0 = b.points.front().rate_bits;
    for (std::size_t i = 1; i < b.points.size(); ++i) {
        CHECK(b.points[i].energy > b.points[i - 1].energy);
        CHECK(b.points[i].rate_bits <= b.points[i - 1].rate_bits + 1e-6 * r0);
    }
    CHECK(b.points.front().rate_bits == doctest::Approx(c.rate_max_bits).epsilon(1e-9));
    CHECK(b.points.back().energy == c.energy_max);
    CHECK(b.points.back().rate_bits == 0.0);
    CHECK(b.corner_rate_max.energy == b.points.front().energy);
    CHECK(b.corner_energy_max.energy == b.points.back().energy);
}

void check_concave(const REBoundary& b) {
    const double slack = 2e-3 * b.points.front().rate_bits;
    for (std::size_t i = 1; i + 1 < b.points.size(); ++i) {
        const REPoint& lo = b.points[i - 1];
        const REPoint& hi = b.points[i + 1];
        const double t = (b.points[i].energy - lo.energy) / (hi.energy - lo.energy);
        const double chord = lo.rate_bits + t * (hi.rate_bits - lo.rate_bits);
        CHECK(b.points[i].rate_bits >= chord - slack);
    }
}

} // namespace

TEST_CASE("trade-off corners without transmitter adaptation") {
    const FadingEnsemble one = testor::make_ensemble({1e-4});
    const Corners c1 = corner_points(one, kRef, {Scheme::dps, CsitMode::no_csit});
    CHECK(c1.rate_max_bits == doctest::Approx(std::log2(1001.0)).epsilon(1e-12));
    CHECK(c1.energy_max == doctest::Approx(0.5 * 1e-4 * 0.1).epsilon(1e-15));

    const FadingEnsemble two = testor::make_ensemble({1e-4, 3e-4});
    const Corners c2 = corner_points(two, kRef, {Scheme::ts, CsitMode::no_csit});
    CHECK(c2.energy_max == doctest::Approx(0.5 * 2e-4 * 0.1).epsilon(1e-14));
    const double r_ref =
        0.5 * (std::log2(1.0 + 1e3) + std::log2(1.0 + 3e3));
    CHECK(c2.rate_max_bits == doctest::Approx(r_ref).epsilon(1e-14));
}

TEST_CASE("trade-off corners with transmitter adaptation") {
    RicianConfig cfg;
    const FadingEnsemble ens = sample_rician(cfg, 300, 41);
    const Corners no = corner_points(ens, kRef, {Scheme::dps, CsitMode::no_csit});
    const Corners with = corner_points(ens, kRef, {Scheme::dps, CsitMode::csit});

    CHECK(with.energy_max == greedy_peak_energy(ens, kRef));
    CHECK(with.energy_max >= no.energy_max);
    CHECK(with.rate_max_bits >= no.rate_max_bits);

    const double wf_bits = testor::wf_reference_rate(ens, kRef) / std::log(2.0);
    CHECK(with.rate_max_bits == doctest::Approx(wf_bits).epsilon(1e-6));
}

TEST_CASE("two-point trace returns exactly the corners") {
    const FadingEnsemble ens = sample_rician(RicianConfig{}, 200, 5);
    const SchemeId id{Scheme::dps, CsitMode::no_csit};
    const Corners c = corner_points(ens, kRef, id);
    const REBoundary b = trace_boundary(ens, kRef, id, 2);
    REQUIRE(b.points.size() == 2);
    CHECK(b.points[0].q_target == 0.0);
    CHECK(b.points[0].energy == 0.0);
    CHECK(b.points[0].rate_bits == doctest::Approx(c.rate_max_bits).epsilon(1e-12));
    CHECK(b.points[0].lambda == 0.0);
    CHECK(b.points[1].q_target == c.energy_max);
    CHECK(b.points[1].energy == c.energy_max);
    CHECK(b.points[1].rate_bits == 0.0);
}

TEST_CASE("traced boundaries are monotone, concave, and ordered") {
    const FadingEnsemble ens = sample_rician(RicianConfig{}, 500, 17);
    auto traced = [&](Scheme s, CsitMode m) {
        const SchemeId id{s, m};
        const REBoundary b = trace_boundary(ens, kRef, id, 9);
        check_trace_shape(b, corner_points(ens, kRef, id));
        return b;
    };
    const REBoundary dps_no = traced(Scheme::dps, CsitMode::no_csit);
    const REBoundary dps_yes = traced(Scheme::dps, CsitMode::csit);
    const REBoundary ts_no = traced(Scheme::ts, CsitMode::no_csit);
    const REBoundary ts_yes = traced(Scheme::ts, CsitMode::csit);
    check_concave(dps_no);
    check_concave(dps_yes);

    CHECK(region_dominates(dps_no, ts_no, 5e-3).dominates);
    CHECK(region_dominates(dps_yes, ts_yes, 5e-3).dominates);
    CHECK(region_dominates(dps_yes, dps_no, 5e-3).dominates);

    const REBoundary ub = trace_boundary(ens, kRef, {Scheme::upper_bound, CsitMode::no_csit}, 9);
    REQUIRE(ub.points.size() == 1); // no trade-off: the region is the full box
    const Corners cu = corner_points(ens, kRef, {Scheme::upper_bound, CsitMode::no_csit});
    CHECK(ub.points[0].energy == cu.energy_max);
    CHECK(ub.points[0].rate_bits == doctest::Approx(cu.rate_max_bits).epsilon(1e-12));
    CHECK(region_dominates(ub, dps_no, 5e-3).dominates);

    const REBoundary ub_csit =
        trace_boundary(ens, kRef, {Scheme::upper_bound, CsitMode::csit}, 9);
    CHECK(ub_csit.points.back().energy ==
          corner_points(ens, kRef, {Scheme::upper_bound, CsitMode::csit}).energy_max);
    CHECK(ub_csit.points.back().rate_bits > 0.0); // ideal receiver keeps decoding at peak
    CHECK(region_dominates(ub_csit, dps_yes, 5e-3).dominates);
}

TEST_CASE("dominance comparison interpolates between knots") {
    const REBoundary a = make_boundary({{1.0, 10.0}, {2.0, 4.0}});
    const REBoundary b = make_boundary({{0.5, 9.0}, {1.5, 6.0}});

    const DominanceReport fwd = region_dominates(a, b, 0.0);
    CHECK(fwd.dominates);
    CHECK(fwd.worst_margin == doctest::Approx(1.0).epsilon(1e-12));

    const DominanceReport rev = region_dominates(b, a, 0.0);
    CHECK(!rev.dominates);
    CHECK(rev.worst_energy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rev.rate_a == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(rev.rate_b == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(rev.worst_margin == doctest::Approx(-2.5).epsilon(1e-12));

    // a 26% tolerance absorbs the worst gap
    CHECK(region_dominates(b, a, 0.26).dominates);

    CHECK(region_dominates(a, a, 0.0).dominates); // self, exactly

    CHECK_THROWS_AS(region_dominates(a, REBoundary{}, 0.0), comparison_error);
    CHECK_THROWS_AS(region_dominates(a, b, -0.1), argument_error);
}

TEST_CASE("trace rejects degenerate grids") {
    const FadingEnsemble ens = testor::make_ensemble({1e-4, 2e-4});
    CHECK_THROWS_AS(trace_boundary(ens, kRef, {Scheme::dps, CsitMode::no_csit}, 1),
                    argument_error);
}

TEST_CASE("scheme tokens round-trip") {
    for (Scheme s : {Scheme::dps, Scheme::ts, Scheme::as_exhaustive, Scheme::as_approx,
                     Scheme::ups, Scheme::upper_bound})
        for (CsitMode m : {CsitMode::no_csit, CsitMode::csit}) {
            const SchemeId id{s, m};
            CHECK(parse_scheme_token(scheme_token(id)) == id);
        }
    CHECK(scheme_token({Scheme::upper_bound, CsitMode::csit}) == "upper_bound_csit");
    CHECK_THROWS_AS(parse_scheme_token("nonsense"), config_error);
    CHECK_THROWS_AS(parse_scheme_token("dps"), config_error);
}
