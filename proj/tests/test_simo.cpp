#include <doctest.h>

#include <cmath>
#include <vector>

#include "swipt/region.hpp"
#include "swipt/simo.hpp"
#include "oracles.hpp"

using namespace swipt;

namespace {

const LinkParams kRef{0.1, 0.2, 1e-8, 0.5};

// objective of a fixed antenna split at fixed power
double split_value(std::span<const double> h, std::uint64_t mask, double P, double sigma2,
                   double lambda) {
    double hid = 0.0, heh = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        (((mask >> i) & 1u) ? hid : heh) += h[i];
    return std::log1p(hid * P / sigma2) + lambda * heh * P;
}

} // namespace

TEST_CASE("combining rate sums the decoded shares") {
    const double h2[] = {1e-4, 3e-4};
    const double zero2[] = {0.0, 0.0};
    const double one2[] = {1.0, 1.0};
    CHECK(mrc_rate(h2, zero2, 0.1, 1e-8) == 0.0);
    CHECK(mrc_rate(h2, one2, 0.1, 1e-8) ==
          doctest::Approx(rate(4e-4, 0.1, 1.0, 1e-8)).epsilon(1e-15));

    const double h3[] = {2.5e-4, 0.7e-4, 1.2e-4};
    const double a3[] = {0.3, 0.9, 0.5};
    long double acc = 0.0L;
    for (int i = 0; i < 3; ++i) acc += (long double)a3[i] * h3[i];
    const double expect = static_cast<double>(std::log1p(acc * 0.1L / 1e-8L));
    CHECK(mrc_rate(h3, a3, 0.1, 1e-8) == doctest::Approx(expect).epsilon(1e-14));

    const double short_alpha[] = {0.5};
    CHECK_THROWS_AS(mrc_rate(h2, short_alpha, 0.1, 1e-8), argument_error);
    const double bad_alpha[] = {0.5, 1.5};
    CHECK_THROWS_AS(mrc_rate(h2, bad_alpha, 0.1, 1e-8), argument_error);
}

TEST_CASE("partition outcomes split the received power by antenna") {
    const double h[] = {1e-4, 3e-4};
    AntennaPartition part;
    part.num_antennas = 2;
    part.id_mask = 0b01; // antenna 0 decodes, antenna 1 harvests
    const StateDecision d = partition_decision(h, part, 0.1, kRef);
    CHECK(d.power == 0.1);
    CHECK(d.split_id == doctest::Approx(0.25).epsilon(1e-12)); // 1e-4 of 4e-4
    CHECK(d.rate == doctest::Approx(std::log1p(1e-4 * 0.1 / 1e-8)).epsilon(1e-14));
    CHECK(d.energy == doctest::Approx(kRef.harvest_efficiency * 3e-4 * 0.1).epsilon(1e-12));
}

TEST_CASE("uniform-splitting reduction sums the antennas") {
    const FadingEnsemble two = testor::make_ensemble({1e-4, 3e-4, 2e-4, 2e-4}, 2);
    const FadingEnsemble red = ups_reduce(two);
    REQUIRE(red.num_antennas == 1);
    REQUIRE(red.num_states == 2);
    CHECK(red.gains[0] == doctest::Approx(4e-4).epsilon(1e-15));
    CHECK(red.gains[1] == doctest::Approx(4e-4).epsilon(1e-15));

    const FadingEnsemble one = testor::make_ensemble({1e-4, 2e-4});
    const FadingEnsemble same = ups_reduce(one);
    CHECK(same.gains == one.gains);
}

TEST_CASE("uniform splitting boundary equals the reduced single-antenna one") {
    RicianConfig cfg;
    cfg.num_antennas = 2;
    const FadingEnsemble ens = sample_rician(cfg, 400, 19);
    const REBoundary ups = trace_boundary(ens, kRef, {Scheme::ups, CsitMode::no_csit}, 7);
    const REBoundary siso =
        trace_boundary(ups_reduce(ens), kRef, {Scheme::dps, CsitMode::no_csit}, 7);
    REQUIRE(ups.points.size() == siso.points.size());
    for (std::size_t i = 0; i < ups.points.size(); ++i) {
        CHECK(ups.points[i].energy == siso.points[i].energy);
        CHECK(ups.points[i].rate_bits == siso.points[i].rate_bits);
    }
}

TEST_CASE("exhaustive split search at fixed power") {
    const double h[] = {1e-4, 2e-4, 4e-4};
    const double P = 0.1, sigma2 = 1e-8;

    CHECK(antenna_switch_exhaustive_no_csit(h, P, sigma2, 0.0).id_mask == 0b111);
    CHECK(antenna_switch_exhaustive_no_csit(h, P, sigma2, (1.0 - 1e-9) / sigma2).id_mask ==
          0);

    const double lam = 3e4;
    const AntennaPartition part = antenna_switch_exhaustive_no_csit(h, P, sigma2, lam);
    CHECK(part.id_mask == testor::best_split_no_csit(h, P, sigma2, lam));
    // no split may beat the reported one
    for (std::uint64_t mask = 0; mask < 8; ++mask)
        CHECK(split_value(h, part.id_mask, P, sigma2, lam) >=
              split_value(h, mask, P, sigma2, lam) - 1e-12);

    // an antenna with zero gain changes nothing: ties resolve to the lowest mask
    const double tied[] = {2e-4, 0.0};
    const AntennaPartition t = antenna_switch_exhaustive_no_csit(tied, P, sigma2, 1e4);
    CHECK((t.id_mask & 0b10) == 0);

    std::vector<double> wide(21, 1e-4);
    CHECK_THROWS_AS(antenna_switch_exhaustive_no_csit(wide, P, sigma2, 1e4),
                    capacity_error);
    CHECK_THROWS_AS(antenna_switch_exhaustive_no_csit(h, P, sigma2, 1.0 / sigma2),
                    infeasible_dual_error);
}

TEST_CASE("per-split power rule matches a dense power search") {
    const double h[] = {1e-4, 2e-4, 4e-4};
    AntennaPartition part;
    part.num_antennas = 3;
    part.id_mask = 0b011; // harvest on the strongest antenna

    // energy credit outweighs the power price: transmit at peak
    CHECK(antenna_switch_power(part, h, 1e6, 10.0, kRef) == kRef.tx_power_peak);

    // no energy price: water-filling on the decoding gain
    const double p_wf = antenna_switch_power(part, h, 0.0, 30.0, kRef);
    CHECK(p_wf == doctest::Approx(std::min(1.0 / 30.0 - kRef.noise_power / 3e-4,
                                           kRef.tx_power_peak))
                      .epsilon(1e-12));

    testor::TestRng rng(61);
    for (int t = 0; t < 30; ++t) {
        const double lam = std::pow(10.0, rng.uniform(2.0, 6.0));
        const double bet = std::pow(10.0, rng.uniform(0.0, 3.0));
        const double p = antenna_switch_power(part, h, lam, bet, kRef);
        double best = -1e300, arg = 0.0;
        for (int i = 0; i <= 40000; ++i) {
            const double cand = kRef.tx_power_peak * i / 40000.0;
            const double v = std::log1p(3e-4 * cand / kRef.noise_power) +
                             lam * 4e-4 * cand - bet * cand;
            if (v > best) {
                best = v;
                arg = cand;
            }
        }
        const double vp =
            std::log1p(3e-4 * p / kRef.noise_power) + lam * 4e-4 * p - bet * p;
        CHECK(vp >= best - 1e-9 * std::max(1.0, std::abs(best)));
        CHECK(std::abs(p - arg) <= kRef.tx_power_peak / 40000.0 + 1e-12);
    }

    // nothing decodes: on/off by the energy credit alone
    AntennaPartition none;
    none.num_antennas = 3;
    none.id_mask = 0;
    CHECK(antenna_switch_power(none, h, 1e5, 1.0, kRef) == kRef.tx_power_peak);
    CHECK(antenna_switch_power(none, h, 1.0, 1e3, kRef) == 0.0);
}

TEST_CASE("joint split and power search") {
    // single antenna: only decode-all and harvest-all remain
    const double h1[] = {2e-4};
    const double lam = 5e4, bet = 20.0;
    const auto [part1, p1] = antenna_switch_exhaustive_csit(h1, kRef, lam, bet);
    double best = -1e300;
    std::uint64_t arg_mask = 0;
    double arg_p = 0.0;
    for (std::uint64_t mask = 0; mask < 2; ++mask) {
        for (int i = 0; i <= 40000; ++i) {
            const double p = kRef.tx_power_peak * i / 40000.0;
            const double hid = mask ? 2e-4 : 0.0;
            const double heh = mask ? 0.0 : 2e-4;
            const double v = std::log1p(hid * p / kRef.noise_power) + lam * heh * p - bet * p;
            if (v > best) {
                best = v;
                arg_mask = mask;
                arg_p = p;
            }
        }
    }
    CHECK(part1.id_mask == arg_mask);
    CHECK(std::abs(p1 - arg_p) <= kRef.tx_power_peak / 40000.0 + 1e-12);

    // prohibitive power price: stay silent
    const auto [part_off, p_off] = antenna_switch_exhaustive_csit(h1, kRef, 1e2, 1e9);
    (void)part_off;
    CHECK(p_off == 0.0);

    // three antennas against the joint enumeration-plus-grid reference
    testor::TestRng rng(71);
    for (int t = 0; t < 8; ++t) {
        double h[3];
        for (double& g : h) g = std::pow(10.0, rng.uniform(-5.0, -3.3));
        const double l = std::pow(10.0, rng.uniform(3.0, 5.5));
        const double b = std::pow(10.0, rng.uniform(0.5, 2.5));
        const auto [part, p] = antenna_switch_exhaustive_csit(h, kRef, l, b);
        double ref = -1e300;
        for (std::uint64_t mask = 0; mask < 8; ++mask) {
            double hid = 0.0, heh = 0.0;
            for (int i = 0; i < 3; ++i) (((mask >> i) & 1u) ? hid : heh) += h[i];
            for (int i = 0; i <= 20000; ++i) {
                const double cand = kRef.tx_power_peak * i / 20000.0;
                ref = std::max(ref, std::log1p(hid * cand / kRef.noise_power) +
                                        l * heh * cand - b * cand);
            }
        }
        double hid = 0.0, heh = 0.0;
        for (int i = 0; i < 3; ++i) (part.decodes(i) ? hid : heh) += h[i];
        const double got =
            std::log1p(hid * p / kRef.noise_power) + l * heh * p - b * p;
        CHECK(got >= ref - 1e-6 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("subset selection walks the printed algorithm") {
    // everything fits: all antennas decode
    const double small[] = {1.0, 2.0};
    SubsetStats stats;
    const AntennaPartition all = subset_select(small, 10.0, 0.1, 0.1, &stats);
    CHECK(all.id_mask == 0b11);
    CHECK(stats.achieved_sum == doctest::Approx(3.0));

    // exhaustive mode finds the best sum under the target
    const double trio[] = {3.0, 5.0, 8.0};
    const AntennaPartition ex = subset_select(trio, 9.0, 0.0, 0.0, &stats);
    CHECK(stats.achieved_sum == doctest::Approx(8.0));
    CHECK(ex.id_mask == 0b011); // {3,5} ties {8} at sum 8; lowest mask wins

    // early stop once a sum is close enough
    const double quick[] = {9.5, 0.3, 0.2};
    const AntennaPartition q = subset_select(quick, 9.9, 0.1, 0.1, &stats);
    CHECK(stats.early_exit);
    CHECK(q.id_mask == 0b001);
    CHECK(stats.achieved_sum == doctest::Approx(9.5));

    // empty input: nothing decodes
    const AntennaPartition none = subset_select({}, 1.0, 0.1, 0.1, &stats);
    CHECK(none.id_mask == 0);
    CHECK(stats.achieved_sum == 0.0);
}

TEST_CASE("subset selection meets its approximation guarantee") {
    testor::TestRng rng(81);
    const double eps = 0.1, eta = 0.1;
    for (int t = 0; t < 30; ++t) {
        const int m = 2 + static_cast<int>(rng.next() % 9);
        std::vector<double> powers(m);
        for (double& v : powers) v = std::pow(10.0, rng.uniform(-7.0, -5.0));
        double total = 0.0;
        for (double v : powers) total += v;
        const double target = total * rng.uniform(0.2, 0.95);

        SubsetStats stats;
        const AntennaPartition part = subset_select(powers, target, eps, eta, &stats);
        double sum = 0.0;
        for (int i = 0; i < m; ++i)
            if (part.decodes(i)) sum += powers[i];
        CHECK(sum == doctest::Approx(stats.achieved_sum).epsilon(1e-12));
        CHECK(sum <= target * (1.0 + 1e-12));

        const testor::SubsetBest best = testor::best_subset_under(powers, target);
        CHECK(sum >= best.sum / (1.0 + eps) - 1e-15);
        CHECK(stats.size_bound_ok);
        if (stats.tau > 1.0) {
            const double bound = 2.0 + 4.0 * m * std::log(stats.tau) / eps;
            CHECK(stats.max_list_size <= bound);
        }

        SubsetStats stats2;
        const AntennaPartition part2 = subset_select(powers, target, eps, eta, &stats2);
        CHECK(part.id_mask == part2.id_mask);
    }
}

TEST_CASE("switching imitation of the uniform-splitting policy") {
    // receive power below the decoder share: everything decodes
    const double weak[] = {1e-6, 2e-6};
    DualPoint duals{1e4, 0.0};
    const StateDecision d = approx_switching_policy(weak, CsitMode::no_csit, duals, kRef);
    CHECK(d.split_id == 1.0);
    CHECK(d.energy == 0.0);

    // two antennas, exhaustive subset mode: the pick equals the oracle's
    testor::TestRng rng(91);
    for (int t = 0; t < 60; ++t) {
        double h[2] = {std::pow(10.0, rng.uniform(-5.0, -3.5)),
                       std::pow(10.0, rng.uniform(-5.0, -3.5))};
        const double lam = std::pow(10.0, rng.uniform(3.5, 5.5));
        const DualPoint pr{lam, 0.0};
        const StateDecision got =
            approx_switching_policy(h, CsitMode::no_csit, pr, kRef, 0.0, 0.0);
        const double target = 1.0 / lam - kRef.noise_power;
        const double p = kRef.tx_power_avg;
        const double received[] = {h[0] * p, h[1] * p};
        const double total = received[0] + received[1];
        double expect;
        if (total <= target) {
            expect = total;
        } else {
            expect = testor::best_subset_under(received, target).sum;
        }
        CHECK(got.split_id * (h[0] + h[1]) * p == doctest::Approx(expect).epsilon(1e-9));
    }

    // silent state under power control: the partition does not matter
    const double hs[] = {1e-7, 2e-7};
    const DualPoint heavy{1e3, 1e6};
    const StateDecision off = approx_switching_policy(hs, CsitMode::csit, heavy, kRef);
    CHECK(off.power == 0.0);
    CHECK(off.rate == 0.0);
    CHECK(off.energy == 0.0);
}

TEST_CASE("no per-antenna split profile beats the uniform one") {
    testor::TestRng rng(111);
    const double P = 0.1, sigma2 = 1e-8;
    for (int t = 0; t < 50; ++t) {
        double h[2] = {std::pow(10.0, rng.uniform(-5.0, -3.5)),
                       std::pow(10.0, rng.uniform(-5.0, -3.5))};
        const double lam = rng.uniform() * 0.999 / sigma2;
        const double sum = h[0] + h[1];
        const double a_star = dps_alpha_no_csit(sum, P, sigma2, lam);
        const double ups_value = testor::split_objective(sum, P, sigma2, lam, a_star);
        double grid_best = -1e300;
        for (int i = 0; i <= 100; ++i)
            for (int j = 0; j <= 100; ++j) {
                const double a1 = i / 100.0, a2 = j / 100.0;
                const double v = std::log1p((a1 * h[0] + a2 * h[1]) * P / sigma2) +
                                 lam * ((1.0 - a1) * h[0] + (1.0 - a2) * h[1]) * P;
                grid_best = std::max(grid_best, v);
            }
        CHECK(ups_value >= grid_best - 1e-9 * std::max(1.0, std::abs(grid_best)));
    }
}
