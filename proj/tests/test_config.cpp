#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "swipt/config.hpp"
#include "swipt/experiment.hpp"
#include "oracles.hpp"

using namespace swipt;

namespace {

std::filesystem::path temp_path(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

bool same_config(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.link.tx_power_avg == b.link.tx_power_avg &&
           a.link.tx_power_peak == b.link.tx_power_peak &&
           a.link.noise_power == b.link.noise_power &&
           a.link.harvest_efficiency == b.link.harvest_efficiency &&
           a.fading.rician_k == b.fading.rician_k &&
           a.fading.mean_power_gain == b.fading.mean_power_gain &&
           a.fading.num_antennas == b.fading.num_antennas &&
           a.fading.ula_phase == b.fading.ula_phase && a.num_states == b.num_states &&
           a.seed == b.seed && a.n_points == b.n_points && a.schemes == b.schemes &&
           a.bisection_tol == b.bisection_tol && a.ellipsoid_tol == b.ellipsoid_tol &&
           a.ellipsoid_max_iters == b.ellipsoid_max_iters && a.root_tol == b.root_tol &&
           a.epsilon == b.epsilon && a.eta == b.eta && a.bandwidth_hz == b.bandwidth_hz &&
           a.out_dir == b.out_dir;
}

} // namespace

TEST_CASE("defaults validate and survive a render/load round trip") {
    unsetenv("SWIPT_SEED");
    const ScenarioConfig cfg = default_config();
    CHECK_NOTHROW(validate(cfg));
    CHECK(cfg.schemes.size() == 6);
    CHECK(cfg.num_states == 100000);
    CHECK(cfg.n_points == 25);

    const auto path = temp_path("swipt_roundtrip.cfg");
    write_text(path, render_config(cfg));
    const ScenarioConfig back = load_config(path.string());
    CHECK(same_config(cfg, back));

    // infinite rician_k renders as "inf" and comes back exact
    ScenarioConfig los = cfg;
    los.fading.rician_k = std::numeric_limits<double>::infinity();
    write_text(path, render_config(los));
    CHECK(std::isinf(load_config(path.string()).fading.rician_k));
    std::filesystem::remove(path);
}

TEST_CASE("values accept unit suffixes") {
    ScenarioConfig cfg = default_config();
    apply_key(cfg, "tx_power_avg", "100 mW");
    CHECK(cfg.link.tx_power_avg == doctest::Approx(0.1).epsilon(1e-15));
    apply_key(cfg, "tx_power_peak", "0.2W");
    CHECK(cfg.link.tx_power_peak == 0.2);
    apply_key(cfg, "noise_power", "-50 dBm");
    CHECK(cfg.link.noise_power == doctest::Approx(1e-8).epsilon(1e-14));
    apply_key(cfg, "noise_power", "10 uW");
    CHECK(cfg.link.noise_power == doctest::Approx(1e-5).epsilon(1e-15));
    apply_key(cfg, "mean_power_gain", "-40 dB");
    CHECK(cfg.fading.mean_power_gain == doctest::Approx(1e-4).epsilon(1e-14));
    apply_key(cfg, "rician_k", "3 dB");
    CHECK(cfg.fading.rician_k == doctest::Approx(std::pow(10.0, 0.3)).epsilon(1e-14));
    apply_key(cfg, "rician_k", "inf");
    CHECK(std::isinf(cfg.fading.rician_k));
    apply_key(cfg, "bandwidth_hz", "10 MHz");
    CHECK(cfg.bandwidth_hz == 1e7);
    apply_key(cfg, "seed", "12345678901234567890");
    CHECK(cfg.seed == 12345678901234567890ull);
    apply_key(cfg, "schemes", " dps_csit , ts_no_csit ");
    REQUIRE(cfg.schemes.size() == 2);
    CHECK(cfg.schemes[0] == SchemeId{Scheme::dps, CsitMode::csit});
}

TEST_CASE("malformed keys and values are rejected") {
    ScenarioConfig cfg = default_config();
    CHECK_THROWS_AS(apply_key(cfg, "power", "1"), config_error);
    CHECK_THROWS_AS(apply_key(cfg, "tx_power_avg", "fast"), config_error);
    CHECK_THROWS_AS(apply_key(cfg, "tx_power_avg", "5 parsec"), config_error);
    CHECK_THROWS_AS(apply_key(cfg, "harvest_efficiency", "0.5 W"), config_error);
    CHECK_THROWS_AS(apply_key(cfg, "num_states", "10.5"), config_error);
    CHECK_THROWS_AS(apply_key(cfg, "schemes", " ,, "), config_error);
    CHECK_THROWS_AS(apply_key(cfg, "schemes", "dps_sometimes_csit"), config_error);

    ScenarioConfig bad = default_config();
    bad.link.tx_power_peak = 0.05; // below the average budget
    CHECK_THROWS_AS(validate(bad), config_error);
    bad = default_config();
    bad.num_states = 0;
    CHECK_THROWS_AS(validate(bad), config_error);
    bad = default_config();
    bad.n_points = 1;
    CHECK_THROWS_AS(validate(bad), config_error);
    bad = default_config();
    bad.ellipsoid_tol = 0.0;
    CHECK_THROWS_AS(validate(bad), config_error);
}

TEST_CASE("file errors carry the path and line number") {
    const auto path = temp_path("swipt_badline.cfg");
    write_text(path, "seed = 3\n# comment only\ntx_power_avg 0.1\n");
    try {
        load_config(path.string());
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3:") != std::string::npos);
        CHECK(msg.find("swipt_badline.cfg") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("environment overrides beat the file") {
    const auto path = temp_path("swipt_env.cfg");
    write_text(path, "seed = 5\nn_points = 4\n");

    setenv("SWIPT_SEED", "99", 1);
    setenv("SWIPT_N_POINTS", "7", 1);
    ScenarioConfig cfg = load_config(path.string());
    CHECK(cfg.seed == 99);
    CHECK(cfg.n_points == 7);

    setenv("SWIPT_SEED", "not_a_number", 1);
    try {
        load_config(path.string());
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("SWIPT_SEED") != std::string::npos);
    }

    unsetenv("SWIPT_SEED");
    unsetenv("SWIPT_N_POINTS");
    cfg = load_config(path.string());
    CHECK(cfg.seed == 5);
    CHECK(cfg.n_points == 4);
    std::filesystem::remove(path);
}

TEST_CASE("boundary CSV round-trips bit for bit") {
    const LinkParams params{0.1, 0.2, 1e-8, 0.5};
    const FadingEnsemble ens = sample_rician(RicianConfig{}, 200, 3);
    const SchemeId id{Scheme::dps, CsitMode::csit};
    const REBoundary b = trace_boundary(ens, params, id, 5);

    const std::string csv = boundary_to_csv(b);
    CHECK(csv.rfind("q_target_watts,avg_energy_watts,avg_rate_bits,lambda_star,beta_star,"
                    "iterations\n",
                    0) == 0);
    const REBoundary back = boundary_from_csv(id, csv);
    REQUIRE(back.points.size() == b.points.size());
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        CHECK(back.points[i].q_target == b.points[i].q_target);
        CHECK(back.points[i].energy == b.points[i].energy);
        CHECK(back.points[i].rate_bits == b.points[i].rate_bits);
        CHECK(back.points[i].lambda == b.points[i].lambda);
        CHECK(back.points[i].beta == b.points[i].beta);
        CHECK(back.points[i].iterations == b.points[i].iterations);
    }
    CHECK(boundary_to_csv(back) == csv);

    CHECK_THROWS_AS(boundary_from_csv(id, "wrong,header\n1,2,3,4,5,6\n"), config_error);
    const std::string truncated =
        "q_target_watts,avg_energy_watts,avg_rate_bits,lambda_star,beta_star,iterations\n"
        "1,2,3\n";
    CHECK_THROWS_AS(boundary_from_csv(id, truncated), config_error);
}

TEST_CASE("experiment run writes its artifacts deterministically") {
    ScenarioConfig cfg = default_config();
    cfg.num_states = 300;
    cfg.n_points = 5;
    cfg.schemes = {{Scheme::upper_bound, CsitMode::no_csit},
                   {Scheme::dps, CsitMode::no_csit},
                   {Scheme::ts, CsitMode::no_csit}};
    cfg.out_dir = (std::filesystem::temp_directory_path() / "swipt_exp_test").string();
    std::filesystem::remove_all(cfg.out_dir);

    REQUIRE(run_experiment(cfg) == 0);
    const auto dir = std::filesystem::path(cfg.out_dir);
    for (const char* token : {"upper_bound_no_csit", "dps_no_csit", "ts_no_csit"})
        CHECK(std::filesystem::exists(dir / ("re_" + std::string(token) + ".csv")));
    CHECK(std::filesystem::exists(dir / "plot_re_region.py"));
    CHECK(!std::filesystem::exists(dir / "run_error.txt"));
    const std::string summary = read_text(dir / "summary.txt");
    CHECK(summary.find("# result\nPASS\n") != std::string::npos);

    const std::string first = read_text(dir / "re_dps_no_csit.csv");
    REQUIRE(run_experiment(cfg) == 0);
    CHECK(read_text(dir / "re_dps_no_csit.csv") == first);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("experiment failure leaves a machine-readable record") {
    ScenarioConfig cfg = default_config();
    cfg.num_states = 100;
    cfg.n_points = 3;
    cfg.schemes = {{Scheme::dps, CsitMode::csit}};
    cfg.ellipsoid_max_iters = 1; // cannot converge: trips the solver guard
    cfg.out_dir = (std::filesystem::temp_directory_path() / "swipt_exp_fail").string();
    std::filesystem::remove_all(cfg.out_dir);

    CHECK(run_experiment(cfg) == 1);
    const std::string record = read_text(std::filesystem::path(cfg.out_dir) / "run_error.txt");
    CHECK(record.find("error_type = convergence_error") != std::string::npos);
    std::filesystem::remove_all(cfg.out_dir);
}
