#include "swipt/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "swipt/errors.hpp"

namespace swipt {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Split "-50 dBm" / "0.2W" / "3.5" into a number and a (possibly empty)
// alphabetic suffix.
void split_number_suffix(const std::string& key, const std::string& value, double& num,
                         std::string& suffix) {
    const std::string v = trim(value);
    const char* begin = v.c_str();
    char* end = nullptr;
    num = std::strtod(begin, &end);
    if (end == begin)
        throw config_error("key '" + key + "': expected a number, got '" + value + "'");
    suffix = trim(std::string(end));
}

double parse_plain_double(const std::string& key, const std::string& value) {
    double num;
    std::string suffix;
    split_number_suffix(key, value, num, suffix);
    if (!suffix.empty())
        throw config_error("key '" + key + "': unexpected unit '" + suffix + "'");
    return num;
}

// Powers: watts by default, with mW/uW scaling or dBm conversion.
double parse_power(const std::string& key, const std::string& value) {
    double num;
    std::string suffix;
    split_number_suffix(key, value, num, suffix);
    const std::string u = lower(suffix);
    if (u.empty() || u == "w") return num;
    if (u == "mw") return num * 1e-3;
    if (u == "uw") return num * 1e-6;
    if (u == "dbm") return std::pow(10.0, (num - 30.0) / 10.0);
    throw config_error("key '" + key + "': unknown power unit '" + suffix + "'");
}

// Dimensionless ratios: bare linear value or dB.
double parse_ratio(const std::string& key, const std::string& value) {
    if (lower(trim(value)) == "inf") return std::numeric_limits<double>::infinity();
    double num;
    std::string suffix;
    split_number_suffix(key, value, num, suffix);
    const std::string u = lower(suffix);
    if (u.empty()) return num;
    if (u == "db") return std::pow(10.0, num / 10.0);
    throw config_error("key '" + key + "': unknown unit '" + suffix + "'");
}

double parse_frequency(const std::string& key, const std::string& value) {
    double num;
    std::string suffix;
    split_number_suffix(key, value, num, suffix);
    const std::string u = lower(suffix);
    if (u.empty() || u == "hz") return num;
    if (u == "khz") return num * 1e3;
    if (u == "mhz") return num * 1e6;
    if (u == "ghz") return num * 1e9;
    throw config_error("key '" + key + "': unknown frequency unit '" + suffix + "'");
}

long long parse_integer(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    std::size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected an integer, got '" + value + "'");
    }
    if (pos != v.size())
        throw config_error("key '" + key + "': trailing characters in '" + value + "'");
    return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    std::size_t pos = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected an unsigned integer, got '" + value +
                           "'");
    }
    if (pos != v.size())
        throw config_error("key '" + key + "': trailing characters in '" + value + "'");
    return out;
}

std::vector<SchemeId> parse_schemes(const std::string& value) {
    std::vector<SchemeId> out;
    std::stringstream ss(value);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        if (token.empty()) continue;
        out.push_back(parse_scheme_token(token));
    }
    if (out.empty()) throw config_error("key 'schemes': no scheme tokens in '" + value + "'");
    return out;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Every key accepted by apply_key, in the order render_config echoes them.
const char* const kKnownKeys[] = {
    "tx_power_avg",  "tx_power_peak",      "noise_power", "harvest_efficiency",
    "rician_k",      "mean_power_gain",    "num_antennas", "ula_phase",
    "num_states",    "seed",               "n_points",     "schemes",
    "bisection_tol", "ellipsoid_tol",      "ellipsoid_max_iters", "root_tol",
    "epsilon",       "eta",                "bandwidth_hz", "out_dir",
};

} // namespace

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    for (Scheme s : {Scheme::upper_bound, Scheme::dps, Scheme::ts})
        for (CsitMode m : {CsitMode::no_csit, CsitMode::csit})
            cfg.schemes.push_back({s, m});
    return cfg;
}

void validate(const ScenarioConfig& cfg) {
    validate(cfg.link);
    validate(cfg.fading);
    if (cfg.num_states < 1) throw config_error("num_states must be at least 1");
    if (cfg.n_points < 2) throw config_error("n_points must be at least 2");
    if (cfg.schemes.empty()) throw config_error("schemes must list at least one scheme");
    if (!(cfg.bisection_tol > 0.0)) throw config_error("bisection_tol must be positive");
    if (!(cfg.ellipsoid_tol > 0.0)) throw config_error("ellipsoid_tol must be positive");
    if (cfg.ellipsoid_max_iters < 1) throw config_error("ellipsoid_max_iters must be at least 1");
    if (!(cfg.root_tol > 0.0)) throw config_error("root_tol must be positive");
    if (!(cfg.epsilon >= 0.0)) throw config_error("epsilon must be non-negative");
    if (!(cfg.eta >= 0.0)) throw config_error("eta must be non-negative");
    if (!(cfg.bandwidth_hz > 0.0)) throw config_error("bandwidth_hz must be positive");
    if (cfg.out_dir.empty()) throw config_error("out_dir must not be empty");
}

void apply_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    if (k == "tx_power_avg") cfg.link.tx_power_avg = parse_power(k, value);
    else if (k == "tx_power_peak") cfg.link.tx_power_peak = parse_power(k, value);
    else if (k == "noise_power") cfg.link.noise_power = parse_power(k, value);
    else if (k == "harvest_efficiency") cfg.link.harvest_efficiency = parse_plain_double(k, value);
    else if (k == "rician_k") cfg.fading.rician_k = parse_ratio(k, value);
    else if (k == "mean_power_gain") cfg.fading.mean_power_gain = parse_ratio(k, value);
    else if (k == "num_antennas") cfg.fading.num_antennas = static_cast<int>(parse_integer(k, value));
    else if (k == "ula_phase") cfg.fading.ula_phase = parse_plain_double(k, value);
    else if (k == "num_states") cfg.num_states = static_cast<int>(parse_integer(k, value));
    else if (k == "seed") cfg.seed = parse_seed(k, value);
    else if (k == "n_points") cfg.n_points = static_cast<int>(parse_integer(k, value));
    else if (k == "schemes") cfg.schemes = parse_schemes(value);
    else if (k == "bisection_tol") cfg.bisection_tol = parse_plain_double(k, value);
    else if (k == "ellipsoid_tol") cfg.ellipsoid_tol = parse_plain_double(k, value);
    else if (k == "ellipsoid_max_iters") cfg.ellipsoid_max_iters = static_cast<int>(parse_integer(k, value));
    else if (k == "root_tol") cfg.root_tol = parse_plain_double(k, value);
    else if (k == "epsilon") cfg.epsilon = parse_plain_double(k, value);
    else if (k == "eta") cfg.eta = parse_plain_double(k, value);
    else if (k == "bandwidth_hz") cfg.bandwidth_hz = parse_frequency(k, value);
    else if (k == "out_dir") {
        const std::string v = trim(value);
        if (v.empty()) throw config_error("key 'out_dir': empty path");
        cfg.out_dir = v;
    } else {
        throw config_error("unknown config key '" + k + "'");
    }
}

void apply_env_overrides(ScenarioConfig& cfg) {
    for (const char* key : kKnownKeys) {
        std::string env_name = "SWIPT_";
        for (const char* c = key; *c; ++c)
            env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
        if (const char* v = std::getenv(env_name.c_str())) {
            try {
                apply_key(cfg, key, v);
            } catch (const config_error& e) {
                throw config_error(env_name + ": " + e.what());
            }
        }
    }
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    ScenarioConfig cfg = default_config();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(line_no) +
                               ": expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw config_error(path + ":" + std::to_string(line_no) + ": empty key");
        try {
            apply_key(cfg, key, value);
        } catch (const config_error& e) {
            throw config_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    apply_env_overrides(cfg);
    validate(cfg);
    return cfg;
}

SolveOptions solve_options(const ScenarioConfig& cfg) {
    SolveOptions opts;
    opts.bisection_tol = cfg.bisection_tol;
    opts.ellipsoid_tol = cfg.ellipsoid_tol;
    opts.ellipsoid_max_iters = cfg.ellipsoid_max_iters;
    opts.root_tol = cfg.root_tol;
    opts.epsilon = cfg.epsilon;
    opts.eta = cfg.eta;
    return opts;
}

std::string render_config(const ScenarioConfig& cfg) {
    std::string out;
    auto emit = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    };
    emit("tx_power_avg", format_double(cfg.link.tx_power_avg));
    emit("tx_power_peak", format_double(cfg.link.tx_power_peak));
    emit("noise_power", format_double(cfg.link.noise_power));
    emit("harvest_efficiency", format_double(cfg.link.harvest_efficiency));
    emit("rician_k", std::isinf(cfg.fading.rician_k) ? "inf" : format_double(cfg.fading.rician_k));
    emit("mean_power_gain", format_double(cfg.fading.mean_power_gain));
    emit("num_antennas", std::to_string(cfg.fading.num_antennas));
    emit("ula_phase", format_double(cfg.fading.ula_phase));
    emit("num_states", std::to_string(cfg.num_states));
    emit("seed", std::to_string(cfg.seed));
    emit("n_points", std::to_string(cfg.n_points));
    std::string schemes;
    for (const SchemeId& id : cfg.schemes) {
        if (!schemes.empty()) schemes += ",";
        schemes += scheme_token(id);
    }
    emit("schemes", schemes);
    emit("bisection_tol", format_double(cfg.bisection_tol));
    emit("ellipsoid_tol", format_double(cfg.ellipsoid_tol));
    emit("ellipsoid_max_iters", std::to_string(cfg.ellipsoid_max_iters));
    emit("root_tol", format_double(cfg.root_tol));
    emit("epsilon", format_double(cfg.epsilon));
    emit("eta", format_double(cfg.eta));
    emit("bandwidth_hz", format_double(cfg.bandwidth_hz));
    emit("out_dir", cfg.out_dir);
    return out;
}

} // namespace swipt
