#include "swipt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swipt/errors.hpp"
#include "swipt/simo.hpp"

namespace swipt {

namespace {

constexpr const char* kCsvHeader =
    "q_target_watts,avg_energy_watts,avg_rate_bits,lambda_star,beta_star,iterations";
constexpr double kOrderingTol = 5e-3;  // relative rate slack for coverage checks
constexpr double kConcavityTol = 2e-3; // relative sag allowed below a chord
constexpr int kDiagStates = 512;       // states sampled per point for selector stats

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_csv_double(const std::string& field, const std::string& context) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw config_error("boundary_from_csv: bad number '" + field + "' in " + context);
    return v;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

const char* const kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot the rate-energy boundaries from the re_*.csv files in this directory."""
import csv
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for path in sorted(glob.glob(os.path.join(out_dir, "re_*.csv"))):
        name = os.path.basename(path)[3:-4]
        energies, rates = [], []
        with open(path, newline="") as handle:
            for row in csv.DictReader(handle):
                energies.append(float(row["avg_energy_watts"]) * 1e6)
                rates.append(float(row["avg_rate_bits"]))
        style = "--" if name.endswith("no_csit") else "-"
        ax.plot(energies, rates, style, marker="o", markersize=3, label=name)
    ax.set_xlabel("average harvested power (uW)")
    ax.set_ylabel("average rate (bits/s/Hz)")
    ax.set_title("rate-energy region boundaries")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    target = os.path.join(out_dir, "re_region.png")
    fig.savefig(target, dpi=150)
    print(target)


if __name__ == "__main__":
    main()
)PY";

struct Violation {
    std::string kind;
    std::string detail;
};

// a should cover b: every rate on b's boundary is matched by a within slack.
struct CoveragePair {
    Scheme outer;
    Scheme inner;
};

constexpr CoveragePair kCoveragePairs[] = {
    {Scheme::upper_bound, Scheme::dps},   {Scheme::upper_bound, Scheme::ups},
    {Scheme::dps, Scheme::ts},            {Scheme::ups, Scheme::as_exhaustive},
    {Scheme::as_exhaustive, Scheme::as_approx},
};

const REBoundary* find_boundary(const std::vector<REBoundary>& traced, const SchemeId& id) {
    for (const REBoundary& b : traced)
        if (b.id == id) return &b;
    return nullptr;
}

// Containment check against the cover's step envelope: between samples a
// non-increasing Pareto frontier is bounded above by its left sample, so this
// never flags a gap that sampling alone produced.  Used when the inner
// boundary's points land off the shared target grid (approximate switching
// achieves whatever its per-state imitation achieves), where chord
// interpolation of the cover under-reads steep segments near the corner.
DominanceReport envelope_dominates(const REBoundary& a, const REBoundary& b, double tol) {
    if (a.points.empty() || b.points.empty())
        throw comparison_error("envelope_dominates: empty boundary");
    DominanceReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const REPoint& p : b.points) {
        double bound = a.points.front().rate_bits;
        for (const REPoint& s : a.points) {
            if (s.energy > p.energy * (1.0 + 1e-12)) break;
            bound = s.rate_bits;
        }
        if (p.energy > a.points.back().energy * (1.0 + 1e-9)) bound = 0.0;
        const double margin = bound - (1.0 - tol) * p.rate_bits;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_energy = p.energy;
            rep.rate_a = bound;
            rep.rate_b = p.rate_bits;
        }
    }
    rep.dominates = rep.worst_margin >= 0.0;
    return rep;
}

void check_coverage(const std::vector<REBoundary>& traced, std::string& summary,
                    std::vector<Violation>& violations) {
    summary += "# ordering checks (relative rate slack " + fmt(kOrderingTol) + ")\n";
    bool any = false;
    auto run_pair = [&](const REBoundary* a, const REBoundary* b) {
        if (!a || !b) return;
        any = true;
        const bool off_grid = b->id.scheme == Scheme::as_approx;
        const DominanceReport rep = off_grid ? envelope_dominates(*a, *b, kOrderingTol)
                                             : region_dominates(*a, *b, kOrderingTol);
        const std::string line = scheme_token(a->id) + " covers " + scheme_token(b->id) +
                                 (off_grid ? " (step envelope)" : "");
        summary += line + ": " + (rep.dominates ? "PASS" : "FAIL") +
                   " worst_margin_bits = " + fmt(rep.worst_margin) +
                   " at_energy_watts = " + fmt(rep.worst_energy) + "\n";
        if (!rep.dominates)
            violations.push_back({"ordering_violation",
                                  line + " (worst_margin_bits = " + fmt(rep.worst_margin) +
                                      " at " + fmt(rep.worst_energy) + " W)"});
    };
    for (CsitMode mode : {CsitMode::no_csit, CsitMode::csit})
        for (const CoveragePair& pair : kCoveragePairs)
            run_pair(find_boundary(traced, {pair.outer, mode}),
                     find_boundary(traced, {pair.inner, mode}));
    // cross-mode containment holds for the schemes whose CSIT policy space
    // includes every no-CSIT policy; the approximate-switching imitation
    // carries no such guarantee in either direction, so it is not checked
    for (Scheme s : {Scheme::dps, Scheme::ts, Scheme::ups, Scheme::as_exhaustive,
                     Scheme::upper_bound})
        run_pair(find_boundary(traced, {s, CsitMode::csit}),
                 find_boundary(traced, {s, CsitMode::no_csit}));
    if (!any) summary += "(no comparable scheme pairs traced)\n";
}

// Boundaries of the smooth families lie on concave frontiers; sagging below a
// chord beyond tolerance flags a solver failure.  Step families (ts, as_*) sit
// on the same hull only up to their discrete kinks, so they are not checked.
void check_concavity(const std::vector<REBoundary>& traced, std::string& summary,
                     std::vector<Violation>& violations) {
    summary += "# concavity checks (relative slack " + fmt(kConcavityTol) + ")\n";
    bool any = false;
    for (const REBoundary& b : traced) {
        if (b.id.scheme != Scheme::dps && b.id.scheme != Scheme::ups &&
            b.id.scheme != Scheme::upper_bound)
            continue;
        if (b.points.size() < 3) continue;
        any = true;
        double min_margin = std::numeric_limits<double>::infinity();
        double at_energy = 0.0;
        for (std::size_t i = 1; i + 1 < b.points.size(); ++i) {
            const REPoint& lo = b.points[i - 1];
            const REPoint& mid = b.points[i];
            const REPoint& hi = b.points[i + 1];
            const double t = (mid.energy - lo.energy) / (hi.energy - lo.energy);
            const double chord = lo.rate_bits + t * (hi.rate_bits - lo.rate_bits);
            const double margin = mid.rate_bits - chord * (1.0 - kConcavityTol);
            if (margin < min_margin) {
                min_margin = margin;
                at_energy = mid.energy;
            }
        }
        const bool ok = min_margin >= 0.0;
        summary += scheme_token(b.id) + ": " + (ok ? "PASS" : "FAIL") +
                   " min_margin_bits = " + fmt(min_margin) + "\n";
        if (!ok)
            violations.push_back({"concavity_violation",
                                  scheme_token(b.id) + " sags below its chord at " +
                                      fmt(at_energy) + " W (margin_bits = " + fmt(min_margin) +
                                      ")"});
    }
    if (!any) summary += "(no smooth-family boundary with 3+ points traced)\n";
}

// Re-runs the approximate selector at each traced dual point over a strided
// state sample and aggregates its instrumentation.
void subset_diagnostics(const std::vector<REBoundary>& traced, const FadingEnsemble& ens,
                        const ScenarioConfig& cfg, std::string& summary) {
    summary += "# subset selection diagnostics (approximate switching)\n";
    bool any = false;
    for (const REBoundary& b : traced) {
        if (b.id.scheme != Scheme::as_approx) continue;
        any = true;
        const int stride = std::max(1, ens.num_states / kDiagStates);
        long states_checked = 0, selector_runs = 0, early_exits = 0;
        int max_list = 0;
        double max_tau = 0.0;
        bool bound_ok = true;
        for (const REPoint& pt : b.points) {
            const DualPoint duals{pt.lambda, pt.beta};
            for (int s = 0; s < ens.num_states; s += stride) {
                ++states_checked;
                SubsetStats st;
                approx_switching_policy(ens.row(s), b.id.mode, duals, cfg.link, cfg.epsilon,
                                        cfg.eta, &st);
                if (st.max_list_size == 0) continue; // selector short-circuited
                ++selector_runs;
                if (st.early_exit) ++early_exits;
                max_list = std::max(max_list, st.max_list_size);
                max_tau = std::max(max_tau, st.tau);
                bound_ok = bound_ok && st.size_bound_ok;
            }
        }
        const double exit_frac =
            selector_runs > 0 ? static_cast<double>(early_exits) / selector_runs : 0.0;
        summary += scheme_token(b.id) + ": states_checked = " + std::to_string(states_checked) +
                   " selector_runs = " + std::to_string(selector_runs) +
                   " early_exit_fraction = " + fmt(exit_frac) +
                   " max_list_size = " + std::to_string(max_list) +
                   " max_tau = " + fmt(max_tau) +
                   " size_bound_ok = " + (bound_ok ? "yes" : "NO") + "\n";
    }
    if (!any) summary += "(no approximate-switching boundary traced)\n";
}

void write_error_record(const std::string& out_dir, const std::string& error_type,
                        const std::string& message,
                        const std::vector<std::string>& completed) {
    std::string body;
    body += "error_type = " + error_type + "\n";
    body += "message = " + message + "\n";
    std::string done;
    for (const std::string& tok : completed) {
        if (!done.empty()) done += ",";
        done += tok;
    }
    body += "completed_schemes = " + done + "\n";
    try {
        write_file(out_dir + "/run_error.txt", body);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run_error.txt unwritable (%s); record follows\n%s", e.what(),
                     body.c_str());
    }
}

} // namespace

std::string boundary_to_csv(const REBoundary& boundary) {
    std::string out = kCsvHeader;
    out += "\n";
    for (const REPoint& pt : boundary.points) {
        out += fmt(pt.q_target) + "," + fmt(pt.energy) + "," + fmt(pt.rate_bits) + "," +
               fmt(pt.lambda) + "," + fmt(pt.beta) + "," + std::to_string(pt.iterations) + "\n";
    }
    return out;
}

REBoundary boundary_from_csv(const SchemeId& id, const std::string& csv) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < csv.size()) {
        std::size_t end = csv.find('\n', start);
        if (end == std::string::npos) end = csv.size();
        if (end > start) lines.push_back(csv.substr(start, end - start));
        start = end + 1;
    }
    if (lines.empty() || lines.front() != kCsvHeader)
        throw config_error("boundary_from_csv: missing or mismatched header");
    REBoundary b;
    b.id = id;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 6)
            throw config_error("boundary_from_csv: expected 6 fields on row " +
                               std::to_string(i));
        const std::string ctx = "row " + std::to_string(i);
        REPoint pt;
        pt.q_target = parse_csv_double(fields[0], ctx);
        pt.energy = parse_csv_double(fields[1], ctx);
        pt.rate_bits = parse_csv_double(fields[2], ctx);
        pt.lambda = parse_csv_double(fields[3], ctx);
        pt.beta = parse_csv_double(fields[4], ctx);
        pt.iterations = static_cast<int>(parse_csv_double(fields[5], ctx));
        b.points.push_back(pt);
    }
    if (b.points.empty()) throw config_error("boundary_from_csv: no data rows");
    b.corner_rate_max = b.points.front();
    b.corner_energy_max = b.points.back();
    return b;
}

int run_experiment(const ScenarioConfig& cfg) {
    std::vector<std::string> completed;
    const std::string out_dir = cfg.out_dir;
    auto fail = [&](const std::string& type, const std::string& message) {
        write_error_record(out_dir, type, message, completed);
        return 1;
    };

    try {
        validate(cfg);
    } catch (const config_error& e) {
        return fail("config_error", e.what());
    }

    std::vector<REBoundary> traced;
    std::string summary;
    try {
        std::filesystem::create_directories(out_dir);
        std::filesystem::remove(out_dir + "/run_error.txt"); // stale record from a prior run
        write_file(out_dir + "/plot_re_region.py", kPlotScript);

        const FadingEnsemble ens = sample_rician(cfg.fading, cfg.num_states, cfg.seed);
        const SolveOptions opts = solve_options(cfg);

        summary += "# scenario\n" + render_config(cfg);

        summary += "# corners\n";
        bool mode_listed[2] = {false, false};
        for (const SchemeId& id : cfg.schemes) {
            const int mi = id.mode == CsitMode::csit ? 1 : 0;
            if (mode_listed[mi]) continue;
            mode_listed[mi] = true;
            const Corners c = corner_points(ens, cfg.link, id);
            summary += std::string(mi ? "csit" : "no_csit") +
                       ": rate_max_bits = " + fmt(c.rate_max_bits) +
                       " energy_max_watts = " + fmt(c.energy_max) + "\n";
        }

        summary += "# boundaries\n";
        for (const SchemeId& id : cfg.schemes) {
            const std::string token = scheme_token(id);
            REBoundary b = trace_boundary(ens, cfg.link, id, cfg.n_points, opts);
            write_file(out_dir + "/re_" + token + ".csv", boundary_to_csv(b));
            completed.push_back(token);
            summary += token + ": points = " + std::to_string(b.points.size()) +
                       " rate_corner_bits = " + fmt(b.corner_rate_max.rate_bits) +
                       " energy_corner_watts = " + fmt(b.corner_energy_max.energy) + "\n";
            traced.push_back(std::move(b));
        }

        std::vector<Violation> violations;
        check_coverage(traced, summary, violations);
        check_concavity(traced, summary, violations);
        subset_diagnostics(traced, ens, cfg, summary);

        summary += "# result\n";
        summary += violations.empty() ? "PASS\n" : "FAIL\n";
        for (const Violation& v : violations) summary += v.kind + ": " + v.detail + "\n";
        write_file(out_dir + "/summary.txt", summary);

        if (!violations.empty()) {
            std::string message;
            for (const Violation& v : violations) {
                if (!message.empty()) message += "; ";
                message += v.kind + ": " + v.detail;
            }
            write_error_record(out_dir, violations.front().kind, message, completed);
            return 2;
        }
    } catch (const config_error& e) {
        return fail("config_error", e.what());
    } catch (const argument_error& e) {
        return fail("argument_error", e.what());
    } catch (const convergence_error& e) {
        return fail("convergence_error", e.what());
    } catch (const infeasible_target_error& e) {
        return fail("infeasible_target_error", e.what());
    } catch (const infeasible_dual_error& e) {
        return fail("infeasible_dual_error", e.what());
    } catch (const capacity_error& e) {
        return fail("capacity_error", e.what());
    } catch (const comparison_error& e) {
        return fail("comparison_error", e.what());
    } catch (const std::exception& e) {
        return fail("io_error", e.what());
    }
    return 0;
}

} // namespace swipt
