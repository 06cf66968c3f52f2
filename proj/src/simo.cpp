#include "swipt/simo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace swipt {

namespace {

constexpr int kExhaustiveAntennaCap = 20;

void check_gains(std::span<const double> h, const char* who) {
    if (h.empty()) throw argument_error(std::string(who) + ": empty gain vector");
    for (double g : h)
        if (!(g >= 0.0)) throw argument_error(std::string(who) + ": gains must be >= 0");
}

double masked_sum(std::span<const double> h, std::uint64_t mask) {
    double s = 0.0;
    for (size_t m = 0; m < h.size(); ++m)
        if ((mask >> m) & 1u) s += h[m];
    return s;
}

} // namespace

StateDecision partition_decision(std::span<const double> h, const AntennaPartition& partition,
                                 double p, const LinkParams& params) {
    const double sum_id = masked_sum(h, partition.id_mask);
    const double total = std::accumulate(h.begin(), h.end(), 0.0);
    StateDecision d;
    d.power = p;
    d.split_id = total > 0.0 ? sum_id / total : 1.0;
    d.rate = std::log1p(sum_id * p / params.noise_power);
    d.energy = params.harvest_efficiency * (total - sum_id) * p;
    return d;
}

double mrc_rate(std::span<const double> h, std::span<const double> alpha, double p,
                double sigma2) {
    if (h.size() != alpha.size()) throw argument_error("mrc_rate: length mismatch");
    check_gains(h, "mrc_rate");
    if (!(p >= 0.0) || !(sigma2 > 0.0)) throw argument_error("mrc_rate: bad power or noise");
    double s = 0.0;
    for (size_t m = 0; m < h.size(); ++m) {
        if (!(alpha[m] >= 0.0) || !(alpha[m] <= 1.0))
            throw argument_error("mrc_rate: alpha outside [0,1]");
        s += alpha[m] * h[m];
    }
    return std::log1p(s * p / sigma2);
}

FadingEnsemble ups_reduce(const FadingEnsemble& ens) {
    FadingEnsemble out;
    out.num_states = ens.num_states;
    out.num_antennas = 1;
    out.gains.resize(static_cast<size_t>(ens.num_states));
    for (int i = 0; i < ens.num_states; ++i) out.gains[static_cast<size_t>(i)] = ens.total_gain(i);
    return out;
}

AntennaPartition antenna_switch_exhaustive_no_csit(std::span<const double> h, double P,
                                                   double sigma2, double lambda) {
    check_gains(h, "antenna_switch_exhaustive_no_csit");
    const int m_count = static_cast<int>(h.size());
    if (m_count > kExhaustiveAntennaCap)
        throw capacity_error("antenna_switch_exhaustive_no_csit: too many antennas for 2^M search");
    if (!(P > 0.0) || !(sigma2 > 0.0) || !(lambda >= 0.0))
        throw argument_error("antenna_switch_exhaustive_no_csit: bad arguments");
    if (lambda >= 1.0 / sigma2)
        throw infeasible_dual_error("antenna_switch_exhaustive_no_csit: lambda must be below 1/sigma2");
    const double total = std::accumulate(h.begin(), h.end(), 0.0);
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    for (std::uint64_t mask = 0; mask < (1ull << m_count); ++mask) {
        const double sum_id = masked_sum(h, mask);
        const double obj = std::log1p(sum_id * P / sigma2) + lambda * (total - sum_id) * P;
        if (obj > best) {
            best = obj;
            best_mask = mask;
        }
    }
    return AntennaPartition{best_mask, m_count};
}

double antenna_switch_power(const AntennaPartition& partition, std::span<const double> h,
                            double lambda, double beta, const LinkParams& params) {
    validate(params);
    check_gains(h, "antenna_switch_power");
    if (static_cast<int>(h.size()) != partition.num_antennas)
        throw argument_error("antenna_switch_power: partition/gain size mismatch");
    if (!(lambda >= 0.0) || !(beta >= 0.0))
        throw argument_error("antenna_switch_power: prices must be >= 0");
    const double sum_id = masked_sum(h, partition.id_mask);
    const double sum_eh = masked_sum(h, partition.eh_mask());
    if (lambda * sum_eh >= beta) return params.tx_power_peak;
    if (sum_id <= 0.0) return 0.0; // no rate term and net power price positive
    const double wf = 1.0 / (beta - lambda * sum_eh) - params.noise_power / sum_id;
    return std::clamp(wf, 0.0, params.tx_power_peak);
}

std::pair<AntennaPartition, double> antenna_switch_exhaustive_csit(std::span<const double> h,
                                                                   const LinkParams& params,
                                                                   double lambda, double beta) {
    validate(params);
    check_gains(h, "antenna_switch_exhaustive_csit");
    const int m_count = static_cast<int>(h.size());
    if (m_count > kExhaustiveAntennaCap)
        throw capacity_error("antenna_switch_exhaustive_csit: too many antennas for 2^M search");
    if (!(lambda >= 0.0) || !(beta >= 0.0))
        throw argument_error("antenna_switch_exhaustive_csit: prices must be >= 0");
    if (lambda >= 1.0 / params.noise_power)
        throw infeasible_dual_error("antenna_switch_exhaustive_csit: lambda must be below 1/sigma2");
    const double total = std::accumulate(h.begin(), h.end(), 0.0);
    double best = -std::numeric_limits<double>::infinity();
    AntennaPartition best_part{0, m_count};
    double best_p = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << m_count); ++mask) {
        const AntennaPartition part{mask, m_count};
        const double p = antenna_switch_power(part, h, lambda, beta, params);
        const double sum_id = masked_sum(h, mask);
        const double obj = std::log1p(sum_id * p / params.noise_power) +
                           lambda * (total - sum_id) * p - beta * p;
        if (obj > best) {
            best = obj;
            best_part = part;
            best_p = p;
        }
    }
    return {best_part, best_p};
}

AntennaPartition subset_select(std::span<const double> received_powers, double target,
                               double epsilon, double eta, SubsetStats* stats) {
    const int m_count = static_cast<int>(received_powers.size());
    if (!(target > 0.0)) throw argument_error("subset_select: target must be > 0");
    if (!(epsilon >= 0.0) || !(eta >= 0.0))
        throw argument_error("subset_select: epsilon and eta must be >= 0");
    for (double v : received_powers)
        if (!(v >= 0.0)) throw argument_error("subset_select: powers must be >= 0");
    if (m_count > 64) throw capacity_error("subset_select: bitmask width capped at 64 antennas");
    if (epsilon == 0.0 && m_count > kExhaustiveAntennaCap)
        throw capacity_error("subset_select: exhaustive mode capped at 20 antennas");

    SubsetStats local;
    SubsetStats& st = stats ? *stats : local;
    st = SubsetStats{};
    double smallest_pos = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (double v : received_powers) {
        total += v;
        if (v > 0.0) smallest_pos = std::min(smallest_pos, v);
    }
    if (std::isfinite(smallest_pos)) st.tau = target / smallest_pos;

    AntennaPartition out{0, m_count};
    if (m_count == 0) return out;
    if (total <= target) { // everything fits at the decoder
        out.id_mask = out.all_mask();
        st.achieved_sum = total;
        st.max_list_size = 1;
        return out;
    }

    const double trim = 1.0 + epsilon / (2.0 * m_count);
    const double size_bound =
        2.0 + (epsilon > 0.0 ? 4.0 * m_count * std::max(0.0, std::log(st.tau)) / epsilon
                             : std::numeric_limits<double>::infinity());
    std::vector<double> sums{0.0};
    std::vector<std::uint64_t> wits{0ull};
    std::vector<double> grown_sums;
    std::vector<std::uint64_t> grown_wits;
    for (int i = 0; i < m_count; ++i) {
        const size_t n_prev = sums.size();
        const double v = received_powers[static_cast<size_t>(i)];
        const std::uint64_t bit = 1ull << i;
        // the list and its shifted copy are each sorted; merge in one pass,
        // ties keeping the unshifted entry first so the earlier witness wins
        grown_sums.clear();
        grown_wits.clear();
        grown_sums.reserve(2 * n_prev);
        grown_wits.reserve(2 * n_prev);
        for (size_t a = 0, b = 0; a < n_prev || b < n_prev;) {
            if (b >= n_prev || (a < n_prev && sums[a] <= sums[b] + v)) {
                grown_sums.push_back(sums[a]);
                grown_wits.push_back(wits[a]);
                ++a;
            } else {
                grown_sums.push_back(sums[b] + v);
                grown_wits.push_back(wits[b] | bit);
                ++b;
            }
        }
        sums.assign(1, 0.0);
        wits.assign(1, 0ull);
        for (size_t j = 1; j < grown_sums.size(); ++j) {
            const double s = grown_sums[j];
            if (trim * sums.back() < s && s <= target) {
                sums.push_back(s);
                wits.push_back(grown_wits[j]);
            }
        }
        st.max_list_size = std::max(st.max_list_size, static_cast<int>(sums.size()));
        if (static_cast<double>(sums.size()) > size_bound) st.size_bound_ok = false;
        if (sums.back() >= target / (1.0 + eta)) { // already close enough to the share
            st.early_exit = i + 1 < m_count;
            break;
        }
    }
    out.id_mask = wits.back();
    st.achieved_sum = sums.back();
    return out;
}

StateDecision approx_switching_policy(std::span<const double> h, CsitMode mode,
                                      const DualPoint& duals, const LinkParams& params,
                                      double epsilon, double eta, SubsetStats* stats) {
    validate(params);
    check_gains(h, "approx_switching_policy");
    if (!(duals.lambda >= 0.0) || !(duals.beta >= 0.0))
        throw argument_error("approx_switching_policy: prices must be >= 0");
    double p;
    if (mode == CsitMode::no_csit) {
        p = params.tx_power_avg;
    } else {
        const StateDecision ups = dps_policy_with_csit(total_gain(h), params, duals.lambda, duals.beta);
        p = ups.power;
        if (p == 0.0) return StateDecision{0.0, 1.0, 0.0, 0.0};
    }
    const std::uint64_t all =
        h.size() >= 64 ? ~0ull : (1ull << h.size()) - 1ull;
    if (duals.lambda == 0.0) return partition_decision(h, AntennaPartition{all, static_cast<int>(h.size())}, p,
                              params); // no energy demand
    const double target = 1.0 / duals.lambda - params.noise_power;
    if (target <= 0.0) return partition_decision(h, AntennaPartition{0, static_cast<int>(h.size())}, p, params);
    std::vector<double> received(h.size());
    for (size_t m = 0; m < h.size(); ++m) received[m] = h[m] * p;
    const AntennaPartition part = subset_select(received, target, epsilon, eta, stats);
    return partition_decision(h, part, p, params);
}

} // namespace swipt
