#pragma once
// Machinery shared by the two record-chain models: the stop-moment
// distribution of a cutoff policy, price sequences, and the scan that finds
// the smallest cutoff whose one-step inequalities flip from "continue" to
// "stop".

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "chain.hpp"

namespace zeitnot {

// Distribution of the stop moment tau(l) of a cutoff-l policy on a record
// chain: skip states below l, stop at the first record state >= l.
struct StopMomentDistribution {
    int cutoff = 0;  // l
    int states = 0;  // N
    std::vector<double> weight;       // h_j = P{tau = j}, index 0..N, nonzero on [l, N]
    std::vector<double> record_prob;  // r_j = P{chain visits j}, j = 1..l-1 (diagnostic)
    double deficit = 0.0;             // P{never stops} = 1 - sum h
    double closed_form_max_gap = 0.0; // filled by the model wrappers
};

namespace detail {

// Forward (first-passage) recursion: r_1 = 1; r_j = sum_{i<j} r_i p_ij for
// j < l; h_j = sum_{i<l} r_i p_ij for j >= l. Only upper-triangular rows of
// the chain are read, so defective row masses show up faithfully.
inline StopMomentDistribution threshold_stop_distribution(const TransitionMatrix& chain,
                                                          int cutoff) {
    const int n = chain.size();       // N + 1 states, 0..N
    const int N = n - 1;
    if (cutoff < 2 || cutoff > N)
        throw std::invalid_argument("stop distribution: cutoff must lie in [2, N]");

    StopMomentDistribution d;
    d.cutoff = cutoff;
    d.states = N;
    d.weight.assign(static_cast<std::size_t>(n), 0.0);
    d.record_prob.assign(static_cast<std::size_t>(cutoff), 0.0);
    d.record_prob[1] = 1.0;

    for (int j = 2; j < cutoff; ++j) {
        double acc = 0.0;
        for (int i = 1; i < j; ++i)
            acc += d.record_prob[static_cast<std::size_t>(i)] * chain.at(i, j);
        d.record_prob[static_cast<std::size_t>(j)] = acc;
    }
    double total = 0.0;
    for (int j = cutoff; j <= N; ++j) {
        double acc = 0.0;
        for (int i = 1; i < cutoff; ++i)
            acc += d.record_prob[static_cast<std::size_t>(i)] * chain.at(i, j);
        d.weight[static_cast<std::size_t>(j)] = acc;
        total += acc;
    }
    d.deficit = 1.0 - total;
    return d;
}

} // namespace detail

// Price sequence V_1..V_N of a model under a fixed opponent cutoff.
// values[0] is kept at 0 (state 0 has zero continuation worth) so the vector
// can be fed to TransitionMatrix::apply directly.
template <class Params>
struct PriceSequence {
    Params params{};
    int cutoff = 0;
    std::vector<double> values;
};

enum class ThresholdStatus { found, no_crossing };

struct ThresholdReport {
    ThresholdStatus status = ThresholdStatus::no_crossing;
    int N = 0;
    int cutoff = 0;            // l*
    double z = std::numeric_limits<double>::quiet_NaN();  // l*/N
    // One-step inequality sides at the crossing: continue at l*-1, stop at l*.
    double continue_lhs = 0.0, continue_rhs = 0.0;  // (PV)_{l*-1} vs V_{l*-1}
    double stop_lhs = 0.0, stop_rhs = 0.0;          // (PV)_{l*} vs V_{l*}
    bool partition_checked = false;
    bool partition_ok = false;
    std::vector<double> margin;  // (PV)_j - V_j for j = 1..N at l* (index j)
    // Sign profile of the scan itself, indexed by candidate l (entries 2..N):
    // the two one-step gaps each candidate was judged on. Kept in full so a
    // no-crossing outcome shows exactly how the inequalities slipped past
    // every integer cutoff.
    std::vector<double> scan_continue_gap;  // (PV^l)_{l-1} - V^l_{l-1}
    std::vector<double> scan_stop_gap;      // (PV^l)_l     - V^l_l
};

namespace detail {

// Scan l = 2..N for the smallest cutoff with (PV)_{l-1} > V_{l-1} and
// (PV)_l <= V_l, where V = price(l) is the model's price sequence under the
// same cutoff. Only two rows of P are needed per candidate, and every
// candidate's pair of gaps is kept; the full margin profile is evaluated
// once at the winner. The two inequalities are judged on different price
// sequences (each candidate carries its own), so for some (N, params) no
// integer cutoff satisfies both -- the crossing slips between neighbours.
// That outcome is reported, not patched over.
template <class PriceFn>
ThresholdReport scan_threshold(const TransitionMatrix& chain, PriceFn&& price,
                               bool check_partition) {
    const int n = chain.size();
    const int N = n - 1;
    ThresholdReport rep;
    rep.N = N;
    rep.scan_continue_gap.assign(static_cast<std::size_t>(n), 0.0);
    rep.scan_stop_gap.assign(static_cast<std::size_t>(n), 0.0);

    auto row_dot = [&](int i, const std::vector<double>& v) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += chain.at(i, j) * v[static_cast<std::size_t>(j)];
        return acc;
    };

    int winner = 0;
    std::vector<double> winner_price;
    for (int l = 2; l <= N; ++l) {
        const std::vector<double> v = price(l);
        const double pv_prev = row_dot(l - 1, v);
        const double pv_at = row_dot(l, v);
        const double continue_gap = pv_prev - v[static_cast<std::size_t>(l - 1)];
        const double stop_gap = pv_at - v[static_cast<std::size_t>(l)];
        rep.scan_continue_gap[static_cast<std::size_t>(l)] = continue_gap;
        rep.scan_stop_gap[static_cast<std::size_t>(l)] = stop_gap;
        if (winner == 0 && continue_gap > 0.0 && stop_gap <= 0.0) {
            winner = l;
            winner_price = v;
            rep.continue_lhs = pv_prev;
            rep.continue_rhs = v[static_cast<std::size_t>(l - 1)];
            rep.stop_lhs = pv_at;
            rep.stop_rhs = v[static_cast<std::size_t>(l)];
        }
    }
    if (winner == 0) return rep;  // no_crossing, sign profile attached

    rep.status = ThresholdStatus::found;
    rep.cutoff = winner;
    rep.z = static_cast<double>(winner) / static_cast<double>(N);

    const std::vector<double> pv = chain.apply(winner_price);
    rep.margin.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 1; j <= N; ++j)
        rep.margin[static_cast<std::size_t>(j)] =
            pv[static_cast<std::size_t>(j)] - winner_price[static_cast<std::size_t>(j)];

    rep.partition_checked = check_partition;
    if (check_partition) {
        bool ok = true;
        for (int j = 1; j < winner && ok; ++j)
            ok = rep.margin[static_cast<std::size_t>(j)] > 0.0;
        for (int j = winner; j <= N && ok; ++j)
            ok = rep.margin[static_cast<std::size_t>(j)] <= 0.0;
        rep.partition_ok = ok;
    }
    return rep;
}

} // namespace detail

} // namespace zeitnot
