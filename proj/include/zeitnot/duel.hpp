#pragma once
// Two-buyer duel simulator. Each buyer inspects the portfolio in an
// independent uniform order (plus an independent second-quality order in the
// two-coordinate model), plays a cutoff policy, earns c_a when the item it
// stops on is the overall best and the opponent has not secured the best
// strictly earlier (simultaneous grabs award nobody), and pays the
// progressive fee a * sum_{k < tau} k/N^2 over steps where the inspected
// item was not the best and the opponent was not already holding the best.
//
// Two engines share the same per-draw rules: an exact engine that averages
// over the full product measure of draws, and a Monte Carlo engine whose
// per-trial substreams and integer accumulators make every run bit-identical
// for a fixed (seed, trials) no matter how the work is scheduled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace zeitnot {

enum class Model { mono, bi };
enum class DuelEngine { exact, monte_carlo };

// What counts as "the best item" in the two-coordinate model: the published
// disjunctive reading (top in either coordinate) or the conjunctive variant.
enum class BestEvent { either_coordinate, both_coordinates };

// Raised when an exact enumeration is requested beyond its size cap.
class size_cap_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DuelConfig {
    Model model = Model::mono;
    int N = 0;
    int l1 = 1, l2 = 1;  // cutoffs in [1, N+1]; N+1 never stops
    double alpha = 0.0;  // fee rate in [0, 1]
    double c_alpha = 1.0;
    DuelEngine engine = DuelEngine::exact;
    long long trials = 1'000'000;
    std::uint64_t seed = 0;
    BestEvent best_event = BestEvent::either_coordinate;

    void validate() const {
        if (N < 2) throw std::invalid_argument("DuelConfig: N must be >= 2");
        if (l1 < 1 || l1 > N + 1 || l2 < 1 || l2 > N + 1)
            throw std::invalid_argument("DuelConfig: cutoffs must lie in [1, N+1]");
        if (!(alpha >= 0.0) || alpha > 1.0)
            throw std::invalid_argument("DuelConfig: alpha must lie in [0, 1]");
        if (!(c_alpha > 0.0))
            throw std::invalid_argument("DuelConfig: c_alpha must be > 0");
        if (engine == DuelEngine::monte_carlo && trials < 1)
            throw std::invalid_argument("DuelConfig: trials must be >= 1");
    }
};

// One joint realization: each buyer's inspection order (rank of the item
// seen at each step) and, in the bi model, its second-quality ranks.
struct PortfolioDraw {
    std::vector<int> order1, order2;
    std::vector<int> quality1, quality2;  // empty in the mono model
};

// Everything the payoff rules need to know about one buyer's walk: when it
// stopped (N+1 = never), whether the stopped item was the best, and the up
// to two pre-stop positions where the inspected item was the best (those
// steps are fee-free).
struct BuyerOutcome {
    int stop = 0;
    bool got = false;
    int best_pos1 = 0, best_pos2 = 0;  // 0 = none
};

struct PlayResult {
    BuyerOutcome buyer1, buyer2;
    bool win1 = false, win2 = false, tie = false;
    long long fee_units1 = 0, fee_units2 = 0;  // in units of 1/N^2, pre-alpha
    double payoff1 = 0.0, payoff2 = 0.0;
};

struct DuelReport {
    DuelConfig config;
    long long samples = 0;  // joint draws averaged (exact) or trials (mc)
    double expected_payoff1 = 0.0, expected_payoff2 = 0.0;
    double win1 = 0.0, win2 = 0.0, tie = 0.0, neither = 0.0;
    double mean_fee1 = 0.0, mean_fee2 = 0.0;  // alpha-scaled expected fee
    bool has_std_error = false;
    double std_error1 = 0.0, std_error2 = 0.0;          // of the expected payoffs
    double std_error_fee1 = 0.0, std_error_fee2 = 0.0;  // of the mean fees
    // Marginal stop-time counts, index 1..N+1, over stop_denom draws/trials.
    std::vector<long long> stop_count1, stop_count2;
    long long stop_denom = 0;
};

namespace detail {

inline BuyerOutcome trace_buyer(const std::vector<int>& order,
                                const std::vector<int>& quality, int cutoff,
                                BestEvent ev) {
    const int N = static_cast<int>(order.size());
    const bool bi = !quality.empty();
    BuyerOutcome out;
    out.stop = N + 1;
    int maxx = 0, maxy = 0;
    for (int t = 1; t <= N; ++t) {
        const int x = order[static_cast<std::size_t>(t - 1)];
        const int y = bi ? quality[static_cast<std::size_t>(t - 1)] : 0;
        const bool record = x > maxx || (bi && y > maxy);
        const bool best_item = bi ? (ev == BestEvent::either_coordinate
                                         ? (x == N || y == N)
                                         : (x == N && y == N))
                                  : (x == N);
        if (t >= cutoff && record) {
            out.stop = t;
            out.got = best_item;
            return out;
        }
        if (best_item) {
            if (out.best_pos1 == 0) out.best_pos1 = t;
            else out.best_pos2 = t;
        }
        maxx = std::max(maxx, x);
        if (bi) maxy = std::max(maxy, y);
    }
    return out;
}

// Fee-bearing step count: k < tau(self), capped at k < tau(opp) once the
// opponent holds the best, minus the fee-free best-item steps in range.
inline long long fee_units(const BuyerOutcome& self, const BuyerOutcome& opp) {
    long long cap = self.stop - 1;
    if (opp.got) cap = std::min<long long>(cap, opp.stop - 1);
    long long units = cap * (cap + 1) / 2;
    if (self.best_pos1 != 0 && self.best_pos1 <= cap) units -= self.best_pos1;
    if (self.best_pos2 != 0 && self.best_pos2 <= cap) units -= self.best_pos2;
    return units;
}

inline void score_pair(const BuyerOutcome& o1, const BuyerOutcome& o2,
                       const DuelConfig& cfg, PlayResult& r) {
    r.buyer1 = o1;
    r.buyer2 = o2;
    r.win1 = o1.got && (!o2.got || o1.stop < o2.stop);
    r.win2 = o2.got && (!o1.got || o2.stop < o1.stop);
    r.tie = o1.got && o2.got && o1.stop == o2.stop;
    r.fee_units1 = fee_units(o1, o2);
    r.fee_units2 = fee_units(o2, o1);
    const double d = cfg.alpha / (static_cast<double>(cfg.N) * static_cast<double>(cfg.N));
    r.payoff1 = cfg.c_alpha * (r.win1 ? 1.0 : 0.0) - d * static_cast<double>(r.fee_units1);
    r.payoff2 = cfg.c_alpha * (r.win2 ? 1.0 : 0.0) - d * static_cast<double>(r.fee_units2);
}

inline void check_permutation(const std::vector<int>& p, int N, const char* name) {
    if (static_cast<int>(p.size()) != N)
        throw std::invalid_argument(std::string("play_duel: ") + name + " has wrong length");
    std::vector<char> seen(static_cast<std::size_t>(N) + 1, 0);
    for (int v : p) {
        if (v < 1 || v > N || seen[static_cast<std::size_t>(v)])
            throw std::invalid_argument(std::string("play_duel: ") + name +
                                        " is not a permutation of 1..N");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

// Flat histogram over BuyerOutcome values; key space is tiny.
struct OutcomeHistogram {
    int N = 0;
    std::vector<long long> count;  // indexed by encode()

    explicit OutcomeHistogram(int n)
        : N(n),
          count(static_cast<std::size_t>(2 * (n + 2) * (n + 2) * (n + 2)), 0) {}

    std::size_t encode(const BuyerOutcome& o) const {
        const int base = N + 2;
        return static_cast<std::size_t>(
            ((o.stop * 2 + (o.got ? 1 : 0)) * base + o.best_pos1) * base + o.best_pos2);
    }
    BuyerOutcome decode(std::size_t key) const {
        const int base = N + 2;
        BuyerOutcome o;
        o.best_pos2 = static_cast<int>(key % static_cast<std::size_t>(base));
        key /= static_cast<std::size_t>(base);
        o.best_pos1 = static_cast<int>(key % static_cast<std::size_t>(base));
        key /= static_cast<std::size_t>(base);
        o.got = (key % 2) != 0;
        o.stop = static_cast<int>(key / 2);
        return o;
    }
    void add(const BuyerOutcome& o) { ++count[encode(o)]; }
};

// Exhaustive per-buyer outcome histogram over every draw of this buyer:
// N! inspection orders, times N! quality orders in the bi model.
inline OutcomeHistogram enumerate_buyer(const DuelConfig& cfg, int cutoff) {
    OutcomeHistogram hist(cfg.N);
    std::vector<int> order(static_cast<std::size_t>(cfg.N));
    for (int i = 0; i < cfg.N; ++i) order[static_cast<std::size_t>(i)] = i + 1;
    if (cfg.model == Model::mono) {
        const std::vector<int> no_quality;
        do {
            hist.add(trace_buyer(order, no_quality, cutoff, cfg.best_event));
        } while (std::next_permutation(order.begin(), order.end()));
        return hist;
    }
    std::vector<int> quality(static_cast<std::size_t>(cfg.N));
    do {
        for (int i = 0; i < cfg.N; ++i) quality[static_cast<std::size_t>(i)] = i + 1;
        do {
            hist.add(trace_buyer(order, quality, cutoff, cfg.best_event));
        } while (std::next_permutation(quality.begin(), quality.end()));
    } while (std::next_permutation(order.begin(), order.end()));
    return hist;
}

inline long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace detail

// Play out a single joint draw under the duel rules.
inline PlayResult play_duel(const PortfolioDraw& draw, const DuelConfig& cfg) {
    cfg.validate();
    detail::check_permutation(draw.order1, cfg.N, "order1");
    detail::check_permutation(draw.order2, cfg.N, "order2");
    if (cfg.model == Model::bi) {
        detail::check_permutation(draw.quality1, cfg.N, "quality1");
        detail::check_permutation(draw.quality2, cfg.N, "quality2");
    } else if (!draw.quality1.empty() || !draw.quality2.empty()) {
        throw std::invalid_argument("play_duel: quality ranks given for the mono model");
    }
    const BuyerOutcome o1 =
        detail::trace_buyer(draw.order1, draw.quality1, cfg.l1, cfg.best_event);
    const BuyerOutcome o2 =
        detail::trace_buyer(draw.order2, draw.quality2, cfg.l2, cfg.best_event);
    PlayResult r;
    detail::score_pair(o1, o2, cfg, r);
    return r;
}

// Exact expectation over the full product measure of draws. The average is
// computed from the two per-buyer outcome histograms — the pair payoff
// depends on a draw only through the outcomes, so this equals averaging
// play_duel over all (N!)^2 (mono) or (N!)^4 (bi) draw tuples. Integer
// accumulators keep every reported probability an exact rational.
inline DuelReport exact_expected_payoff(const DuelConfig& cfg) {
    cfg.validate();
    const int cap = cfg.model == Model::mono ? 7 : 6;
    if (cfg.N > cap)
        throw size_cap_error("exact engine caps at N = " + std::to_string(cap) +
                             (cfg.model == Model::mono ? " for the mono model"
                                                       : " for the bi model"));

    const detail::OutcomeHistogram h1 = detail::enumerate_buyer(cfg, cfg.l1);
    const detail::OutcomeHistogram h2 = detail::enumerate_buyer(cfg, cfg.l2);

    long long win1 = 0, win2 = 0, tie = 0;
    long long fee1 = 0, fee2 = 0;
    long long total = 0;
    for (std::size_t k1 = 0; k1 < h1.count.size(); ++k1) {
        if (h1.count[k1] == 0) continue;
        const BuyerOutcome o1 = h1.decode(k1);
        for (std::size_t k2 = 0; k2 < h2.count.size(); ++k2) {
            if (h2.count[k2] == 0) continue;
            const BuyerOutcome o2 = h2.decode(k2);
            const long long w = h1.count[k1] * h2.count[k2];
            total += w;
            if (o1.got && (!o2.got || o1.stop < o2.stop)) win1 += w;
            if (o2.got && (!o1.got || o2.stop < o1.stop)) win2 += w;
            if (o1.got && o2.got && o1.stop == o2.stop) tie += w;
            fee1 += w * detail::fee_units(o1, o2);
            fee2 += w * detail::fee_units(o2, o1);
        }
    }

    DuelReport rep;
    rep.config = cfg;
    rep.config.engine = DuelEngine::exact;
    rep.samples = total;
    const double tot = static_cast<double>(total);
    const double d = cfg.alpha / (static_cast<double>(cfg.N) * static_cast<double>(cfg.N));
    rep.win1 = static_cast<double>(win1) / tot;
    rep.win2 = static_cast<double>(win2) / tot;
    rep.tie = static_cast<double>(tie) / tot;
    rep.neither = static_cast<double>(total - win1 - win2 - tie) / tot;
    rep.mean_fee1 = d * static_cast<double>(fee1) / tot;
    rep.mean_fee2 = d * static_cast<double>(fee2) / tot;
    rep.expected_payoff1 = cfg.c_alpha * rep.win1 - rep.mean_fee1;
    rep.expected_payoff2 = cfg.c_alpha * rep.win2 - rep.mean_fee2;

    rep.stop_count1.assign(static_cast<std::size_t>(cfg.N) + 2, 0);
    rep.stop_count2.assign(static_cast<std::size_t>(cfg.N) + 2, 0);
    for (std::size_t k = 0; k < h1.count.size(); ++k) {
        if (h1.count[k] != 0)
            rep.stop_count1[static_cast<std::size_t>(h1.decode(k).stop)] += h1.count[k];
        if (h2.count[k] != 0)
            rep.stop_count2[static_cast<std::size_t>(h2.decode(k).stop)] += h2.count[k];
    }
    const long long nf = detail::factorial(cfg.N);
    rep.stop_denom = cfg.model == Model::mono ? nf : nf * nf;
    return rep;
}

// Monte Carlo expectation. Trial i draws from substream (seed, i), so the
// result for a fixed (seed, trials) is bit-identical however trials are
// scheduled; all statistics accumulate in integers.
inline DuelReport monte_carlo(const DuelConfig& cfg) {
    cfg.validate();
    const bool bi = cfg.model == Model::bi;

    long long win1 = 0, win2 = 0, tie = 0;
    long long fee1 = 0, fee2 = 0;
    long long winfee1 = 0, winfee2 = 0;
    unsigned __int128 fee1_sq = 0, fee2_sq = 0;
    std::vector<long long> hist1(static_cast<std::size_t>(cfg.N) + 2, 0);
    std::vector<long long> hist2(static_cast<std::size_t>(cfg.N) + 2, 0);

    const std::vector<int> no_quality;
    for (long long trial = 0; trial < cfg.trials; ++trial) {
        Xoshiro256 rng(cfg.seed, static_cast<std::uint64_t>(trial));
        const std::vector<int> order1 = random_permutation(cfg.N, rng);
        const std::vector<int> order2 = random_permutation(cfg.N, rng);
        const std::vector<int> quality1 = bi ? random_permutation(cfg.N, rng) : no_quality;
        const std::vector<int> quality2 = bi ? random_permutation(cfg.N, rng) : no_quality;

        const BuyerOutcome o1 = detail::trace_buyer(order1, quality1, cfg.l1, cfg.best_event);
        const BuyerOutcome o2 = detail::trace_buyer(order2, quality2, cfg.l2, cfg.best_event);

        const bool w1 = o1.got && (!o2.got || o1.stop < o2.stop);
        const bool w2 = o2.got && (!o1.got || o2.stop < o1.stop);
        const long long f1 = detail::fee_units(o1, o2);
        const long long f2 = detail::fee_units(o2, o1);
        win1 += w1 ? 1 : 0;
        win2 += w2 ? 1 : 0;
        tie += (o1.got && o2.got && o1.stop == o2.stop) ? 1 : 0;
        fee1 += f1;
        fee2 += f2;
        winfee1 += w1 ? f1 : 0;
        winfee2 += w2 ? f2 : 0;
        fee1_sq += static_cast<unsigned __int128>(f1) * static_cast<unsigned __int128>(f1);
        fee2_sq += static_cast<unsigned __int128>(f2) * static_cast<unsigned __int128>(f2);
        ++hist1[static_cast<std::size_t>(o1.stop)];
        ++hist2[static_cast<std::size_t>(o2.stop)];
    }

    DuelReport rep;
    rep.config = cfg;
    rep.config.engine = DuelEngine::monte_carlo;
    rep.samples = cfg.trials;
    const double n = static_cast<double>(cfg.trials);
    const double d = cfg.alpha / (static_cast<double>(cfg.N) * static_cast<double>(cfg.N));
    const double c = cfg.c_alpha;
    rep.win1 = static_cast<double>(win1) / n;
    rep.win2 = static_cast<double>(win2) / n;
    rep.tie = static_cast<double>(tie) / n;
    rep.neither = static_cast<double>(cfg.trials - win1 - win2 - tie) / n;
    rep.mean_fee1 = d * static_cast<double>(fee1) / n;
    rep.mean_fee2 = d * static_cast<double>(fee2) / n;
    rep.expected_payoff1 = c * rep.win1 - rep.mean_fee1;
    rep.expected_payoff2 = c * rep.win2 - rep.mean_fee2;

    // Var(c w - d f) from exact integer moments; w^2 = w.
    auto std_err = [&](long long w, long long wf, unsigned __int128 fsq, double mean) {
        const double ex2 = c * c * (static_cast<double>(w) / n) -
                           2.0 * c * d * (static_cast<double>(wf) / n) +
                           d * d * (static_cast<double>(fsq) / n);
        const double var = std::max(0.0, ex2 - mean * mean);
        return std::sqrt(var / n);
    };
    rep.has_std_error = true;
    rep.std_error1 = std_err(win1, winfee1, fee1_sq, rep.expected_payoff1);
    rep.std_error2 = std_err(win2, winfee2, fee2_sq, rep.expected_payoff2);
    auto fee_err = [&](unsigned __int128 fsq, double mean) {
        const double var = std::max(0.0, d * d * (static_cast<double>(fsq) / n) - mean * mean);
        return std::sqrt(var / n);
    };
    rep.std_error_fee1 = fee_err(fee1_sq, rep.mean_fee1);
    rep.std_error_fee2 = fee_err(fee2_sq, rep.mean_fee2);

    rep.stop_count1 = std::move(hist1);
    rep.stop_count2 = std::move(hist2);
    rep.stop_denom = cfg.trials;
    return rep;
}

inline DuelReport run_duel(const DuelConfig& cfg) {
    return cfg.engine == DuelEngine::exact ? exact_expected_payoff(cfg) : monte_carlo(cfg);
}

// Buyer 1's best reply to a fixed opponent cutoff: evaluate every
// l1 in {1..N+1}, ties resolved toward the smaller cutoff. Monte Carlo
// evaluations share the seed across candidates (common random numbers).
struct BestResponseReport {
    DuelConfig config;                // the template the scan was run from
    std::vector<double> payoff1;      // index l1 = 1..N+1
    int l1_star = 1;
};

inline BestResponseReport best_response(const DuelConfig& base) {
    base.validate();
    BestResponseReport rep;
    rep.config = base;
    rep.payoff1.assign(static_cast<std::size_t>(base.N) + 2, 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int l1 = 1; l1 <= base.N + 1; ++l1) {
        DuelConfig cfg = base;
        cfg.l1 = l1;
        const DuelReport r = run_duel(cfg);
        rep.payoff1[static_cast<std::size_t>(l1)] = r.expected_payoff1;
        if (r.expected_payoff1 > best) {
            best = r.expected_payoff1;
            rep.l1_star = l1;
        }
    }
    return rep;
}

// Symmetric pure-cutoff equilibrium by best-response iteration: start the
// opponent at l = 2, replace it with buyer 1's best reply, repeat until a
// fixed point (best reply to l is l) or a revisit. On a cycle the smallest
// member is reported with converged = false.
struct EquilibriumReport {
    DuelConfig config;
    int cutoff = 0;
    bool converged = false;
    std::vector<int> trace;  // visited opponent cutoffs, in order
};

inline EquilibriumReport symmetric_equilibrium(const DuelConfig& base) {
    EquilibriumReport rep;
    rep.config = base;
    std::vector<char> seen(static_cast<std::size_t>(base.N) + 2, 0);
    int l = 2;
    while (!seen[static_cast<std::size_t>(l)]) {
        seen[static_cast<std::size_t>(l)] = 1;
        rep.trace.push_back(l);
        DuelConfig cfg = base;
        cfg.l2 = l;
        const int reply = best_response(cfg).l1_star;
        if (reply == l) {
            rep.cutoff = l;
            rep.converged = true;
            return rep;
        }
        l = reply;
    }
    // Revisited a cutoff: report the smallest member of the cycle.
    int smallest = l;
    bool in_cycle = false;
    for (int v : rep.trace) {
        if (v == l) in_cycle = true;
        if (in_cycle) smallest = std::min(smallest, v);
    }
    rep.cutoff = smallest;
    rep.converged = false;
    return rep;
}

} // namespace zeitnot
