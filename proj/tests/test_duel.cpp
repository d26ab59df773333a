#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <zeitnot/zeitnot.hpp>

#include "oracles.hpp"

using namespace zeitnot;

namespace {

// Independent restatement of one buyer's walk for the enumeration oracle.
struct Walk {
    int stop = 0;
    bool got = false;
    int bp1 = 0, bp2 = 0;  // pre-stop positions holding a top item
};

Walk walk(const std::vector<int>& x, const std::vector<int>& y, int l, bool conjunctive) {
    const int N = static_cast<int>(x.size());
    Walk w;
    w.stop = N + 1;
    int mx = 0, my = 0;
    for (int t = 1; t <= N; ++t) {
        const int a = x[static_cast<std::size_t>(t - 1)];
        const int b = y.empty() ? 0 : y[static_cast<std::size_t>(t - 1)];
        const bool top = y.empty() ? a == N : (conjunctive ? (a == N && b == N)
                                                           : (a == N || b == N));
        const bool record = a > mx || (!y.empty() && b > my);
        if (t >= l && record) {
            w.stop = t;
            w.got = top;
            return w;
        }
        if (top) {
            if (w.bp1 == 0) w.bp1 = t;
            else w.bp2 = t;
        }
        mx = std::max(mx, a);
        my = std::max(my, b);
    }
    return w;
}

long long walk_fee(const Walk& s, const Walk& o) {
    long long cap = s.stop - 1;
    if (o.got) cap = std::min<long long>(cap, o.stop - 1);
    long long units = cap * (cap + 1) / 2;
    if (s.bp1 != 0 && s.bp1 <= cap) units -= s.bp1;
    if (s.bp2 != 0 && s.bp2 <= cap) units -= s.bp2;
    return units;
}

struct Tally {
    long long total = 0, wins1 = 0, wins2 = 0, ties = 0, neither = 0;
    long long fees1 = 0, fees2 = 0;
};

void score(const Walk& w1, const Walk& w2, Tally& t) {
    ++t.total;
    const bool win1 = w1.got && (!w2.got || w1.stop < w2.stop);
    const bool win2 = w2.got && (!w1.got || w2.stop < w1.stop);
    const bool tie = w1.got && w2.got && w1.stop == w2.stop;
    t.wins1 += win1;
    t.wins2 += win2;
    t.ties += tie;
    t.neither += !win1 && !win2 && !tie;
    t.fees1 += walk_fee(w1, w2);
    t.fees2 += walk_fee(w2, w1);
}

void require_matches(const DuelReport& rep, const Tally& t, const DuelConfig& cfg) {
    REQUIRE(rep.samples == t.total);
    const double d = cfg.alpha / (static_cast<double>(cfg.N) * cfg.N);
    const double p1 = cfg.c_alpha * (static_cast<double>(t.wins1) / t.total) -
                      d * (static_cast<double>(t.fees1) / t.total);
    const double p2 = cfg.c_alpha * (static_cast<double>(t.wins2) / t.total) -
                      d * (static_cast<double>(t.fees2) / t.total);
    CHECK(rep.expected_payoff1 == Catch::Approx(p1).margin(1e-12));
    CHECK(rep.expected_payoff2 == Catch::Approx(p2).margin(1e-12));
    CHECK(rep.win1 == Catch::Approx(static_cast<double>(t.wins1) / t.total).margin(1e-12));
    CHECK(rep.win2 == Catch::Approx(static_cast<double>(t.wins2) / t.total).margin(1e-12));
    CHECK(rep.tie == Catch::Approx(static_cast<double>(t.ties) / t.total).margin(1e-12));
    CHECK(rep.neither ==
          Catch::Approx(static_cast<double>(t.neither) / t.total).margin(1e-12));
    CHECK(rep.mean_fee1 ==
          Catch::Approx(d * static_cast<double>(t.fees1) / t.total).margin(1e-12));
    CHECK(rep.mean_fee2 ==
          Catch::Approx(d * static_cast<double>(t.fees2) / t.total).margin(1e-12));
}

} // namespace

TEST_CASE("exact engine equals direct enumeration of all draw pairs") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 4;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;

    const auto perms = oracles::all_permutations(4);
    for (auto [l1, l2] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {1, 5}}) {
        cfg.l1 = l1;
        cfg.l2 = l2;
        Tally t;
        for (const auto& o1 : perms)
            for (const auto& o2 : perms)
                score(walk(o1, {}, l1, false), walk(o2, {}, l2, false), t);
        CAPTURE(l1, l2);
        const DuelReport rep = exact_expected_payoff(cfg);
        require_matches(rep, t, cfg);
        CHECK_FALSE(rep.has_std_error);
    }
}

TEST_CASE("exact engine frozen values at the symmetric reference point") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 4;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    const DuelReport rep = exact_expected_payoff(cfg);
    CHECK(rep.samples == 576);
    CHECK(rep.expected_payoff1 == Catch::Approx(-0.00564236111111).margin(1e-12));
    CHECK(rep.expected_payoff2 == Catch::Approx(rep.expected_payoff1).margin(1e-15));
    CHECK(rep.win1 == Catch::Approx(0.310763888889).margin(1e-12));
    CHECK(rep.win2 == Catch::Approx(rep.win1).margin(1e-15));
    CHECK(rep.tie == Catch::Approx(0.0850694444444).margin(1e-12));
    CHECK(rep.neither == Catch::Approx(0.293402777778).margin(1e-12));
    CHECK(rep.win1 + rep.win2 + rep.tie + rep.neither == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("two-quality exact engine equals the four-permutation enumeration") {
    DuelConfig cfg;
    cfg.model = Model::bi;
    cfg.N = 3;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;

    const auto perms = oracles::all_permutations(3);
    for (BestEvent ev : {BestEvent::either_coordinate, BestEvent::both_coordinates}) {
        cfg.best_event = ev;
        const bool conj = ev == BestEvent::both_coordinates;
        Tally t;
        for (const auto& o1 : perms)
            for (const auto& q1 : perms)
                for (const auto& o2 : perms)
                    for (const auto& q2 : perms)
                        score(walk(o1, q1, cfg.l1, conj), walk(o2, q2, cfg.l2, conj), t);
        CAPTURE(conj);
        REQUIRE(t.total == 1296);
        require_matches(exact_expected_payoff(cfg), t, cfg);
    }
}

TEST_CASE("never-stop policies pay the analytic fee drag") {
    for (int N : {4, 5, 7}) {
        DuelConfig cfg;
        cfg.model = Model::mono;
        cfg.N = N;
        cfg.l1 = N + 1;
        cfg.l2 = N + 1;
        cfg.alpha = 0.5;
        cfg.c_alpha = 0.25;
        const DuelReport rep = exact_expected_payoff(cfg);
        const double expect = -cfg.alpha * (static_cast<double>(N) * N - 1.0) /
                              (2.0 * static_cast<double>(N) * N);
        CAPTURE(N);
        CHECK(rep.expected_payoff1 == Catch::Approx(expect).margin(1e-14));
        CHECK(rep.expected_payoff2 == Catch::Approx(expect).margin(1e-14));
        CHECK(rep.win1 == 0.0);
        CHECK(rep.tie == 0.0);
        CHECK(rep.neither == 1.0);
    }
}

TEST_CASE("exact engine size caps raise the dedicated error") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 8;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    CHECK_THROWS_AS(exact_expected_payoff(cfg), size_cap_error);
    cfg.model = Model::bi;
    cfg.N = 7;
    CHECK_THROWS_AS(exact_expected_payoff(cfg), size_cap_error);
    cfg.N = 6;
    CHECK_NOTHROW(exact_expected_payoff(cfg));
}

TEST_CASE("single-draw replay validates its inputs") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 3;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;

    PortfolioDraw draw;
    draw.order1 = {2, 3, 1};
    draw.order2 = {1, 2, 3};
    const PlayResult r = play_duel(draw, cfg);
    // Buyer 1 stops at position 2 on rank 3 (the top item); buyer 2 stops at
    // position 2 on rank 2. One fee-bearing step each.
    CHECK(r.buyer1.stop == 2);
    CHECK(r.buyer1.got);
    CHECK(r.buyer2.stop == 2);
    CHECK_FALSE(r.buyer2.got);
    CHECK(r.win1);
    CHECK_FALSE(r.tie);
    CHECK(r.fee_units1 == 1);
    CHECK(r.fee_units2 == 1);

    PortfolioDraw bad = draw;
    bad.order1 = {1, 1, 3};
    CHECK_THROWS_AS(play_duel(bad, cfg), std::invalid_argument);
    bad = draw;
    bad.order1 = {1, 2};
    CHECK_THROWS_AS(play_duel(bad, cfg), std::invalid_argument);
    bad = draw;
    bad.quality1 = {1, 2, 3};
    CHECK_THROWS_AS(play_duel(bad, cfg), std::invalid_argument);
}

TEST_CASE("monte carlo runs are bit-reproducible and seed-sensitive") {
    DuelConfig cfg;
    cfg.model = Model::bi;
    cfg.N = 10;
    cfg.l1 = 3;
    cfg.l2 = 3;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    cfg.engine = DuelEngine::monte_carlo;
    cfg.trials = 40'000;
    cfg.seed = 123;

    const DuelReport a = monte_carlo(cfg);
    const DuelReport b = monte_carlo(cfg);
    CHECK(a.expected_payoff1 == b.expected_payoff1);
    CHECK(a.expected_payoff2 == b.expected_payoff2);
    CHECK(a.win1 == b.win1);
    CHECK(a.mean_fee1 == b.mean_fee1);
    CHECK(a.std_error1 == b.std_error1);
    CHECK(a.stop_count1 == b.stop_count1);
    CHECK(a.stop_count2 == b.stop_count2);
    CHECK(a.has_std_error);
    CHECK(a.samples == cfg.trials);

    DuelConfig other = cfg;
    other.seed = 124;
    const DuelReport c = monte_carlo(other);
    CHECK(a.expected_payoff1 != c.expected_payoff1);
}

TEST_CASE("monte carlo agrees with the exact engine within four sigma") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 5;
    cfg.l1 = 2;
    cfg.l2 = 3;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    const DuelReport exact = exact_expected_payoff(cfg);

    cfg.engine = DuelEngine::monte_carlo;
    cfg.trials = 200'000;
    cfg.seed = 77;
    const DuelReport mc = monte_carlo(cfg);

    const auto binom_sigma = [&](double p) {
        return std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(cfg.trials));
    };
    CHECK(std::fabs(mc.expected_payoff1 - exact.expected_payoff1) <= 4.0 * mc.std_error1);
    CHECK(std::fabs(mc.expected_payoff2 - exact.expected_payoff2) <= 4.0 * mc.std_error2);
    CHECK(std::fabs(mc.mean_fee1 - exact.mean_fee1) <= 4.0 * mc.std_error_fee1);
    CHECK(std::fabs(mc.mean_fee2 - exact.mean_fee2) <= 4.0 * mc.std_error_fee2);
    CHECK(std::fabs(mc.win1 - exact.win1) <= 4.0 * binom_sigma(exact.win1));
    CHECK(std::fabs(mc.win2 - exact.win2) <= 4.0 * binom_sigma(exact.win2));
    CHECK(std::fabs(mc.tie - exact.tie) <= 4.0 * binom_sigma(exact.tie));
    CHECK(mc.std_error1 > 0.0);
    CHECK(mc.std_error_fee1 > 0.0);
}

TEST_CASE("stop-time marginals are plausible and consistent") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 4;
    cfg.l1 = 2;
    cfg.l2 = 3;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    const DuelReport rep = exact_expected_payoff(cfg);
    REQUIRE(rep.stop_count1.size() == static_cast<std::size_t>(cfg.N) + 2);
    long long sum1 = 0, sum2 = 0;
    for (int t = 1; t <= cfg.N + 1; ++t) {
        sum1 += rep.stop_count1[static_cast<std::size_t>(t)];
        sum2 += rep.stop_count2[static_cast<std::size_t>(t)];
    }
    CHECK(sum1 == rep.stop_denom);
    CHECK(sum2 == rep.stop_denom);
    // Cutoff 2 never stops exactly when the best-so-far sits at position 1:
    // probability 1/4 at N = 4.
    CHECK(static_cast<double>(rep.stop_count1[5]) / static_cast<double>(rep.stop_denom) ==
          Catch::Approx(0.25).margin(1e-15));
    // No stops before the cutoff.
    CHECK(rep.stop_count1[1] == 0);
    CHECK(rep.stop_count1[2] > 0);
    CHECK(rep.stop_count2[2] == 0);
    CHECK(rep.stop_count2[3] > 0);
}

TEST_CASE("best response and symmetric equilibrium at the reference fee") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 6;
    cfg.l2 = 3;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    const BestResponseReport br = best_response(cfg);
    REQUIRE(br.payoff1.size() == static_cast<std::size_t>(cfg.N) + 2);
    CHECK(br.l1_star == 1);
    // Stopping immediately pays no fee and wins when the first item is best
    // and the opponent never secures: the value c/N is hard to beat here.
    CHECK(br.payoff1[1] == Catch::Approx(0.25 / 6.0).margin(1e-9));
    for (int l = 1; l <= cfg.N + 1; ++l)
        CHECK(br.payoff1[static_cast<std::size_t>(l)] <= br.payoff1[1] + 1e-15);

    for (int N : {4, 5, 6}) {
        DuelConfig sym;
        sym.model = Model::mono;
        sym.N = N;
        sym.alpha = 0.5;
        sym.c_alpha = 0.25;
        const EquilibriumReport eq = symmetric_equilibrium(sym);
        CAPTURE(N);
        CHECK(eq.converged);
        CHECK(eq.cutoff == 1);
    }
}

TEST_CASE("duel configuration validation") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 4;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    CHECK_NOTHROW(cfg.validate());

    DuelConfig bad = cfg;
    bad.N = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.l1 = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.l2 = 6;  // N + 2
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.engine = DuelEngine::monte_carlo;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
