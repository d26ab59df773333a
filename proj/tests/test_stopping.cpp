#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <zeitnot/zeitnot.hpp>

#include "oracles.hpp"

using namespace zeitnot;

namespace {

PayoffSpec random_payoff(int n, Xoshiro256& rng, double alpha) {
    PayoffSpec p;
    p.alpha = alpha;
    p.reward.resize(static_cast<std::size_t>(n));
    p.fee.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        p.reward[static_cast<std::size_t>(i)] = 2.0 * rng.unit();
        p.fee[static_cast<std::size_t>(i)] = rng.unit() - 0.3;  // both signs
    }
    return p;
}

} // namespace

TEST_CASE("value iteration matches exhaustive stop-set policy evaluation") {
    // Every deterministic stop set is evaluated by a linear solve; the
    // iterated value must equal the best of them, state by state.
    const int n = 5;
    for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
        for (double alpha : {0.3, 0.7, 0.95}) {
            Xoshiro256 rng(seed, 77);
            const TransitionMatrix chain = oracles::random_chain(n, rng);
            const PayoffSpec payoff = random_payoff(n, rng, alpha);

            const std::vector<double> best =
                oracles::best_stop_set_value(chain, payoff.reward, payoff.fee, alpha);
            const ValueSolution sol = value_iterate(chain, payoff);
            REQUIRE(sol.converged);
            for (int i = 0; i < n; ++i) {
                CAPTURE(seed, alpha, i);
                CHECK(sol.values[static_cast<std::size_t>(i)] ==
                      Catch::Approx(best[static_cast<std::size_t>(i)]).margin(1e-8));
            }
        }
    }
}

TEST_CASE("folded and transformed fee routes agree") {
    const int n = 6;
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        Xoshiro256 rng(seed, 78);
        const TransitionMatrix chain = oracles::random_chain(n, rng);
        const PayoffSpec payoff = random_payoff(n, rng, 0.8);

        ValueOptions folded;
        folded.route = FeeRoute::folded;
        ValueOptions transformed;
        transformed.route = FeeRoute::transformed;

        const ValueSolution a = value_iterate(chain, payoff, folded);
        const ValueSolution b = value_iterate(chain, payoff, transformed);
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        for (int i = 0; i < n; ++i)
            CHECK(a.values[static_cast<std::size_t>(i)] ==
                  Catch::Approx(b.values[static_cast<std::size_t>(i)]).margin(1e-8));
        CHECK(a.stop_set == b.stop_set);
    }
}

TEST_CASE("iterated value is the smallest excessive majorant") {
    const int n = 6;
    Xoshiro256 rng(31, 79);
    const TransitionMatrix chain = oracles::random_chain(n, rng);
    const PayoffSpec payoff = random_payoff(n, rng, 0.9);
    const ValueSolution sol = value_iterate(chain, payoff);
    REQUIRE(sol.converged);

    const std::vector<double> pv = chain.apply(sol.values);
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        // Majorant: V >= f and V >= alpha P V - c.
        CHECK(sol.values[idx] >= payoff.reward[idx] - 1e-10);
        CHECK(sol.values[idx] >= payoff.alpha * pv[idx] - payoff.fee[idx] - 1e-9);
        // Smallest: the Bellman equation holds with equality.
        const double bellman =
            std::max(payoff.reward[idx], payoff.alpha * pv[idx] - payoff.fee[idx]);
        CHECK(sol.values[idx] == Catch::Approx(bellman).margin(1e-9));
    }

    // The reported stop set is exactly where the value touches the reward.
    std::vector<int> expect;
    for (int i = 0; i < n; ++i)
        if (sol.values[static_cast<std::size_t>(i)] -
                payoff.reward[static_cast<std::size_t>(i)] <= 1e-9)
            expect.push_back(i);
    CHECK(sol.stop_set == expect);
}

TEST_CASE("fee transform satisfies its fixed-point equation on both solver paths") {
    // Dense path (few states) and iterative path (many states).
    for (int N : {40, 299}) {
        const TransitionMatrix chain = mono_chain(N);
        const int n = chain.size();
        std::vector<double> fee(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            fee[static_cast<std::size_t>(i)] =
                static_cast<double>(i) / (static_cast<double>(N) * N);
        const double alpha = 0.5;
        const std::vector<double> fa = fee_transform(chain, fee, alpha);
        const std::vector<double> pfa = chain.apply(fa);
        for (int i = 0; i < n; ++i) {
            CAPTURE(N, i);
            CHECK(fa[static_cast<std::size_t>(i)] ==
                  Catch::Approx(fee[static_cast<std::size_t>(i)] +
                                alpha * pfa[static_cast<std::size_t>(i)])
                      .margin(1e-10));
        }
    }
}

TEST_CASE("fee-free record chain recovers the classical cutoff") {
    // Small sizes against full permutation enumeration.
    for (int N : {4, 5, 6}) {
        const TransitionMatrix chain = mono_chain(N);
        PayoffSpec payoff;
        payoff.alpha = 1.0;
        payoff.reward.assign(static_cast<std::size_t>(N) + 1, 0.0);
        payoff.fee.assign(static_cast<std::size_t>(N) + 1, 0.0);
        for (int i = 1; i <= N; ++i)
            payoff.reward[static_cast<std::size_t>(i)] =
                static_cast<double>(i) / static_cast<double>(N);

        const ValueSolution sol = value_iterate(chain, payoff);
        REQUIRE(sol.converged);
        const double expect = oracles::best_cutoff_value_enumerated(N).value();
        CHECK(sol.values[1] == Catch::Approx(expect).margin(1e-12));
    }

    // Larger size against the closed-form cutoff probabilities (themselves
    // enumeration-verified below).
    const int N = 25;
    const TransitionMatrix chain = mono_chain(N);
    PayoffSpec payoff;
    payoff.alpha = 1.0;
    payoff.reward.assign(static_cast<std::size_t>(N) + 1, 0.0);
    payoff.fee.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int i = 1; i <= N; ++i)
        payoff.reward[static_cast<std::size_t>(i)] =
            static_cast<double>(i) / static_cast<double>(N);
    const ValueSolution sol = value_iterate(chain, payoff);
    REQUIRE(sol.converged);

    int best_l = 1;
    oracles::Fraction best = oracles::cutoff_win_probability_formula(N, 1);
    for (int l = 2; l <= N; ++l) {
        const oracles::Fraction v = oracles::cutoff_win_probability_formula(N, l);
        if (best < v) {
            best = v;
            best_l = l;
        }
    }
    CHECK(sol.values[1] == Catch::Approx(best.value()).margin(1e-10));

    int first_positive_stop = 0;
    for (int s : sol.stop_set)
        if (s >= 1) {
            first_positive_stop = s;
            break;
        }
    CHECK(first_positive_stop == best_l);
}

TEST_CASE("cutoff success formula matches full enumeration") {
    for (int n = 2; n <= 6; ++n)
        for (int l = 1; l <= n; ++l) {
            CAPTURE(n, l);
            CHECK(oracles::cutoff_win_probability_enumerated(n, l) ==
                  oracles::cutoff_win_probability_formula(n, l));
        }
}

TEST_CASE("drift classification separates essential classes by fee drift") {
    // 0 <-> 1 (drift +0.2), 2 <-> 3 (drift -0.1), 4 transient into both,
    // 5 transient into the nonnegative class only.
    TransitionMatrix m(6);
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 1.0;
    m.at(2, 3) = 1.0;
    m.at(3, 2) = 1.0;
    m.at(4, 0) = 0.5;
    m.at(4, 2) = 0.5;
    m.at(5, 5) = 0.5;
    m.at(5, 0) = 0.5;
    const std::vector<double> fee = {0.3, 0.1, -0.4, 0.2, 0.0, 0.0};

    const ClassDecomposition cd = drift_classification(m, fee);
    CHECK(cd.class_count == 4);
    CHECK(cd.class_of[0] == cd.class_of[1]);
    CHECK(cd.class_of[2] == cd.class_of[3]);
    CHECK(cd.class_of[0] != cd.class_of[2]);
    CHECK(cd.class_of[4] != cd.class_of[0]);
    CHECK(cd.class_of[4] != cd.class_of[2]);
    CHECK(cd.class_of[5] != cd.class_of[4]);

    const int a = cd.class_of[0], b = cd.class_of[2];
    const int t4 = cd.class_of[4], t5 = cd.class_of[5];
    CHECK(cd.essential[static_cast<std::size_t>(a)] == 1);
    CHECK(cd.essential[static_cast<std::size_t>(b)] == 1);
    CHECK(cd.essential[static_cast<std::size_t>(t4)] == 0);
    CHECK(cd.essential[static_cast<std::size_t>(t5)] == 0);

    CHECK(cd.drift[static_cast<std::size_t>(a)] == Catch::Approx(0.2).margin(1e-12));
    CHECK(cd.drift[static_cast<std::size_t>(b)] == Catch::Approx(-0.1).margin(1e-12));
    CHECK(cd.stationary[static_cast<std::size_t>(a)][0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(cd.stationary[static_cast<std::size_t>(a)][1] == Catch::Approx(0.5).margin(1e-12));

    CHECK(cd.first_hit_optimal[static_cast<std::size_t>(a)] == 1);
    CHECK(cd.first_hit_optimal[static_cast<std::size_t>(b)] == 0);

    // Only the transient state that can fall into the negative-drift class
    // is barred from stopping plans.
    CHECK(cd.excluded_from_stop == std::vector<char>{0, 0, 0, 0, 1, 0});
}

TEST_CASE("input validation rejects malformed problems") {
    const TransitionMatrix chain = mono_chain(4);
    PayoffSpec payoff;
    payoff.alpha = 0.5;
    payoff.reward.assign(5, 0.1);
    payoff.fee.assign(5, 0.0);

    SECTION("alpha out of range") {
        PayoffSpec bad = payoff;
        bad.alpha = 1.5;
        CHECK_THROWS_AS(value_iterate(chain, bad), std::invalid_argument);
        bad.alpha = 0.0;
        CHECK_THROWS_AS(value_iterate(chain, bad), std::invalid_argument);
    }
    SECTION("negative reward") {
        PayoffSpec bad = payoff;
        bad.reward[2] = -0.1;
        CHECK_THROWS_AS(value_iterate(chain, bad), std::invalid_argument);
    }
    SECTION("length mismatch") {
        PayoffSpec bad = payoff;
        bad.fee.pop_back();
        CHECK_THROWS_AS(value_iterate(chain, bad), std::invalid_argument);
    }
    SECTION("transformed route needs alpha < 1") {
        PayoffSpec p1 = payoff;
        p1.alpha = 1.0;
        ValueOptions opts;
        opts.route = FeeRoute::transformed;
        CHECK_THROWS_AS(value_iterate(chain, p1, opts), std::invalid_argument);
    }
    SECTION("stochastic row sums are enforced") {
        TransitionMatrix bad(3);
        bad.at(0, 1) = 0.6;  // row 0 sums to 0.6
        bad.at(1, 0) = 1.0;
        bad.at(2, 2) = 1.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        TransitionMatrix diag(3, RowMode::diagnostic);
        diag.at(0, 1) = 0.6;
        CHECK_NOTHROW(diag.validate());
    }
}

TEST_CASE("deterministic generator produces reproducible streams and permutations") {
    Xoshiro256 a(2024, 5), b(2024, 5), c(2024, 6);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next(), vb = b.next(), vc = c.next();
        all_equal = all_equal && (va == vb);
        any_diff = any_diff || (va != vc);
    }
    CHECK(all_equal);
    CHECK(any_diff);

    Xoshiro256 rng(7, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<int> p = random_permutation(9, rng);
        std::set<int> s(p.begin(), p.end());
        REQUIRE(p.size() == 9);
        CHECK(s.size() == 9);
        CHECK(*s.begin() == 1);
        CHECK(*s.rbegin() == 9);
    }

    Xoshiro256 bounded(99, 1);
    for (int i = 0; i < 200; ++i) CHECK(bounded.below(7) < 7);
}

TEST_CASE("dense solver handles a known system and flags singularity") {
    // x = (1, -2, 3) for a hand-built system.
    std::vector<std::vector<double>> a = {{2, 1, 1}, {1, 3, 2}, {1, 0, 0}};
    const std::vector<double> b = {3, 1, 1};
    const std::vector<double> x = solve_dense(a, b);
    REQUIRE(x.size() == 3);
    CHECK(x[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(x[1] == Catch::Approx(-2.0).margin(1e-12));
    CHECK(x[2] == Catch::Approx(3.0).margin(1e-12));

    std::vector<std::vector<double>> sing = {{1, 2}, {2, 4}};
    CHECK_THROWS_AS(solve_dense(sing, {1, 2}), std::runtime_error);
}
