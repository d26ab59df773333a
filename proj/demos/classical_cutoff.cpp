// Fee-free warm-up: run the generic stopping engine on the record chain with
// reward f(i) = i/N and no discounting. The optimal rule is the familiar
// cutoff policy; the table below shows the engine's value at state 1, the
// cutoff it recovers, and the closed-form success probability of that cutoff
// for a few portfolio sizes.

#include <cstdio>
#include <vector>

#include <zeitnot/chain.hpp>
#include <zeitnot/monovariant.hpp>
#include <zeitnot/stopping.hpp>

namespace {

double cutoff_success(int N, int l) {
    if (l <= 1) return 1.0 / N;
    double sum = 0.0;
    for (int j = l; j <= N; ++j) sum += 1.0 / (j - 1);
    return (l - 1.0) / N * sum;
}

} // namespace

int main() {
    std::printf("%6s %10s %6s %8s %12s\n", "N", "V(1)", "l", "l/N", "success(l)");
    for (const int N : {4, 10, 25, 50, 100, 250}) {
        const zeitnot::TransitionMatrix chain = zeitnot::mono_chain(N);
        zeitnot::PayoffSpec payoff;
        payoff.reward.assign(static_cast<std::size_t>(N) + 1, 0.0);
        payoff.fee.assign(static_cast<std::size_t>(N) + 1, 0.0);
        for (int i = 1; i <= N; ++i)
            payoff.reward[static_cast<std::size_t>(i)] = static_cast<double>(i) / N;
        payoff.alpha = 1.0;

        const zeitnot::ValueSolution sol = zeitnot::value_iterate(chain, payoff);

        // Smallest positive state where stopping is optimal.
        int cutoff = N;
        for (int s : sol.stop_set) {
            if (s >= 1) {
                cutoff = s;
                break;
            }
        }
        std::printf("%6d %10.6f %6d %8.4f %12.6f\n", N, sol.values[1], cutoff,
                    static_cast<double>(cutoff) / N, cutoff_success(N, cutoff));
    }
    std::printf("\n(l/N drifts toward 1/e ~ 0.3679 as N grows.)\n");
    return 0;
}
