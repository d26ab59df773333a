// Two-buyer duel in a dozen lines: exact enumeration against Monte Carlo on
// the same configuration, then a best-reply scan over buyer 1's cutoff.

#include <cstdio>

#include <zeitnot/duel.hpp>

int main() {
    zeitnot::DuelConfig cfg;
    cfg.model = zeitnot::Model::mono;
    cfg.N = 6;
    cfg.l1 = 3;
    cfg.l2 = 3;
    cfg.alpha = 0.2;
    cfg.c_alpha = 1.0;

    const zeitnot::DuelReport exact = zeitnot::exact_expected_payoff(cfg);
    std::printf("exact:        payoff1 = %+.6f  win1 = %.4f  tie = %.4f  fee1 = %.4f\n",
                exact.expected_payoff1, exact.win1, exact.tie, exact.mean_fee1);

    cfg.engine = zeitnot::DuelEngine::monte_carlo;
    cfg.trials = 500'000;
    cfg.seed = 2024;
    const zeitnot::DuelReport mc = zeitnot::monte_carlo(cfg);
    std::printf("monte carlo:  payoff1 = %+.6f +- %.6f   (%lld trials, seed %llu)\n",
                mc.expected_payoff1, mc.std_error1, mc.samples,
                static_cast<unsigned long long>(cfg.seed));

    cfg.engine = zeitnot::DuelEngine::exact;
    const zeitnot::BestResponseReport br = zeitnot::best_response(cfg);
    std::printf("\nbest reply to l2 = %d:\n", cfg.l2);
    for (int l1 = 1; l1 <= cfg.N + 1; ++l1)
        std::printf("  l1 = %d%s  payoff1 = %+.6f%s\n", l1, l1 == cfg.N + 1 ? " (never)" : "",
                    br.payoff1[static_cast<std::size_t>(l1)],
                    l1 == br.l1_star ? "   <-- best" : "");
    return 0;
}
