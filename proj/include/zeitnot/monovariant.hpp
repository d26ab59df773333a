#pragma once
// Single-quality record-chain model: a buyer inspecting N ranked items in
// uniformly random order walks the chain of successive record positions
//
//   p_ij = i / (j (j-1)),  1 <= i < j <= N,    p_i0 = i / N,
//
// competes with a cutoff-policy opponent, and pays a progressive per-step
// fee. This header builds the chain, the opponent's stop-moment law, the
// price sequence, the finite-N optimal cutoff, and the asymptotic cutoff
// equation in both printed readings.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chain.hpp"
#include "rootfind.hpp"
#include "threshold.hpp"

namespace zeitnot {

// Price-formula selector: `rederived` evaluates the price assembled from
// first principles (authoritative); `as_printed` evaluates the published
// closed form literally, stray empty sum read as zero, for auditability.
enum class FormulaMode { rederived, as_printed };

struct MonoParams {
    int N = 0;
    double alpha = 1.0;   // discount/fee rate, (0, 1]
    double c_alpha = 0.0; // reward scale, > 0
    FormulaMode formula_mode = FormulaMode::rederived;
    ZeroStateRule zero_rule = ZeroStateRule::absorbing;

    void validate() const {
        if (N < 2) throw std::invalid_argument("MonoParams: N must be >= 2");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("MonoParams: alpha must lie in (0, 1]");
        if (!(c_alpha > 0.0) || !std::isfinite(c_alpha))
            throw std::invalid_argument("MonoParams: c_alpha must be finite and > 0");
    }
};

// Record chain on {0..N}. Rows telescope to exactly 1:
// sum_{j>i} i/(j(j-1)) = 1 - i/N, plus the absorption mass i/N.
inline TransitionMatrix mono_chain(int N, ZeroStateRule rule = ZeroStateRule::absorbing) {
    if (N < 2) throw std::invalid_argument("mono_chain: N must be >= 2");
    TransitionMatrix P(N + 1, RowMode::stochastic);
    if (rule == ZeroStateRule::absorbing)
        P.at(0, 0) = 1.0;
    else
        P.at(0, 1) = 1.0;
    for (int i = 1; i <= N; ++i) {
        for (int j = i + 1; j <= N; ++j)
            P.at(i, j) = static_cast<double>(i) /
                         (static_cast<double>(j) * static_cast<double>(j - 1));
        P.at(i, 0) = static_cast<double>(i) / static_cast<double>(N);
    }
    P.validate();
    return P;
}

// Stop-moment law of the cutoff-l policy, by forward recursion on the chain
// (authoritative), cross-checked against the closed form
// h_j = (l-1)/(j(j-1)) for j >= l; the largest gap is recorded.
inline StopMomentDistribution mono_stop_distribution(int cutoff, int N) {
    const TransitionMatrix P = mono_chain(N);
    StopMomentDistribution d = detail::threshold_stop_distribution(P, cutoff);
    double gap = 0.0;
    for (int j = cutoff; j <= N; ++j) {
        const double closed = static_cast<double>(cutoff - 1) /
                              (static_cast<double>(j) * static_cast<double>(j - 1));
        gap = std::max(gap, std::fabs(d.weight[static_cast<std::size_t>(j)] - closed));
    }
    d.closed_form_max_gap = gap;
    return d;
}

namespace detail {

// Probability that the opponent has secured the best item by step m:
// G_m = sum_{j=l}^{m} (l-1)/(N(j-1)), zero below the cutoff.
inline std::vector<double> mono_secured_prefix(int cutoff, int N) {
    std::vector<double> g(static_cast<std::size_t>(N) + 1, 0.0);
    for (int m = cutoff; m <= N; ++m)
        g[static_cast<std::size_t>(m)] = g[static_cast<std::size_t>(m - 1)] +
                                         static_cast<double>(cutoff - 1) /
                                             (static_cast<double>(N) * static_cast<double>(m - 1));
    return g;
}

} // namespace detail

// Price sequence V_1..V_N of buyer 1 against an opponent playing cutoff l.
inline PriceSequence<MonoParams> mono_price_sequence(const MonoParams& params, int cutoff) {
    params.validate();
    const int N = params.N;
    if (cutoff < 2 || cutoff > N)
        throw std::invalid_argument("mono_price_sequence: cutoff must lie in [2, N]");

    PriceSequence<MonoParams> seq;
    seq.params = params;
    seq.cutoff = cutoff;
    seq.values.assign(static_cast<std::size_t>(N) + 1, 0.0);

    const double a = params.alpha, c = params.c_alpha;
    const double nn = static_cast<double>(N);

    if (params.formula_mode == FormulaMode::rederived) {
        // V_n = c (n/N)(1 - G_n) - a ((N-1)/N) sum_{k<n} (k/N^2)(1 - G_k)
        const std::vector<double> g = detail::mono_secured_prefix(cutoff, N);
        double fee_acc = 0.0;  // sum_{k=1}^{n-1} (k/N^2)(1 - G_k)
        for (int n = 1; n <= N; ++n) {
            seq.values[static_cast<std::size_t>(n)] =
                c * (n / nn) * (1.0 - g[static_cast<std::size_t>(n)]) -
                a * ((nn - 1.0) / nn) * fee_acc;
            fee_acc += (n / (nn * nn)) * (1.0 - g[static_cast<std::size_t>(n)]);
        }
    } else {
        // Published closed form, literal: reward weight n (not n/N), fee being
        // the full ramp sum_{k=1}^{n-1} k/N^2 plus the cutoff-weighted tail
        // sum_{k=l}^{n} (k/N^2)(1 - ((l-1)/N) H_k), H_k = sum_{j=l}^k 1/(j-1).
        std::vector<double> h(static_cast<std::size_t>(N) + 1, 0.0);
        for (int m = cutoff; m <= N; ++m)
            h[static_cast<std::size_t>(m)] =
                h[static_cast<std::size_t>(m - 1)] + 1.0 / static_cast<double>(m - 1);
        double tail_acc = 0.0;  // sum_{k=l}^{n} (k/N^2)(1 - ((l-1)/N) H_k)
        for (int n = 1; n <= N; ++n) {
            if (n >= cutoff)
                tail_acc += (n / (nn * nn)) *
                            (1.0 - ((cutoff - 1) / nn) * h[static_cast<std::size_t>(n)]);
            const double ramp = (static_cast<double>(n) * (n - 1.0)) / (2.0 * nn * nn);
            seq.values[static_cast<std::size_t>(n)] =
                c * n * (1.0 - ((cutoff - 1) / nn) * h[static_cast<std::size_t>(n)]) -
                a * ((nn - 1.0) / nn) * ramp -
                a * ((nn - 1.0) / nn) * tail_acc;
        }
    }
    return seq;
}

// Smallest cutoff l with (PV)_{l-1} > V_{l-1} and (PV)_l <= V_l, V being the
// price sequence under the same cutoff. The clean continue/stop partition is
// verified when c_alpha >= alpha/2 (the regime where it is guaranteed).
inline ThresholdReport mono_optimal_threshold(const MonoParams& params) {
    params.validate();
    const TransitionMatrix P = mono_chain(params.N, params.zero_rule);
    const bool check_partition = params.c_alpha >= params.alpha / 2.0 - 1e-15;
    return detail::scan_threshold(
        P, [&](int l) { return mono_price_sequence(params, l).values; }, check_partition);
}

// Invariant form of the asymptotic cutoff equation (the c_a = a/2 case):
//   1 + ln z + (z/2) ln^2 z + z(1-z) - z^2 (ln z + (1-z)(3-z)/2).
inline double mono_invariant_residual(double z) {
    if (!(z > 0.0) || !(z < 1.0))
        throw std::domain_error("mono_invariant_residual: z must lie in (0, 1)");
    const double lz = std::log(z);
    return 1.0 + lz + 0.5 * z * lz * lz + z * (1.0 - z) -
           z * z * (lz + 0.5 * (1.0 - z) * (3.0 - z));
}

// General-fee asymptotic residual, scaled by the positive constant 2/alpha
// (roots unchanged) so that at c_a = a/2 the additive reading coincides
// literally with mono_invariant_residual. The bracketed tail is printed
// ambiguously, hence the two registered readings:
//   A: - z^2 (ln z + (1-z)(3-z)/2)        B: - z^2 ln z (1-z)(3-z)/2
inline double mono_asymptotic_residual(double z, double c_alpha, double alpha,
                                       MonoVariant variant) {
    if (!(z > 0.0) || !(z < 1.0))
        throw std::domain_error("mono_asymptotic_residual: z must lie in (0, 1)");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("mono_asymptotic_residual: alpha must lie in (0, 1]");
    if (!(c_alpha > 0.0))
        throw std::invalid_argument("mono_asymptotic_residual: c_alpha must be > 0");
    const double g = 2.0 * c_alpha / alpha;
    const double lz = std::log(z);
    const double base = g * (1.0 + lz + 0.5 * z * lz * lz) + z * (1.0 - z);
    const double tail = variant == MonoVariant::additive_bracket
                            ? z * z * (lz + 0.5 * (1.0 - z) * (3.0 - z))
                            : z * z * lz * 0.5 * (1.0 - z) * (3.0 - z);
    return base - tail;
}

inline AsymptoticSolution mono_solve_asymptotic(double c_alpha, double alpha,
                                                MonoVariant variant,
                                                const RootScanOptions& opts = {}) {
    AsymptoticSolution sol;
    sol.interpretation = interpretation("mono_finite_fee_asymptotic",
                                        variant == MonoVariant::additive_bracket
                                            ? "A_additive_bracket"
                                            : "B_multiplicative_bracket");
    sol.c_alpha = c_alpha;
    sol.alpha = alpha;
    sol.beta = 4.0 * c_alpha / alpha;
    if (c_alpha - alpha / 2.0 < -1e-15) {
        sol.regime_warning = true;
        sol.regime_note = "c_alpha < alpha/2: price positivity constraint violated; "
                          "roots reported anyway";
    }
    sol.scan = find_roots(
        [&](double z) { return mono_asymptotic_residual(z, c_alpha, alpha, variant); }, opts);
    return sol;
}

inline AsymptoticSolution mono_solve_invariant(const RootScanOptions& opts = {}) {
    AsymptoticSolution sol;
    sol.interpretation = interpretation("mono_invariant_form", "-");
    sol.scan = find_roots([](double z) { return mono_invariant_residual(z); }, opts);
    return sol;
}

} // namespace zeitnot
