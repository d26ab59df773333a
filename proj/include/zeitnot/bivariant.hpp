#pragma once
// Two-quality record-chain model: items carry two independent ranks and a
// position is a record when it improves on either coordinate. The published
// transition rule
//
//   p_ij = (2j(j-1) - i) i^2 / (j^2 (j-1)^2 (2i-1)),  1 <= i < j <= N,
//
// with remainder mass to state 0 is defective for some rows (the upper mass
// alone can exceed 1), so the chain is built in two modes: `as_printed`
// keeps the rows verbatim, clamps the negative remainder to zero and records
// the excess; `row_normalized` rescales each row to a proper distribution.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chain.hpp"
#include "rootfind.hpp"
#include "threshold.hpp"

namespace zeitnot {

enum class ChainMode { as_printed, row_normalized };

struct BiParams {
    int N = 0;
    double alpha = 1.0;
    double c_alpha = 0.0;
    ChainMode chain_mode = ChainMode::row_normalized;
    ZeroStateRule zero_rule = ZeroStateRule::absorbing;

    double beta() const { return 4.0 * c_alpha / alpha; }

    void validate() const {
        if (N < 2) throw std::invalid_argument("BiParams: N must be >= 2");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("BiParams: alpha must lie in (0, 1]");
        if (!(c_alpha > 0.0) || !std::isfinite(c_alpha))
            throw std::invalid_argument("BiParams: c_alpha must be finite and > 0");
    }
};

// The built chain plus the row diagnostics that motivated the mode switch.
// `printed_row_sums` is what each verbatim row carries after clamping the
// remainder at zero (1 + excess on defective rows, exactly 1 elsewhere).
struct BiChain {
    TransitionMatrix matrix{1, RowMode::diagnostic};
    ChainMode mode = ChainMode::as_printed;
    std::vector<double> printed_row_sums;
    std::vector<double> excess;       // per state, max(upper mass - 1, 0)
    std::vector<int> clamped_states;  // states whose remainder went negative
    double max_excess = 0.0;
};

inline BiChain bi_chain(int N, ChainMode mode,
                        ZeroStateRule rule = ZeroStateRule::absorbing) {
    if (N < 2) throw std::invalid_argument("bi_chain: N must be >= 2");
    BiChain out;
    out.mode = mode;
    out.matrix = TransitionMatrix(
        N + 1, mode == ChainMode::as_printed ? RowMode::diagnostic : RowMode::stochastic);
    out.printed_row_sums.assign(static_cast<std::size_t>(N) + 1, 1.0);
    out.excess.assign(static_cast<std::size_t>(N) + 1, 0.0);

    TransitionMatrix& P = out.matrix;
    if (rule == ZeroStateRule::absorbing)
        P.at(0, 0) = 1.0;
    else
        P.at(0, 1) = 1.0;

    for (int i = 1; i <= N; ++i) {
        double upper = 0.0;
        for (int j = i + 1; j <= N; ++j) {
            const double jj = static_cast<double>(j), ii = static_cast<double>(i);
            const double q = (2.0 * jj * (jj - 1.0) - ii) * ii * ii /
                             (jj * jj * (jj - 1.0) * (jj - 1.0) * (2.0 * ii - 1.0));
            P.at(i, j) = q;
            upper += q;
        }
        const double remainder = 1.0 - upper;
        double to_zero = remainder;
        if (remainder < 0.0) {
            to_zero = 0.0;
            out.excess[static_cast<std::size_t>(i)] = -remainder;
            out.clamped_states.push_back(i);
            out.max_excess = std::max(out.max_excess, -remainder);
        }
        P.at(i, 0) = to_zero;
        out.printed_row_sums[static_cast<std::size_t>(i)] = upper + to_zero;
        if (mode == ChainMode::row_normalized) {
            const double s = upper + to_zero;
            for (int j = 0; j <= N; ++j) P.at(i, j) /= s;
        }
    }
    P.validate();
    return out;
}

// Stop-moment law under cutoff l on the selected chain mode, cross-checked
// against the published closed form h_j = (j-1) p_1j (which carries no
// cutoff dependence; the recorded gap is expected to be nonzero for l > 2).
inline StopMomentDistribution bi_stop_distribution(int cutoff, int N, ChainMode mode) {
    const BiChain chain = bi_chain(N, mode);
    StopMomentDistribution d = detail::threshold_stop_distribution(chain.matrix, cutoff);
    double gap = 0.0;
    for (int j = cutoff; j <= N; ++j) {
        const double closed = static_cast<double>(j - 1) * chain.matrix.at(1, j);
        gap = std::max(gap, std::fabs(d.weight[static_cast<std::size_t>(j)] - closed));
    }
    d.closed_form_max_gap = gap;
    return d;
}

// Price sequence of buyer 1 against an opponent playing cutoff l:
//   V_n = c [ (4n/N)(1 - S_n) - (n/N)^2 (1 - S_n)^2 ]
//         - a ((N-1)/N)^2 sum_{k<n} (k/N^2)(1 - S_k)^2,
// where S_m = sum_{j=l}^{m} (j/N) h_j is the mass of "opponent already holds
// the best" by step m.
inline PriceSequence<BiParams> bi_price_sequence(const BiParams& params, int cutoff) {
    params.validate();
    const int N = params.N;
    if (cutoff < 2 || cutoff > N)
        throw std::invalid_argument("bi_price_sequence: cutoff must lie in [2, N]");

    const StopMomentDistribution d = bi_stop_distribution(cutoff, N, params.chain_mode);
    const double a = params.alpha, c = params.c_alpha;
    const double nn = static_cast<double>(N);

    PriceSequence<BiParams> seq;
    seq.params = params;
    seq.cutoff = cutoff;
    seq.values.assign(static_cast<std::size_t>(N) + 1, 0.0);

    double s = 0.0;        // S_n
    double fee_acc = 0.0;  // sum_{k=1}^{n-1} (k/N^2)(1 - S_k)^2
    for (int n = 1; n <= N; ++n) {
        if (n >= cutoff) s += (n / nn) * d.weight[static_cast<std::size_t>(n)];
        const double live = 1.0 - s;
        seq.values[static_cast<std::size_t>(n)] =
            c * ((4.0 * n / nn) * live - (n / nn) * (n / nn) * live * live) -
            a * ((nn - 1.0) / nn) * ((nn - 1.0) / nn) * fee_acc;
        fee_acc += (n / (nn * nn)) * live * live;
    }
    return seq;
}

// Smallest cutoff with the continue/stop flip, as in the monovariant case.
// The clean partition is guaranteed for c_alpha >= alpha/8 here.
inline ThresholdReport bi_optimal_threshold(const BiParams& params) {
    params.validate();
    const BiChain chain = bi_chain(params.N, params.chain_mode, params.zero_rule);
    const bool check_partition = params.c_alpha >= params.alpha / 8.0 - 1e-15;
    return detail::scan_threshold(
        chain.matrix, [&](int l) { return bi_price_sequence(params, l).values; },
        check_partition);
}

// Literal evaluation of the published finite-N cutoff equation (LHS - RHS).
// Homogeneous of degree 1 in (c_alpha, alpha) jointly.
inline double bi_finite_equation_residual(int l, const BiParams& params) {
    if (l < 1 || l > params.N)
        throw std::invalid_argument("bi_finite_equation_residual: l must lie in [1, N]");
    const double N = static_cast<double>(params.N);
    const double ll = static_cast<double>(l);
    const double c = params.c_alpha, a = params.alpha;
    const double L = std::log(N / ll);
    const double r = N / ll;  // N/l

    const double reward_part =
        (2.0 * c * ll / (2.0 * ll - 1.0)) *
        (4.0 * (ll / N) * L - 2.0 * (ll * ll / (N * N)) * L * L -
         (N - ll) * ll / (N * N) +
         2.0 * (ll * ll * ll / (N * N * N)) * (r * L - r + 1.0) -
         (ll * ll * ll * ll / (N * N * N * N)) * (r * L * L - 2.0 * r * L + r - 1.0));

    const double fee_part =
        a * ((ll * ll * (N - ll)) / (2.0 * N * N * N) +
             (ll * (N - ll) * (N - ll)) / (2.0 * N * N * N) -
             (ll * ll / (N * N)) * L +
             (ll * ll * (N - ll)) / (N * N * N) +
             (ll * ll * (N - ll) * (N - ll)) / (2.0 * N * N * N * N) +
             (ll * ll * ll * ll / (2.0 * N * N * N * N)) *
                 (r * L * L - 3.0 * r * L + 3.5 * r - 4.0 + ll / (2.0 * N)));

    const double rhs = c * (4.0 * ll / N - ll * ll / (N * N)) -
                       a * (N - 1.0) * (N - 1.0) * (ll - 1.0) * ll / (2.0 * N * N * N * N);

    return reward_part - fee_part - rhs;
}

// Asymptotic cutoff residual in z = lim l/N, parameterized by b = 4 c_a / a:
//   b (4z ln z + 2z^2 ln^2 z + 2z^2 ln z + z^3 ln^2 z + 2z^3 ln z + 5z - z^3 - z^4)
//   + (2z + 2z^2 ln z + 2z^2 (1-z)^2 + 2z^3 ln^2 z + 3z^3 ln z + 10z^3 - z^4 + z^5)
inline double bi_asymptotic_residual(double z, double beta) {
    if (!(z > 0.0) || !(z < 1.0))
        throw std::domain_error("bi_asymptotic_residual: z must lie in (0, 1)");
    const double lz = std::log(z);
    const double z2 = z * z, z3 = z2 * z, z4 = z3 * z, z5 = z4 * z;
    const double beta_part = 4.0 * z * lz + 2.0 * z2 * lz * lz + 2.0 * z2 * lz +
                             z3 * lz * lz + 2.0 * z3 * lz + 5.0 * z - z3 - z4;
    const double free_part = 2.0 * z + 2.0 * z2 * lz + 2.0 * z2 * (1.0 - z) * (1.0 - z) +
                             2.0 * z3 * lz * lz + 3.0 * z3 * lz + 10.0 * z3 - z4 + z5;
    return beta * beta_part + free_part;
}

inline AsymptoticSolution bi_solve_asymptotic(double beta,
                                              const RootScanOptions& opts = {}) {
    if (!std::isfinite(beta))
        throw std::invalid_argument("bi_solve_asymptotic: beta must be finite");
    AsymptoticSolution sol;
    sol.interpretation = interpretation("bi_asymptotic", "-");
    sol.beta = beta;
    if (beta < 0.5) {
        sol.regime_warning = true;
        sol.regime_note = "beta < 1/2: outside the derivation's stated regime; "
                          "roots reported anyway";
    }
    sol.scan = find_roots([&](double z) { return bi_asymptotic_residual(z, beta); }, opts);
    return sol;
}

// One row of the published-vs-recomputed cutoff table.
struct Table1Row {
    double beta = 0.0;
    bool has_reference = false;
    double z_paper = 0.0;     // meaningful when has_reference
    double z_computed = 0.0;
    double deviation = 0.0;   // z_computed - z_paper, meaningful when has_reference
    int root_count = 0;
    double residual = 0.0;    // residual at z_computed
};

inline const std::vector<std::pair<double, double>>& table1_reference() {
    static const std::vector<std::pair<double, double>> ref = {
        {0.5, 0.155}, {0.6, 0.171}, {0.7, 0.186}, {0.8, 0.199},
        {0.9, 0.210}, {1.0, 0.220}, {1.1, 0.228}, {1.2, 0.236},
        {1.3, 0.243}, {1.4, 0.249}, {1.5, 0.254},
    };
    return ref;
}

inline std::vector<double> table1_default_betas() {
    std::vector<double> betas;
    for (const auto& [b, z] : table1_reference()) betas.push_back(b);
    return betas;
}

// Recompute the cutoff table. When the scan finds several roots (not the
// case for the default betas), the one closest to the published value is
// reported if a reference exists, else the largest; the census is attached.
inline std::vector<Table1Row> table1(const std::vector<double>& betas = table1_default_betas()) {
    std::vector<Table1Row> rows;
    rows.reserve(betas.size());
    for (double beta : betas) {
        const AsymptoticSolution sol = bi_solve_asymptotic(beta);
        Table1Row row;
        row.beta = beta;
        for (const auto& [b, z] : table1_reference()) {
            if (std::fabs(b - beta) <= 1e-9) {
                row.has_reference = true;
                row.z_paper = z;
                break;
            }
        }
        row.root_count = static_cast<int>(sol.scan.roots.size());
        if (!sol.scan.roots.empty()) {
            std::size_t pick = sol.scan.roots.size() - 1;
            if (row.has_reference) {
                for (std::size_t i = 0; i < sol.scan.roots.size(); ++i)
                    if (std::fabs(sol.scan.roots[i] - row.z_paper) <
                        std::fabs(sol.scan.roots[pick] - row.z_paper))
                        pick = i;
            }
            row.z_computed = sol.scan.roots[pick];
            row.residual = sol.scan.residuals[pick];
            if (row.has_reference) row.deviation = row.z_computed - row.z_paper;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace zeitnot
