#pragma once
// Generic optimal stopping on a finite chain:
//
//   V(x) = sup_tau E_x{ alpha^tau f(x_tau) - sum_{i<tau} alpha^i c(x_i) }
//
// solved by monotone value iteration V <- max(f, alpha P V - c) from V0 = f,
// which converges to the smallest excessive majorant of f. The fee can
// alternatively be folded away first through the discounted fee transform
// f_a = c + alpha P f_a; both routes must agree and are kept selectable.
// For alpha = 1, where the transform is undefined, the chain is classified
// through its essential classes and stationary drifts instead.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "chain.hpp"
#include "numeric.hpp"

namespace zeitnot {

enum class FeeRoute { folded, transformed };

struct ValueOptions {
    double tol = 1e-12;      // sup-norm residual target
    long max_iter = 0;       // 0 -> 10*(N+1)/(1-alpha), capped at 1e6
    FeeRoute route = FeeRoute::folded;
    double stop_tol = 1e-9;  // tie tolerance for V(x) == f(x)
};

struct ValueSolution {
    std::vector<double> values;
    std::vector<int> stop_set;   // states with V(x) - f(x) <= stop_tol, ascending
    long iterations = 0;
    double residual = 0.0;
    bool converged = false;
    FeeRoute route = FeeRoute::folded;
    std::string note;            // diagnostics (alpha = 1 structure, etc.)
};

// Discounted expected total fee f_a(x) = E_x sum_{i>=0} alpha^i c(x_i),
// the unique solution of f_a = c + alpha P f_a. Requires alpha < 1.
inline std::vector<double> fee_transform(const TransitionMatrix& chain,
                                         const std::vector<double>& fee,
                                         double alpha) {
    const int n = chain.size();
    if (static_cast<int>(fee.size()) != n)
        throw std::invalid_argument("fee_transform: fee length must match state count");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument(
            "fee_transform: alpha must lie in (0, 1); at alpha = 1 use drift_classification");

    if (n <= 256) {
        // Direct solve of (I - alpha P) f = c.
        std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    (i == j ? 1.0 : 0.0) - alpha * chain.at(i, j);
        return solve_dense(std::move(a), fee);
    }

    // Geometric iteration f <- c + alpha P f; the remaining error after a step
    // of size d is bounded by d * alpha / (1 - alpha).
    std::vector<double> f(static_cast<std::size_t>(n), 0.0);
    const long cap = 10'000'000;
    for (long it = 0; it < cap; ++it) {
        std::vector<double> pf = chain.apply(f);
        double delta = 0.0, norm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double next = fee[static_cast<std::size_t>(i)] +
                                alpha * pf[static_cast<std::size_t>(i)];
            delta = std::max(delta, std::fabs(next - f[static_cast<std::size_t>(i)]));
            f[static_cast<std::size_t>(i)] = next;
            norm = std::max(norm, std::fabs(next));
        }
        if (delta * alpha / (1.0 - alpha) <= 1e-12 * std::max(1.0, norm)) return f;
    }
    throw std::runtime_error("fee_transform: iteration did not converge");
}

// States where the computed price touches the reward.
inline std::vector<int> stop_set(const std::vector<double>& values,
                                 const std::vector<double>& reward,
                                 double tol = 1e-9) {
    if (values.size() != reward.size())
        throw std::invalid_argument("stop_set: size mismatch");
    std::vector<int> out;
    for (std::size_t x = 0; x < values.size(); ++x)
        if (values[x] - reward[x] <= tol) out.push_back(static_cast<int>(x));
    return out;
}

namespace detail {

// Strongly connected components (iterative Tarjan). Components are numbered
// in reverse topological order: every successor component of c has an id
// smaller than c.
struct SccResult {
    std::vector<int> comp;  // state -> component id
    int count = 0;
};

inline SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    SccResult res;
    res.comp.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> index(static_cast<std::size_t>(n), -1),
        low(static_cast<std::size_t>(n), 0);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    int next_index = 0;

    struct Frame { int v; std::size_t child; };
    for (int start = 0; start < n; ++start) {
        if (index[static_cast<std::size_t>(start)] != -1) continue;
        std::vector<Frame> call;
        call.push_back({start, 0});
        index[static_cast<std::size_t>(start)] = low[static_cast<std::size_t>(start)] = next_index++;
        stack.push_back(start);
        on_stack[static_cast<std::size_t>(start)] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& edges = adj[static_cast<std::size_t>(f.v)];
            if (f.child < edges.size()) {
                const int w = edges[f.child++];
                if (index[static_cast<std::size_t>(w)] == -1) {
                    index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = next_index++;
                    stack.push_back(w);
                    on_stack[static_cast<std::size_t>(w)] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[static_cast<std::size_t>(w)]) {
                    low[static_cast<std::size_t>(f.v)] =
                        std::min(low[static_cast<std::size_t>(f.v)],
                                 index[static_cast<std::size_t>(w)]);
                }
            } else {
                if (low[static_cast<std::size_t>(f.v)] == index[static_cast<std::size_t>(f.v)]) {
                    while (true) {
                        const int w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = 0;
                        res.comp[static_cast<std::size_t>(w)] = res.count;
                        if (w == f.v) break;
                    }
                    ++res.count;
                }
                const int v = f.v;
                call.pop_back();
                if (!call.empty())
                    low[static_cast<std::size_t>(call.back().v)] =
                        std::min(low[static_cast<std::size_t>(call.back().v)],
                                 low[static_cast<std::size_t>(v)]);
            }
        }
    }
    return res;
}

inline std::vector<std::vector<int>> positive_adjacency(const TransitionMatrix& chain) {
    const int n = chain.size();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (chain.at(i, j) > 0.0) adj[static_cast<std::size_t>(i)].push_back(j);
    return adj;
}

} // namespace detail

// Essential-class structure of the chain together with per-class stationary
// vectors and fee drifts <q, c>. A class with non-negative drift admits a
// first-hit optimal strategy; a state that can feed a negative-drift class
// gains unboundedly by waiting and is excluded from any stop set at alpha = 1.
struct ClassDecomposition {
    std::vector<int> class_of;                   // state -> class id
    int class_count = 0;
    std::vector<char> essential;                 // per class
    std::vector<std::vector<double>> stationary; // per class, full-length q (empty if nonessential)
    std::vector<double> drift;                   // per class, <q, c> (NaN if nonessential)
    std::vector<char> first_hit_optimal;         // per class: essential && drift >= 0
    std::vector<char> excluded_from_stop;        // per state: nonessential and reaches a negative-drift class
};

inline ClassDecomposition drift_classification(const TransitionMatrix& chain,
                                               const std::vector<double>& fee) {
    const int n = chain.size();
    if (static_cast<int>(fee.size()) != n)
        throw std::invalid_argument("drift_classification: fee length must match state count");
    chain.validate();

    const auto adj = detail::positive_adjacency(chain);
    const auto scc = detail::strongly_connected_components(adj);

    ClassDecomposition out;
    out.class_of = scc.comp;
    out.class_count = scc.count;
    out.essential.assign(static_cast<std::size_t>(scc.count), 1);
    out.stationary.assign(static_cast<std::size_t>(scc.count), {});
    out.drift.assign(static_cast<std::size_t>(scc.count),
                     std::numeric_limits<double>::quiet_NaN());
    out.first_hit_optimal.assign(static_cast<std::size_t>(scc.count), 0);
    out.excluded_from_stop.assign(static_cast<std::size_t>(n), 0);

    // Essential = no edge leaving the component.
    for (int v = 0; v < n; ++v)
        for (int w : adj[static_cast<std::size_t>(v)])
            if (scc.comp[static_cast<std::size_t>(v)] != scc.comp[static_cast<std::size_t>(w)])
                out.essential[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])] = 0;

    // Members per class.
    std::vector<std::vector<int>> members(static_cast<std::size_t>(scc.count));
    for (int v = 0; v < n; ++v)
        members[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])].push_back(v);

    for (int c = 0; c < scc.count; ++c) {
        if (!out.essential[static_cast<std::size_t>(c)]) continue;
        const auto& m = members[static_cast<std::size_t>(c)];
        const std::size_t k = m.size();
        std::vector<double> q_local(k, 0.0);
        if (k == 1) {
            q_local[0] = 1.0;
        } else {
            // Solve q P = q with sum(q) = 1 on the class: k-1 balance rows
            // plus the normalization row.
            std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
            std::vector<double> b(k, 0.0);
            for (std::size_t r = 0; r + 1 < k; ++r) {
                for (std::size_t cidx = 0; cidx < k; ++cidx)
                    a[r][cidx] = chain.at(m[cidx], m[r]) - (r == cidx ? 1.0 : 0.0);
            }
            for (std::size_t cidx = 0; cidx < k; ++cidx) a[k - 1][cidx] = 1.0;
            b[k - 1] = 1.0;
            q_local = solve_dense(std::move(a), std::move(b));
            for (double& v : q_local) v = std::max(v, 0.0);
        }
        std::vector<double> q_full(static_cast<std::size_t>(n), 0.0);
        double d = 0.0;
        for (std::size_t idx = 0; idx < k; ++idx) {
            q_full[static_cast<std::size_t>(m[idx])] = q_local[idx];
            d += q_local[idx] * fee[static_cast<std::size_t>(m[idx])];
        }
        out.stationary[static_cast<std::size_t>(c)] = std::move(q_full);
        out.drift[static_cast<std::size_t>(c)] = d;
        out.first_hit_optimal[static_cast<std::size_t>(c)] = (d >= 0.0);
    }

    // Reachability of a negative-drift class over the condensation. Tarjan
    // ids are in reverse topological order, so successors come first.
    std::vector<char> reaches(static_cast<std::size_t>(scc.count), 0);
    for (int c = 0; c < scc.count; ++c)
        if (out.essential[static_cast<std::size_t>(c)] &&
            out.drift[static_cast<std::size_t>(c)] < 0.0)
            reaches[static_cast<std::size_t>(c)] = 1;
    for (int c = 0; c < scc.count; ++c) {
        if (reaches[static_cast<std::size_t>(c)]) continue;
        for (int v : members[static_cast<std::size_t>(c)]) {
            for (int w : adj[static_cast<std::size_t>(v)]) {
                const int d = scc.comp[static_cast<std::size_t>(w)];
                if (d != c && reaches[static_cast<std::size_t>(d)]) {
                    reaches[static_cast<std::size_t>(c)] = 1;
                    break;
                }
            }
            if (reaches[static_cast<std::size_t>(c)]) break;
        }
    }
    for (int v = 0; v < n; ++v) {
        const int c = scc.comp[static_cast<std::size_t>(v)];
        if (!out.essential[static_cast<std::size_t>(c)] &&
            reaches[static_cast<std::size_t>(c)])
            out.excluded_from_stop[static_cast<std::size_t>(v)] = 1;
    }
    return out;
}

// Monotone value iteration to the smallest excessive majorant.
inline ValueSolution value_iterate(const TransitionMatrix& chain,
                                   const PayoffSpec& payoff,
                                   const ValueOptions& opts = {}) {
    const int n = chain.size();
    if (chain.mode() != RowMode::stochastic)
        throw std::invalid_argument("value_iterate: requires a stochastic matrix");
    chain.validate();
    payoff.validate(n);

    const double alpha = payoff.alpha;
    ValueSolution sol;
    sol.route = opts.route;

    long max_iter = opts.max_iter;
    if (max_iter <= 0) {
        if (alpha < 1.0) {
            const double suggested = 10.0 * n / (1.0 - alpha);
            max_iter = static_cast<long>(std::min(suggested, 1e6));
        } else {
            max_iter = 1'000'000;
        }
        max_iter = std::max(max_iter, 16L);
    }

    // At alpha = 1 plain iteration is only guaranteed to converge when every
    // essential class is a single absorbing state with zero fee; note the
    // structure so a non-converged run points at the drift classifier.
    if (alpha == 1.0) {
        const auto adj = detail::positive_adjacency(chain);
        const auto scc = detail::strongly_connected_components(adj);
        std::vector<char> essential(static_cast<std::size_t>(scc.count), 1);
        std::vector<int> size(static_cast<std::size_t>(scc.count), 0);
        for (int v = 0; v < n; ++v) {
            ++size[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])];
            for (int w : adj[static_cast<std::size_t>(v)])
                if (scc.comp[static_cast<std::size_t>(v)] != scc.comp[static_cast<std::size_t>(w)])
                    essential[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])] = 0;
        }
        bool ok = true;
        for (int v = 0; v < n && ok; ++v) {
            const int c = scc.comp[static_cast<std::size_t>(v)];
            if (!essential[static_cast<std::size_t>(c)]) continue;
            if (size[static_cast<std::size_t>(c)] != 1 ||
                std::fabs(chain.at(v, v) - 1.0) > 1e-12 ||
                payoff.fee[static_cast<std::size_t>(v)] != 0.0)
                ok = false;
        }
        if (!ok)
            sol.note = "alpha = 1 without zero-fee absorbing structure: "
                       "convergence is not guaranteed, see drift_classification";
    }

    // Transformed route: fold the fee into the reward via f_a, solve the
    // zero-fee problem with reward f + f_a, and subtract f_a afterwards.
    std::vector<double> fa;
    std::vector<double> g = payoff.reward;
    std::vector<double> fee = payoff.fee;
    if (opts.route == FeeRoute::transformed) {
        if (!(alpha < 1.0))
            throw std::invalid_argument(
                "value_iterate: transformed fee route requires alpha < 1; "
                "use drift_classification at alpha = 1");
        fa = fee_transform(chain, payoff.fee, alpha);
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] += fa[static_cast<std::size_t>(i)];
        std::fill(fee.begin(), fee.end(), 0.0);
    }

    std::vector<double> v = g;
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    double residual = std::numeric_limits<double>::infinity();
    long it = 0;
    for (; it < max_iter; ++it) {
        const std::vector<double> pv = chain.apply(v);
        residual = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            const double cont = alpha * pv[idx] - fee[idx];
            next[idx] = std::max(g[idx], cont);
            residual = std::max(residual, std::fabs(next[idx] - v[idx]));
        }
        v.swap(next);
        if (residual <= opts.tol) {
            ++it;
            break;
        }
    }
    sol.iterations = it;
    sol.residual = residual;
    sol.converged = residual <= opts.tol;
    if (!sol.converged && sol.note.empty())
        sol.note = "did not reach tolerance within max_iter";

    if (opts.route == FeeRoute::transformed)
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] -= fa[static_cast<std::size_t>(i)];

    sol.values = std::move(v);
    sol.stop_set = stop_set(sol.values, payoff.reward, opts.stop_tol);
    return sol;
}

} // namespace zeitnot
