#pragma once
// Bracketed root finding for the transcendental cutoff equations. The
// residuals involve log singularities at the interval ends, so the solver
// deliberately sticks to a dense grid scan plus bisection: every reported
// root comes with the grid bracket that certified its sign change.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zeitnot {

// Identifies which reading of an ambiguously printed equation a residual
// implements. Every solver result carries one of these so downstream output
// can say exactly which formula produced a number.
struct InterpretationId {
    std::string equation;  // stable tag
    std::string variant;   // reading label ("-" when the equation is unambiguous)
    std::string formula;   // human-readable form of what is evaluated
};

enum class MonoVariant { additive_bracket, multiplicative_bracket };

// All readings this library implements.
inline const std::vector<InterpretationId>& interpretation_registry() {
    static const std::vector<InterpretationId> reg = {
        {"mono_finite_fee_asymptotic", "A_additive_bracket",
         "g*(1 + ln z + (z/2) ln^2 z) + z(1-z) - z^2*(ln z + (1-z)(3-z)/2), g = 2 c_a / a"},
        {"mono_finite_fee_asymptotic", "B_multiplicative_bracket",
         "g*(1 + ln z + (z/2) ln^2 z) + z(1-z) - z^2 * ln z * (1-z)(3-z)/2, g = 2 c_a / a"},
        {"mono_invariant_form", "-",
         "1 + ln z + (z/2) ln^2 z + z(1-z) - z^2*(ln z + (1-z)(3-z)/2)"},
        {"bi_asymptotic", "-",
         "b*(4 z ln z + 2 z^2 ln^2 z + 2 z^2 ln z + z^3 ln^2 z + 2 z^3 ln z + 5 z - z^3 - z^4)"
         " + (2 z + 2 z^2 ln z + 2 z^2 (1-z)^2 + 2 z^3 ln^2 z + 3 z^3 ln z + 10 z^3 - z^4 + z^5)"},
    };
    return reg;
}

inline const InterpretationId& interpretation(const std::string& equation,
                                              const std::string& variant) {
    for (const auto& id : interpretation_registry())
        if (id.equation == equation && id.variant == variant) return id;
    throw std::invalid_argument("unknown interpretation: " + equation + "/" + variant);
}

struct RootScanOptions {
    double lo = 1e-9;
    double hi = 1.0 - 1e-9;
    double grid_step = 1e-4;
    double interval_tol = 1e-15;   // bisection bracket width target
    double residual_tol = 1e-12;   // |f(root)| target
};

enum class RootScanStatus { ok, no_roots, degenerate };

struct RootScan {
    RootScanStatus status = RootScanStatus::no_roots;
    std::vector<double> roots;                       // ascending
    std::vector<double> residuals;                   // f at each root
    std::vector<std::pair<double, double>> brackets; // certifying grid cell per root
    std::vector<std::pair<double, double>> bracket_values; // f at the cell ends
    double grid_step = 0.0;
    int excluded_points = 0;  // grid points with non-finite f, skipped
};

// Scan [lo, hi] with the given step, bracket every sign change between
// adjacent finite grid values, and bisect each bracket down to interval_tol.
// Exact zeros on the grid are returned directly. If every finite grid value
// is zero the function is reported as degenerate and no roots are claimed.
template <class F>
RootScan find_roots(F&& f, const RootScanOptions& opt = {}) {
    if (!(opt.lo < opt.hi)) throw std::invalid_argument("find_roots: need lo < hi");
    if (!(opt.grid_step > 0.0)) throw std::invalid_argument("find_roots: grid_step must be > 0");

    RootScan out;
    out.grid_step = opt.grid_step;

    std::vector<double> zs, vs;
    const double span = opt.hi - opt.lo;
    const auto steps = static_cast<long>(std::ceil(span / opt.grid_step));
    zs.reserve(static_cast<std::size_t>(steps) + 2);
    for (long i = 0; i <= steps; ++i) {
        double z = opt.lo + static_cast<double>(i) * opt.grid_step;
        if (z > opt.hi) z = opt.hi;
        if (!zs.empty() && z == zs.back()) continue;
        zs.push_back(z);
    }
    vs.resize(zs.size());
    std::size_t finite = 0, zero = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        vs[i] = f(zs[i]);
        if (std::isfinite(vs[i])) {
            ++finite;
            if (vs[i] == 0.0) ++zero;
        } else {
            ++out.excluded_points;
        }
    }
    if (finite > 0 && zero == finite) {
        out.status = RootScanStatus::degenerate;
        return out;
    }

    auto push_root = [&](double root, double res, std::pair<double, double> br,
                         std::pair<double, double> brv) {
        out.roots.push_back(root);
        out.residuals.push_back(res);
        out.brackets.push_back(br);
        out.bracket_values.push_back(brv);
    };

    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (!std::isfinite(vs[i])) continue;
        if (vs[i] == 0.0) {
            push_root(zs[i], 0.0, {zs[i], zs[i]}, {0.0, 0.0});
            continue;
        }
        if (i + 1 >= zs.size() || !std::isfinite(vs[i + 1])) continue;
        if (vs[i] * vs[i + 1] < 0.0) {
            double a = zs[i], b = zs[i + 1], fa = vs[i];
            for (int it = 0; it < 200 && (b - a) > opt.interval_tol; ++it) {
                const double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;  // hit double resolution
                const double fm = f(m);
                if (fm == 0.0) { a = b = m; break; }
                if ((fm > 0.0) == (fa > 0.0)) { a = m; fa = fm; }
                else { b = m; }
            }
            // Of the final bracket ends and midpoint, keep the smallest |f|.
            double best = 0.5 * (a + b), best_res = f(best);
            for (double cand : {a, b}) {
                const double r = f(cand);
                if (std::fabs(r) < std::fabs(best_res)) { best = cand; best_res = r; }
            }
            push_root(best, best_res, {zs[i], zs[i + 1]}, {vs[i], vs[i + 1]});
        }
    }

    out.status = out.roots.empty() ? RootScanStatus::no_roots : RootScanStatus::ok;
    return out;
}

// A solved asymptotic cutoff equation: which reading was evaluated, the full
// scan result, and the parameter regime it was solved under.
struct AsymptoticSolution {
    InterpretationId interpretation;
    RootScan scan;
    // Parameterization actually used by the solve; the ones that do not apply
    // stay NaN (the single-quality solvers fill c_alpha/alpha, the two-quality
    // solver fills beta).
    double c_alpha = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    bool regime_warning = false;  // parameters outside the derivation's regime
    std::string regime_note;
};

} // namespace zeitnot
