#pragma once
// The reference-comparison report: every number this library recomputes
// next to the corresponding published value, with signed deviations. The
// builder is deterministic (no randomness), so identical inputs always
// produce a byte-identical JSON payload.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "bivariant.hpp"
#include "duel.hpp"
#include "io.hpp"
#include "monovariant.hpp"
#include "rootfind.hpp"

namespace zeitnot {

namespace detail {

inline ordered_json scan_to_json(const AsymptoticSolution& sol) {
    ordered_json j;
    j["equation"] = sol.interpretation.equation;
    j["variant"] = sol.interpretation.variant;
    j["formula"] = sol.interpretation.formula;
    j["roots"] = sol.scan.roots;
    j["residuals"] = sol.scan.residuals;
    j["root_count"] = sol.scan.roots.size();
    j["grid_step"] = sol.scan.grid_step;
    j["excluded_points"] = sol.scan.excluded_points;
    j["regime_warning"] = sol.regime_warning;
    if (!sol.regime_note.empty()) j["regime_note"] = sol.regime_note;
    return j;
}

} // namespace detail

// JSON renderings of the pipeline result types, shared by the command-line
// tool and the aggregate report.

inline ordered_json threshold_to_json(const ThresholdReport& th) {
    ordered_json j;
    j["status"] = th.status == ThresholdStatus::found ? "found" : "no_crossing";
    j["N"] = th.N;
    if (th.status == ThresholdStatus::found) {
        j["l_star"] = th.cutoff;
        j["z"] = th.z;
        j["continue_lhs"] = th.continue_lhs;
        j["continue_rhs"] = th.continue_rhs;
        j["stop_lhs"] = th.stop_lhs;
        j["stop_rhs"] = th.stop_rhs;
        j["partition_checked"] = th.partition_checked;
        if (th.partition_checked) j["partition_ok"] = th.partition_ok;
        ordered_json margin = ordered_json::array();
        for (int s = 1; s <= th.N; ++s) margin.push_back(th.margin[static_cast<std::size_t>(s)]);
        j["margin"] = std::move(margin);
    }
    // Per-candidate one-step gaps (entries l = 2..N); the full evidence when
    // no integer cutoff satisfies both inequalities.
    ordered_json cont = ordered_json::array(), stop = ordered_json::array();
    for (int l = 2; l <= th.N; ++l) {
        cont.push_back(th.scan_continue_gap[static_cast<std::size_t>(l)]);
        stop.push_back(th.scan_stop_gap[static_cast<std::size_t>(l)]);
    }
    j["scan_continue_gap"] = std::move(cont);
    j["scan_stop_gap"] = std::move(stop);
    return j;
}

inline ordered_json asymptotic_to_json(const AsymptoticSolution& sol) {
    ordered_json j = detail::scan_to_json(sol);
    if (std::isfinite(sol.c_alpha)) j["c_alpha"] = sol.c_alpha;
    if (std::isfinite(sol.alpha)) j["alpha"] = sol.alpha;
    if (std::isfinite(sol.beta)) j["beta"] = sol.beta;
    return j;
}

inline ordered_json duel_to_json(const DuelReport& rep) {
    ordered_json j;
    j["model"] = rep.config.model == Model::mono ? "mono" : "bi";
    j["engine"] = rep.config.engine == DuelEngine::exact ? "exact" : "monte_carlo";
    j["N"] = rep.config.N;
    j["l1"] = rep.config.l1;
    j["l2"] = rep.config.l2;
    j["alpha"] = rep.config.alpha;
    j["c_alpha"] = rep.config.c_alpha;
    j["samples"] = rep.samples;
    j["expected_payoff1"] = rep.expected_payoff1;
    j["expected_payoff2"] = rep.expected_payoff2;
    j["win1"] = rep.win1;
    j["win2"] = rep.win2;
    j["tie"] = rep.tie;
    j["neither"] = rep.neither;
    j["mean_fee1"] = rep.mean_fee1;
    j["mean_fee2"] = rep.mean_fee2;
    if (rep.has_std_error) {
        j["std_error1"] = rep.std_error1;
        j["std_error2"] = rep.std_error2;
        j["std_error_fee1"] = rep.std_error_fee1;
        j["std_error_fee2"] = rep.std_error_fee2;
    }
    ordered_json h1 = ordered_json::array(), h2 = ordered_json::array();
    for (int t = 1; t <= rep.config.N + 1; ++t) {
        h1.push_back(rep.stop_count1[static_cast<std::size_t>(t)]);
        h2.push_back(rep.stop_count2[static_cast<std::size_t>(t)]);
    }
    j["stop_count1"] = std::move(h1);
    j["stop_count2"] = std::move(h2);
    j["stop_denom"] = rep.stop_denom;
    return j;
}

inline ordered_json table1_row_to_json(const Table1Row& r) {
    ordered_json j;
    j["beta"] = r.beta;
    if (r.has_reference) {
        j["z_paper"] = r.z_paper;
        j["deviation"] = r.deviation;
    }
    j["z_computed"] = r.z_computed;
    j["root_count"] = r.root_count;
    j["residual"] = r.residual;
    return j;
}

struct ReportOptions {
    // Representative finite-fee regime: the boundary c_alpha = alpha/2 where
    // the published asymptotic collapses to its invariant form.
    double alpha = 0.5;
    double c_alpha = 0.25;
    // Cutoff cross-check grid (exact duel oracle sizes).
    std::vector<int> cross_check_N = {4, 5, 6};
    // Published asymptotic cutoff for the single-quality model.
    double mono_z_published = 0.21;
    // Published skim percentage at beta = 1/2 for the two-quality model.
    double skim_percent_published = 15.54;
};

// Assemble the full comparison report (the "data" part of the envelope).
inline ordered_json build_reference_report(const ReportOptions& opt = {}) {
    ordered_json rep;

    // --- single-quality asymptotic cutoff under both printed readings ------
    {
        ordered_json sec;
        sec["alpha"] = opt.alpha;
        sec["c_alpha"] = opt.c_alpha;
        sec["z_published"] = opt.mono_z_published;
        ordered_json variants = ordered_json::array();
        for (const MonoVariant v :
             {MonoVariant::additive_bracket, MonoVariant::multiplicative_bracket}) {
            const AsymptoticSolution sol = mono_solve_asymptotic(opt.c_alpha, opt.alpha, v);
            ordered_json item = detail::scan_to_json(sol);
            if (!sol.scan.roots.empty()) {
                item["z_computed"] = sol.scan.roots.back();
                item["deviation_from_published"] = sol.scan.roots.back() - opt.mono_z_published;
            }
            variants.push_back(std::move(item));
        }
        sec["variants"] = std::move(variants);

        // Invariant form plus its fee-rate independence: the general residual
        // at c_alpha = alpha/2 must give the same root for every alpha.
        const AsymptoticSolution inv = mono_solve_invariant();
        ordered_json invariant = detail::scan_to_json(inv);
        bool alpha_independent = !inv.scan.roots.empty();
        for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const AsymptoticSolution s =
                mono_solve_asymptotic(a / 2.0, a, MonoVariant::additive_bracket);
            if (s.scan.roots.size() != inv.scan.roots.size()) {
                alpha_independent = false;
                break;
            }
            for (std::size_t i = 0; i < s.scan.roots.size(); ++i)
                if (std::fabs(s.scan.roots[i] - inv.scan.roots[i]) > 1e-12)
                    alpha_independent = false;
        }
        invariant["alpha_independent"] = alpha_independent;
        sec["invariant_form"] = std::move(invariant);
        rep["mono_asymptotic"] = std::move(sec);
    }

    // --- two-quality cutoff table vs the published one ---------------------
    {
        const std::vector<Table1Row> rows = table1();
        ordered_json sec;
        ordered_json jrows = ordered_json::array();
        bool increasing = true;
        double prev = -1.0, max_dev = 0.0;
        for (const Table1Row& r : rows) {
            ordered_json jr;
            jr["beta"] = r.beta;
            if (r.has_reference) jr["z_paper"] = r.z_paper;
            jr["z_computed"] = r.z_computed;
            if (r.has_reference) {
                jr["deviation"] = r.deviation;
                max_dev = std::max(max_dev, std::fabs(r.deviation));
            }
            jr["root_count"] = r.root_count;
            jr["residual"] = r.residual;
            jrows.push_back(std::move(jr));
            if (r.z_computed <= prev) increasing = false;
            prev = r.z_computed;
        }
        sec["rows"] = std::move(jrows);
        sec["strictly_increasing"] = increasing;
        sec["max_abs_deviation"] = max_dev;
        rep["table1"] = std::move(sec);

        // Skim fraction at beta = 1/2 next to the published percentage.
        ordered_json skim;
        skim["beta"] = 0.5;
        const double z = rows.front().z_computed;
        skim["z_computed"] = z;
        {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.4f", z);
            skim["z_computed_4dp"] = buf;
        }
        skim["percent_computed"] = 100.0 * z;
        skim["percent_published"] = opt.skim_percent_published;
        skim["percent_deviation"] = 100.0 * z - opt.skim_percent_published;
        rep["skim_fraction"] = std::move(skim);
    }

    // --- two-quality chain row diagnostics ----------------------------------
    {
        ordered_json sec;
        ordered_json per_n = ordered_json::array();
        for (int N : {3, 5, 10, 50}) {
            const BiChain chain = bi_chain(N, ChainMode::as_printed);
            ordered_json item;
            item["N"] = N;
            item["max_excess"] = chain.max_excess;
            item["clamped_states"] = chain.clamped_states;
            if (N == 3) {
                item["row_sums"] = chain.printed_row_sums;
                // The state-1 row carries 3/4 + 11/36 = 38/36 of mass: excess
                // exactly 2/36 over a proper distribution.
                ordered_json frac;
                frac["numerator"] = 2;
                frac["denominator"] = 36;
                frac["value"] = 2.0 / 36.0;
                frac["matches_computed"] =
                    std::fabs(chain.excess[1] - 2.0 / 36.0) <= 1e-15;
                item["excess_exact"] = std::move(frac);
            }
            per_n.push_back(std::move(item));
        }
        sec["per_N"] = std::move(per_n);
        rep["bi_chain_diagnostics"] = std::move(sec);
    }

    // --- analytic cutoff vs exact duel best response ------------------------
    // Every case carries both pipelines: the one-step inequality scan and the
    // exact-enumeration best reply. When the scan finds a cutoff, the oracle
    // is the best reply to it; when it does not, the oracle falls back to the
    // symmetric best-response fixed point so the comparison is never silent.
    {
        ordered_json sec;
        sec["alpha"] = opt.alpha;
        sec["c_alpha"] = opt.c_alpha;
        ordered_json cases = ordered_json::array();
        for (int N : opt.cross_check_N) {
            MonoParams params{N, opt.alpha, opt.c_alpha};
            const ThresholdReport th = mono_optimal_threshold(params);
            const bool found = th.status == ThresholdStatus::found;
            ordered_json item;
            item["N"] = N;
            item["analytic_status"] = found ? "found" : "no_crossing";
            if (found) item["analytic_l"] = th.cutoff;

            DuelConfig base;
            base.model = Model::mono;
            base.N = N;
            base.alpha = opt.alpha;
            base.c_alpha = opt.c_alpha;
            base.engine = DuelEngine::exact;
            int l2_used = 0;
            if (found) {
                l2_used = th.cutoff;
            } else {
                const EquilibriumReport eq = symmetric_equilibrium(base);
                l2_used = eq.cutoff;
                item["oracle_fallback"] = "symmetric_fixed_point";
            }
            base.l2 = l2_used;
            const BestResponseReport br = best_response(base);
            item["opponent_l"] = l2_used;
            item["oracle_l"] = br.l1_star;
            const bool agree = found && br.l1_star == th.cutoff;
            item["agree"] = agree;
            if (!agree)
                item["note"] = found ? "scan cutoff is not the exact best reply to itself"
                                     : "scan found no self-consistent cutoff";
            ordered_json profile = ordered_json::array();
            for (int l = 1; l <= N + 1; ++l)
                profile.push_back(br.payoff1[static_cast<std::size_t>(l)]);
            item["payoff_by_cutoff"] = std::move(profile);
            cases.push_back(std::move(item));
        }
        sec["cases"] = std::move(cases);
        rep["threshold_cross_check"] = std::move(sec);
    }

    // --- finite-scan limit vs asymptotic-equation roots ----------------------
    // The scan's large-N cutoff fraction settles near 0.158 at c_a = a/2 while
    // the printed limiting equation puts its root near 0.235 (A) / 0.222 (B)
    // and the text claims 0.21; the gap is a property of the source material
    // and is reported here with the evidence.
    {
        ordered_json sec;
        sec["alpha"] = opt.alpha;
        sec["c_alpha"] = opt.c_alpha;
        ordered_json scans = ordered_json::array();
        double z_scan = std::numeric_limits<double>::quiet_NaN();
        for (int N : {500, 1000, 2000}) {
            MonoParams params{N, opt.alpha, opt.c_alpha};
            const ThresholdReport th = mono_optimal_threshold(params);
            ordered_json row;
            row["N"] = N;
            row["status"] = th.status == ThresholdStatus::found ? "found" : "no_crossing";
            if (th.status == ThresholdStatus::found) {
                row["l"] = th.cutoff;
                row["z"] = th.z;
                z_scan = th.z;  // largest N with a crossing wins
            }
            scans.push_back(std::move(row));
        }
        sec["scan"] = std::move(scans);
        ordered_json roots;
        for (MonoVariant v : {MonoVariant::additive_bracket, MonoVariant::multiplicative_bracket}) {
            const AsymptoticSolution sol = mono_solve_asymptotic(opt.c_alpha, opt.alpha, v);
            const char* key =
                v == MonoVariant::additive_bracket ? "additive_bracket" : "multiplicative_bracket";
            if (!sol.scan.roots.empty()) {
                const double r = sol.scan.roots.back();
                roots[key] = r;
                if (std::isfinite(z_scan)) roots[std::string(key) + "_gap_to_scan"] = r - z_scan;
            }
        }
        sec["equation_roots"] = std::move(roots);
        sec["z_scan"] = z_scan;
        sec["consistent_within_0.05"] =
            std::isfinite(z_scan) && sec["equation_roots"].contains("additive_bracket") &&
            std::fabs(sec["equation_roots"]["additive_bracket"].get<double>() - z_scan) <= 0.05;
        rep["asymptotic_consistency"] = std::move(sec);
    }

    // --- phase-space partition census ----------------------------------------
    // The two-block margin partition is asserted by the source for c_a >= a/2.
    // Measured, it holds at every found crossing strictly inside that regime
    // but fails at the boundary c_a = a/2 for larger N, where the price
    // sequence goes negative near j = N and the margin turns positive again.
    // Both censuses are recorded.
    {
        auto census = [&](double c_alpha) {
            ordered_json sub;
            sub["c_alpha"] = c_alpha;
            int ok_count = 0, found_count = 0, first_failure = 0;
            ordered_json failures = ordered_json::array();
            for (int N = 10; N <= 100; N += 5) {
                MonoParams params{N, opt.alpha, c_alpha};
                const ThresholdReport th = mono_optimal_threshold(params);
                if (th.status != ThresholdStatus::found) {
                    failures.push_back({{"N", N}, {"reason", "no_crossing"}});
                    continue;
                }
                ++found_count;
                if (th.partition_ok) {
                    ++ok_count;
                } else {
                    failures.push_back({{"N", N}, {"reason", "margin_positive_in_stop_block"}});
                    if (first_failure == 0) first_failure = N;
                }
            }
            sub["crossings_found"] = found_count;
            sub["partition_ok_count"] = ok_count;
            sub["all_found_ok"] = ok_count == found_count;
            if (first_failure != 0) sub["first_partition_failure_N"] = first_failure;
            sub["failures"] = std::move(failures);
            return sub;
        };
        ordered_json sec;
        sec["alpha"] = opt.alpha;
        sec["grid"] = "N = 10, 15, ..., 100";
        sec["boundary"] = census(opt.c_alpha);
        sec["interior"] = census(opt.c_alpha + 0.05);
        rep["partition_census"] = std::move(sec);
    }

    // --- price-formula audit: literal print vs rederived --------------------
    {
        const int N = 20, l = 5;
        MonoParams printed{N, opt.alpha, opt.c_alpha, FormulaMode::as_printed};
        MonoParams rederived{N, opt.alpha, opt.c_alpha, FormulaMode::rederived};
        const auto vp = mono_price_sequence(printed, l).values;
        const auto vr = mono_price_sequence(rederived, l).values;
        double max_gap = 0.0;
        for (int n = 1; n <= N; ++n)
            max_gap = std::max(max_gap, std::fabs(vp[static_cast<std::size_t>(n)] -
                                                  vr[static_cast<std::size_t>(n)]));
        ordered_json sec;
        sec["N"] = N;
        sec["cutoff"] = l;
        sec["max_abs_gap"] = max_gap;
        rep["price_mode_gap"] = std::move(sec);
    }

    return rep;
}

// CSV renderings used by the CLI.

inline std::string table1_csv(const std::vector<Table1Row>& rows, const RunManifest& m) {
    std::string out = csv_manifest_comment(m);
    out += csv_line({"beta", "z_paper", "z_computed", "deviation"});
    for (const Table1Row& r : rows)
        out += csv_line({csv_field(r.beta), r.has_reference ? csv_field(r.z_paper) : "",
                         csv_field(r.z_computed),
                         r.has_reference ? csv_field(r.deviation) : ""});
    return out;
}

inline std::string stop_histogram_csv(const DuelReport& rep, const RunManifest& m) {
    std::string out = csv_manifest_comment(m);
    out += csv_line({"stop_time", "count_buyer1", "count_buyer2"});
    for (int t = 1; t <= rep.config.N + 1; ++t)
        out += csv_line({std::to_string(t),
                         std::to_string(rep.stop_count1[static_cast<std::size_t>(t)]),
                         std::to_string(rep.stop_count2[static_cast<std::size_t>(t)])});
    return out;
}

} // namespace zeitnot
