// Command-line surface for the cutoff-duel library: threshold scans,
// limiting-equation solves, duel simulation, the cutoff table, parameter
// sweeps, and the aggregate comparison report. Data goes to stdout (or
// --out); warnings and diagnostics go to stderr. Exit codes: 0 success,
// 2 bad arguments, 3 no-solution outcome, 4 exact-engine size refusal.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <zeitnot/zeitnot.hpp>

namespace {

using zeitnot::ordered_json;

// Shared output plumbing: every command fills a manifest and a data payload,
// then hands both here. CSV renderings carry the manifest as a '#' comment.
struct Emit {
    std::string format = "json";  // "json" or "csv"
    std::string out_path;         // empty = stdout

    int write(const std::string& text) const {
        if (out_path.empty()) {
            std::fputs(text.c_str(), stdout);
            return 0;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::fprintf(stderr, "error: cannot open %s for writing\n", out_path.c_str());
            return 2;
        }
        f << text;
        return f.good() ? 0 : 2;
    }

    int json(const zeitnot::RunManifest& m, const ordered_json& data) const {
        return write(zeitnot::envelope(m, data).dump(2) + "\n");
    }
};

// "lo:hi:step" inclusive grid; the point count is rounded so accumulated
// floating-point drift cannot drop the endpoint.
std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0 ||
        hi < lo)
        throw CLI::ValidationError("grid", "expected lo:hi:step with step > 0 and hi >= lo");
    const int count = static_cast<int>(std::lround((hi - lo) / step)) + 1;
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) points.push_back(lo + static_cast<double>(i) * step);
    return points;
}

std::string format_csv_status(zeitnot::ThresholdStatus s) {
    return s == zeitnot::ThresholdStatus::found ? "found" : "no_crossing";
}

// ---------------------------------------------------------------------------
// threshold

struct ThresholdArgs {
    std::string model = "mono";
    int N = 100;
    double alpha = 0.5;
    double c_alpha = 0.25;
    std::string formula_mode = "rederived";    // mono price formula
    std::string chain_mode = "row_normalized"; // bi chain repair
    std::string zero_rule = "absorbing";
};

int run_threshold(const ThresholdArgs& a, const Emit& emit) {
    const zeitnot::ZeroStateRule rule = a.zero_rule == "restart"
                                            ? zeitnot::ZeroStateRule::restart
                                            : zeitnot::ZeroStateRule::absorbing;
    zeitnot::ThresholdReport th;
    if (a.model == "mono") {
        zeitnot::MonoParams p;
        p.N = a.N;
        p.alpha = a.alpha;
        p.c_alpha = a.c_alpha;
        p.formula_mode = a.formula_mode == "as_printed" ? zeitnot::FormulaMode::as_printed
                                                        : zeitnot::FormulaMode::rederived;
        p.zero_rule = rule;
        th = zeitnot::mono_optimal_threshold(p);
    } else {
        zeitnot::BiParams p;
        p.N = a.N;
        p.alpha = a.alpha;
        p.c_alpha = a.c_alpha;
        p.chain_mode = a.chain_mode == "as_printed" ? zeitnot::ChainMode::as_printed
                                                    : zeitnot::ChainMode::row_normalized;
        p.zero_rule = rule;
        th = zeitnot::bi_optimal_threshold(p);
    }

    zeitnot::RunManifest m;
    m.command = "threshold";
    m.parameters["model"] = a.model;
    m.parameters["N"] = a.N;
    m.parameters["alpha"] = a.alpha;
    m.parameters["c_alpha"] = a.c_alpha;
    if (a.model == "mono")
        m.parameters["formula_mode"] = a.formula_mode;
    else
        m.parameters["chain_mode"] = a.chain_mode;
    m.parameters["zero_rule"] = a.zero_rule;

    int rc = 0;
    if (emit.format == "csv") {
        std::string out = zeitnot::csv_manifest_comment(m);
        out += zeitnot::csv_line({"status", "l_star", "z", "continue_lhs", "continue_rhs",
                                  "stop_lhs", "stop_rhs", "partition_checked", "partition_ok"});
        const bool found = th.status == zeitnot::ThresholdStatus::found;
        out += zeitnot::csv_line(
            {format_csv_status(th.status), found ? std::to_string(th.cutoff) : "",
             found ? zeitnot::csv_field(th.z) : "",
             found ? zeitnot::csv_field(th.continue_lhs) : "",
             found ? zeitnot::csv_field(th.continue_rhs) : "",
             found ? zeitnot::csv_field(th.stop_lhs) : "",
             found ? zeitnot::csv_field(th.stop_rhs) : "",
             th.partition_checked ? "true" : "false", th.partition_ok ? "true" : "false"});
        rc = emit.write(out);
    } else {
        rc = emit.json(m, zeitnot::threshold_to_json(th));
    }
    if (rc != 0) return rc;
    if (th.status != zeitnot::ThresholdStatus::found) {
        std::fprintf(stderr,
                     "no crossing: no cutoff in [2, N] satisfies both one-step "
                     "inequalities; per-candidate gaps are in the payload\n");
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// asymptotic

struct AsymptoticArgs {
    std::string model = "mono";
    double beta = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double c_alpha = std::numeric_limits<double>::quiet_NaN();
    std::string interp = "both";  // additive | multiplicative | both
};

int run_asymptotic(const AsymptoticArgs& a, const Emit& emit) {
    zeitnot::RunManifest m;
    m.command = "asymptotic";
    m.parameters["model"] = a.model;

    std::vector<zeitnot::AsymptoticSolution> solves;
    if (a.model == "bi") {
        if (!std::isfinite(a.beta))
            throw CLI::ValidationError("--beta", "required for --model bi");
        m.parameters["beta"] = a.beta;
        solves.push_back(zeitnot::bi_solve_asymptotic(a.beta));
    } else {
        if (!std::isfinite(a.alpha) || !std::isfinite(a.c_alpha))
            throw CLI::ValidationError("--alpha/--c-alpha", "required for --model mono");
        m.parameters["alpha"] = a.alpha;
        m.parameters["c_alpha"] = a.c_alpha;
        m.parameters["interp"] = a.interp;
        if (a.interp == "additive" || a.interp == "both")
            solves.push_back(zeitnot::mono_solve_asymptotic(a.c_alpha, a.alpha,
                                                            zeitnot::MonoVariant::additive_bracket));
        if (a.interp == "multiplicative" || a.interp == "both")
            solves.push_back(zeitnot::mono_solve_asymptotic(
                a.c_alpha, a.alpha, zeitnot::MonoVariant::multiplicative_bracket));
    }

    bool any_empty = false;
    for (const auto& sol : solves) {
        if (sol.regime_warning)
            std::fprintf(stderr, "warning: %s\n", sol.regime_note.c_str());
        if (sol.scan.roots.empty()) any_empty = true;
    }

    ordered_json data;
    ordered_json list = ordered_json::array();
    for (const auto& sol : solves) {
        ordered_json item = zeitnot::asymptotic_to_json(sol);
        if (a.model == "bi") {
            // Attach the published row when this beta is one of the tabulated ones.
            for (const auto& ref : zeitnot::table1_reference()) {
                if (std::fabs(ref.first - a.beta) <= 1e-9 && !sol.scan.roots.empty()) {
                    item["z_paper"] = ref.second;
                    item["deviation"] = sol.scan.roots.back() - ref.second;
                }
            }
        } else {
            if (!sol.scan.roots.empty()) {
                item["z_published"] = 0.21;
                item["deviation"] = sol.scan.roots.back() - 0.21;
            }
        }
        list.push_back(std::move(item));
    }
    data["solutions"] = std::move(list);

    int rc = 0;
    if (emit.format == "csv") {
        std::string out = zeitnot::csv_manifest_comment(m);
        out += zeitnot::csv_line({"equation", "variant", "root_count", "z", "residual"});
        for (const auto& sol : solves) {
            const bool has = !sol.scan.roots.empty();
            out += zeitnot::csv_line({sol.interpretation.equation, sol.interpretation.variant,
                                      std::to_string(sol.scan.roots.size()),
                                      has ? zeitnot::csv_field(sol.scan.roots.back()) : "",
                                      has ? zeitnot::csv_field(sol.scan.residuals.back()) : ""});
        }
        rc = emit.write(out);
    } else {
        rc = emit.json(m, data);
    }
    if (rc != 0) return rc;
    if (any_empty) {
        std::fprintf(stderr, "no root: a requested scan found no sign change in (0, 1)\n");
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string model = "mono";
    int N = 6;
    int l1 = 1, l2 = 1;
    double alpha = 0.5;
    double c_alpha = 0.25;
    std::string engine = "exact";
    long long trials = 1'000'000;
    std::uint64_t seed = 0;
    std::string best_event = "either";  // bi reward event: either | both
    std::string histogram_path;         // optional stop-time histogram CSV
};

int run_simulate(const SimulateArgs& a, const Emit& emit) {
    zeitnot::DuelConfig cfg;
    cfg.model = a.model == "bi" ? zeitnot::Model::bi : zeitnot::Model::mono;
    cfg.N = a.N;
    cfg.l1 = a.l1;
    cfg.l2 = a.l2;
    cfg.alpha = a.alpha;
    cfg.c_alpha = a.c_alpha;
    cfg.engine = a.engine == "monte_carlo" ? zeitnot::DuelEngine::monte_carlo
                                           : zeitnot::DuelEngine::exact;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.best_event = a.best_event == "both" ? zeitnot::BestEvent::both_coordinates
                                            : zeitnot::BestEvent::either_coordinate;

    const zeitnot::DuelReport rep = zeitnot::run_duel(cfg);

    zeitnot::RunManifest m;
    m.command = "simulate";
    m.seed = a.seed;
    m.parameters["model"] = a.model;
    m.parameters["N"] = a.N;
    m.parameters["l1"] = a.l1;
    m.parameters["l2"] = a.l2;
    m.parameters["alpha"] = a.alpha;
    m.parameters["c_alpha"] = a.c_alpha;
    m.parameters["engine"] = a.engine;
    if (cfg.engine == zeitnot::DuelEngine::monte_carlo) {
        m.parameters["trials"] = a.trials;
        m.parameters["seed"] = a.seed;
    }
    if (cfg.model == zeitnot::Model::bi) m.parameters["best_event"] = a.best_event;

    if (!a.histogram_path.empty()) {
        std::ofstream f(a.histogram_path, std::ios::binary);
        if (!f) {
            std::fprintf(stderr, "error: cannot open %s for writing\n",
                         a.histogram_path.c_str());
            return 2;
        }
        f << zeitnot::stop_histogram_csv(rep, m);
    }

    if (emit.format == "csv") {
        std::string out = zeitnot::csv_manifest_comment(m);
        out += zeitnot::csv_line({"expected_payoff1", "expected_payoff2", "win1", "win2", "tie",
                                  "neither", "mean_fee1", "mean_fee2", "std_error1",
                                  "std_error2", "samples"});
        out += zeitnot::csv_line(
            {zeitnot::csv_field(rep.expected_payoff1), zeitnot::csv_field(rep.expected_payoff2),
             zeitnot::csv_field(rep.win1), zeitnot::csv_field(rep.win2),
             zeitnot::csv_field(rep.tie), zeitnot::csv_field(rep.neither),
             zeitnot::csv_field(rep.mean_fee1), zeitnot::csv_field(rep.mean_fee2),
             rep.has_std_error ? zeitnot::csv_field(rep.std_error1) : "",
             rep.has_std_error ? zeitnot::csv_field(rep.std_error2) : "",
             std::to_string(rep.samples)});
        return emit.write(out);
    }
    return emit.json(m, zeitnot::duel_to_json(rep));
}

// ---------------------------------------------------------------------------
// table1

int run_table1(const std::vector<double>& betas, const Emit& emit) {
    const std::vector<double> use = betas.empty() ? zeitnot::table1_default_betas() : betas;
    const std::vector<zeitnot::Table1Row> rows = zeitnot::table1(use);

    zeitnot::RunManifest m;
    m.command = "table1";
    m.parameters["betas"] = use;

    bool any_empty = false;
    for (const auto& r : rows)
        if (r.root_count == 0) any_empty = true;

    int rc = 0;
    if (emit.format == "csv") {
        rc = emit.write(zeitnot::table1_csv(rows, m));
    } else {
        ordered_json data;
        ordered_json list = ordered_json::array();
        for (const auto& r : rows) list.push_back(zeitnot::table1_row_to_json(r));
        data["rows"] = std::move(list);
        rc = emit.json(m, data);
    }
    if (rc != 0) return rc;
    if (any_empty) {
        std::fprintf(stderr, "no root: at least one beta produced an empty scan\n");
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string model = "bi";
    std::string beta_grid;     // bi: beta lo:hi:step
    std::string c_alpha_grid;  // mono: c_alpha lo:hi:step
    double alpha = 0.5;        // mono: fixed fee rate
    std::string interp = "additive";
};

int run_sweep(const SweepArgs& a, const Emit& emit) {
    zeitnot::RunManifest m;
    m.command = "sweep";
    m.parameters["model"] = a.model;

    struct Row {
        double param;
        std::size_t root_count;
        double z, residual;
        bool has_root;
    };
    std::vector<Row> rows;
    std::string param_name;

    if (a.model == "bi") {
        if (a.beta_grid.empty()) throw CLI::ValidationError("--beta", "required for --model bi");
        param_name = "beta";
        m.parameters["beta"] = a.beta_grid;
        for (double b : parse_grid(a.beta_grid)) {
            const auto sol = zeitnot::bi_solve_asymptotic(b);
            if (sol.regime_warning) std::fprintf(stderr, "warning: %s\n", sol.regime_note.c_str());
            const bool has = !sol.scan.roots.empty();
            rows.push_back({b, sol.scan.roots.size(), has ? sol.scan.roots.back() : 0.0,
                            has ? sol.scan.residuals.back() : 0.0, has});
        }
    } else {
        if (a.c_alpha_grid.empty())
            throw CLI::ValidationError("--c-alpha", "required for --model mono");
        param_name = "c_alpha";
        m.parameters["c_alpha"] = a.c_alpha_grid;
        m.parameters["alpha"] = a.alpha;
        m.parameters["interp"] = a.interp;
        const zeitnot::MonoVariant v = a.interp == "multiplicative"
                                           ? zeitnot::MonoVariant::multiplicative_bracket
                                           : zeitnot::MonoVariant::additive_bracket;
        for (double c : parse_grid(a.c_alpha_grid)) {
            const auto sol = zeitnot::mono_solve_asymptotic(c, a.alpha, v);
            if (sol.regime_warning) std::fprintf(stderr, "warning: %s\n", sol.regime_note.c_str());
            const bool has = !sol.scan.roots.empty();
            rows.push_back({c, sol.scan.roots.size(), has ? sol.scan.roots.back() : 0.0,
                            has ? sol.scan.residuals.back() : 0.0, has});
        }
    }

    bool any_empty = false;
    for (const auto& r : rows)
        if (!r.has_root) any_empty = true;

    int rc = 0;
    if (emit.format == "csv") {
        std::string out = zeitnot::csv_manifest_comment(m);
        out += zeitnot::csv_line({param_name, "root_count", "z", "residual"});
        for (const auto& r : rows)
            out += zeitnot::csv_line({zeitnot::csv_field(r.param), std::to_string(r.root_count),
                                      r.has_root ? zeitnot::csv_field(r.z) : "",
                                      r.has_root ? zeitnot::csv_field(r.residual) : ""});
        rc = emit.write(out);
    } else {
        ordered_json data;
        ordered_json list = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json item;
            item[param_name] = r.param;
            item["root_count"] = r.root_count;
            if (r.has_root) {
                item["z"] = r.z;
                item["residual"] = r.residual;
            }
            list.push_back(std::move(item));
        }
        data["rows"] = std::move(list);
        rc = emit.json(m, data);
    }
    if (rc != 0) return rc;
    if (any_empty) {
        std::fprintf(stderr, "no root: at least one grid point produced an empty scan\n");
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// report

int run_report(const Emit& emit) {
    if (emit.format == "csv")
        throw CLI::ValidationError("--format", "report supports only JSON output");
    zeitnot::RunManifest m;
    m.command = "report";
    m.parameters = ordered_json::object();
    return emit.json(m, zeitnot::build_reference_report());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Competing-buyer cutoff strategies: thresholds, limiting equations, duels"};
    app.require_subcommand(1);
    app.fallthrough();  // global --format/--out/--config usable after the subcommand
    app.set_config("--config", "", "Config file (key=value; flags take precedence)");
    app.set_version_flag("--version", zeitnot::version_string());

    Emit emit;
    app.add_option("--format", emit.format, "Output format")
        ->transform(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--out", emit.out_path, "Write output to this file instead of stdout");

    ThresholdArgs th;
    CLI::App* c_th = app.add_subcommand("threshold", "Scan for the optimal cutoff");
    c_th->add_option("--model", th.model, "Record-chain model")
        ->transform(CLI::IsMember({"mono", "bi"}))
        ->capture_default_str();
    c_th->add_option("--N", th.N, "Portfolio size")->required()->check(CLI::Range(2, 1000000));
    c_th->add_option("--alpha", th.alpha, "Fee rate in (0, 1]")->required();
    c_th->add_option("--c-alpha", th.c_alpha, "Reward scale")->required();
    c_th->add_option("--formula-mode", th.formula_mode, "Price formula (single-quality model)")
        ->transform(CLI::IsMember({"rederived", "as_printed"}))
        ->capture_default_str();
    c_th->add_option("--chain-mode", th.chain_mode, "Defective-row repair (two-quality model)")
        ->transform(CLI::IsMember({"row_normalized", "as_printed"}))
        ->capture_default_str();
    c_th->add_option("--zero-rule", th.zero_rule, "Absorption state behaviour")
        ->transform(CLI::IsMember({"absorbing", "restart"}))
        ->capture_default_str();

    AsymptoticArgs as;
    CLI::App* c_as = app.add_subcommand("asymptotic", "Solve the limiting cutoff equation");
    c_as->add_option("--model", as.model, "Record-chain model")
        ->transform(CLI::IsMember({"mono", "bi"}))
        ->capture_default_str();
    c_as->add_option("--beta", as.beta, "Two-quality parameter 4 c_alpha / alpha");
    c_as->add_option("--alpha", as.alpha, "Fee rate (single-quality model)");
    c_as->add_option("--c-alpha", as.c_alpha, "Reward scale (single-quality model)");
    c_as->add_option("--interp", as.interp, "Bracket reading of the printed equation")
        ->transform(CLI::IsMember({"additive", "multiplicative", "both"}))
        ->capture_default_str();

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "Run the two-buyer duel");
    c_sim->add_option("--model", sim.model, "Record-chain model")
        ->transform(CLI::IsMember({"mono", "bi"}))
        ->capture_default_str();
    c_sim->add_option("--N", sim.N, "Portfolio size")->required()->check(CLI::Range(1, 1000000));
    c_sim->add_option("--l1", sim.l1, "Buyer 1 cutoff (N+1 = never stop)")->required();
    c_sim->add_option("--l2", sim.l2, "Buyer 2 cutoff (N+1 = never stop)")->required();
    c_sim->add_option("--alpha", sim.alpha, "Fee rate in [0, 1]")->capture_default_str();
    c_sim->add_option("--c-alpha", sim.c_alpha, "Reward scale")->capture_default_str();
    c_sim->add_option("--engine", sim.engine, "Evaluation engine")
        ->transform(CLI::IsMember({"exact", "monte_carlo"}))
        ->capture_default_str();
    c_sim->add_option("--trials", sim.trials, "Monte Carlo trial count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "Monte Carlo seed")
        ->envname("ZEITNOT_SEED")
        ->capture_default_str();
    c_sim->add_option("--best-event", sim.best_event,
                      "Two-quality winning event: best in either or both coordinates")
        ->transform(CLI::IsMember({"either", "both"}))
        ->capture_default_str();
    c_sim->add_option("--histogram", sim.histogram_path,
                      "Also write a stop-time histogram CSV to this path");

    std::vector<double> betas;
    CLI::App* c_t1 = app.add_subcommand("table1", "Cutoff fractions over the published betas");
    c_t1->add_option("--betas", betas, "Beta values (default: the published eleven)")
        ->delimiter(',');

    SweepArgs sw;
    CLI::App* c_sw = app.add_subcommand("sweep", "Solve over a parameter grid");
    c_sw->add_option("--model", sw.model, "Record-chain model")
        ->transform(CLI::IsMember({"mono", "bi"}))
        ->capture_default_str();
    c_sw->add_option("--beta", sw.beta_grid, "Beta grid lo:hi:step (two-quality model)");
    c_sw->add_option("--c-alpha", sw.c_alpha_grid, "c_alpha grid lo:hi:step (single-quality)");
    c_sw->add_option("--alpha", sw.alpha, "Fixed fee rate (single-quality model)")
        ->capture_default_str();
    c_sw->add_option("--interp", sw.interp, "Bracket reading (single-quality model)")
        ->transform(CLI::IsMember({"additive", "multiplicative"}))
        ->capture_default_str();

    CLI::App* c_rep = app.add_subcommand("report", "Aggregate comparison report (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // help/version exit 0; any parse failure is 2
    }

    try {
        if (c_th->parsed()) return run_threshold(th, emit);
        if (c_as->parsed()) return run_asymptotic(as, emit);
        if (c_sim->parsed()) return run_simulate(sim, emit);
        if (c_t1->parsed()) return run_table1(betas, emit);
        if (c_sw->parsed()) return run_sweep(sw, emit);
        if (c_rep->parsed()) return run_report(emit);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const zeitnot::size_cap_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;  // unreachable with require_subcommand(1)
}
