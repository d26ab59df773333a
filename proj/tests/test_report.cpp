#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <regex>
#include <string>
#include <vector>

#include <zeitnot/zeitnot.hpp>

using namespace zeitnot;

TEST_CASE("every document is wrapped in a manifest envelope") {
    RunManifest m;
    m.command = "threshold";
    m.parameters["N"] = 30;
    m.seed = 42;
    const ordered_json doc = envelope(m, ordered_json{{"answer", 1}});

    REQUIRE(doc.contains("manifest"));
    REQUIRE(doc.contains("data"));
    const ordered_json& man = doc["manifest"];
    CHECK(man["command"] == "threshold");
    CHECK(man["tool_version"] == version_string());
    CHECK(man["seed"] == 42);
    CHECK(man["parameters"]["N"] == 30);
    // Timestamp is filled at emit time in ISO 8601 UTC.
    const std::string ts = man["timestamp"].get<std::string>();
    CHECK(std::regex_match(ts, std::regex(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)")));
    CHECK(doc["data"]["answer"] == 1);
}

TEST_CASE("threshold rendering carries the full scan evidence either way") {
    MonoParams params;
    params.alpha = 0.5;
    params.c_alpha = 0.25;

    params.N = 6;
    const ordered_json found = threshold_to_json(mono_optimal_threshold(params));
    CHECK(found["status"] == "found");
    CHECK(found["l_star"] == 2);
    CHECK(found["z"].get<double>() == Catch::Approx(2.0 / 6.0));
    REQUIRE(found["margin"].is_array());
    CHECK(found["margin"].size() == 6);
    CHECK(found["scan_continue_gap"].size() == 5);  // candidates 2..6
    CHECK(found["scan_stop_gap"].size() == 5);
    CHECK(found["partition_checked"] == true);

    params.N = 10;
    const ordered_json missed = threshold_to_json(mono_optimal_threshold(params));
    CHECK(missed["status"] == "no_crossing");
    CHECK_FALSE(missed.contains("l_star"));
    CHECK_FALSE(missed.contains("margin"));
    CHECK(missed["scan_continue_gap"].size() == 9);
    CHECK(missed["scan_stop_gap"].size() == 9);
}

TEST_CASE("duel rendering includes uncertainty only when it exists") {
    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 4;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    const ordered_json exact = duel_to_json(exact_expected_payoff(cfg));
    CHECK(exact["engine"] == "exact");
    CHECK_FALSE(exact.contains("std_error1"));
    CHECK(exact["stop_count1"].size() == 5);
    CHECK(exact["samples"] == 576);

    cfg.engine = DuelEngine::monte_carlo;
    cfg.trials = 5000;
    cfg.seed = 9;
    const ordered_json mc = duel_to_json(monte_carlo(cfg));
    CHECK(mc["engine"] == "monte_carlo");
    CHECK(mc["std_error1"].get<double>() > 0.0);
    CHECK(mc["std_error_fee1"].get<double>() > 0.0);
    CHECK(mc["samples"] == 5000);
}

TEST_CASE("reference report structure and frozen findings") {
    const ordered_json rep = build_reference_report();

    const std::vector<std::string> sections = {
        "mono_asymptotic",  "table1",
        "skim_fraction",    "bi_chain_diagnostics",
        "threshold_cross_check", "asymptotic_consistency",
        "partition_census", "price_mode_gap"};
    for (const auto& s : sections) {
        CAPTURE(s);
        REQUIRE(rep.contains(s));
    }

    SECTION("single-quality asymptotic readings") {
        const ordered_json& sec = rep["mono_asymptotic"];
        CHECK(sec["z_published"].get<double>() == Catch::Approx(0.21));
        REQUIRE(sec["variants"].size() == 2);
        CHECK(sec["variants"][0]["z_computed"].get<double>() ==
              Catch::Approx(0.235091575771).margin(1e-9));
        CHECK(sec["variants"][0]["deviation_from_published"].get<double>() ==
              Catch::Approx(0.025091575771).margin(1e-9));
        CHECK(sec["variants"][1]["z_computed"].get<double>() ==
              Catch::Approx(0.222150922744).margin(1e-9));
        CHECK(sec["invariant_form"]["alpha_independent"] == true);
        CHECK(sec["invariant_form"]["root_count"] == 1);
    }

    SECTION("two-quality table and skim fraction") {
        const ordered_json& t1 = rep["table1"];
        CHECK(t1["rows"].size() == 11);
        CHECK(t1["strictly_increasing"] == true);
        const double max_dev = t1["max_abs_deviation"].get<double>();
        CHECK(max_dev > 0.05);
        CHECK(max_dev < 0.07);

        const ordered_json& skim = rep["skim_fraction"];
        CHECK(skim["z_computed_4dp"] == "0.0985");
        CHECK(skim["percent_computed"].get<double>() ==
              Catch::Approx(9.84941223554).margin(1e-6));
        CHECK(skim["percent_published"].get<double>() == Catch::Approx(15.54));
        CHECK(skim["percent_deviation"].get<double>() < 0.0);
    }

    SECTION("chain diagnostics expose the defective row") {
        const ordered_json& diag = rep["bi_chain_diagnostics"]["per_N"];
        REQUIRE(diag.size() == 4);
        CHECK(diag[0]["N"] == 3);
        CHECK(diag[0]["excess_exact"]["matches_computed"] == true);
        CHECK(diag[0]["clamped_states"].size() == 1);
        for (const auto& item : diag) CHECK(item["max_excess"].get<double>() > 0.0);
    }

    SECTION("cutoff cross-check records disagreement honestly") {
        const ordered_json& cases = rep["threshold_cross_check"]["cases"];
        REQUIRE(cases.size() == 3);
        for (const auto& c : cases) {
            CHECK(c.contains("oracle_l"));
            CHECK(c.contains("payoff_by_cutoff"));
            // At this fee the exact best reply is to stop immediately, which
            // no scan cutoff can match; every case carries its explanation.
            CHECK(c["oracle_l"] == 1);
            CHECK(c["agree"] == false);
            CHECK(c.contains("note"));
        }
        CHECK(cases[0]["analytic_status"] == "no_crossing");   // N = 4
        CHECK(cases[1]["analytic_status"] == "no_crossing");   // N = 5
        CHECK(cases[2]["analytic_status"] == "found");         // N = 6
        CHECK(cases[2]["analytic_l"] == 2);
    }

    SECTION("scan limit vs printed equation roots") {
        const ordered_json& ac = rep["asymptotic_consistency"];
        CHECK(ac["z_scan"].get<double>() == Catch::Approx(0.158).margin(1e-12));
        CHECK(ac["equation_roots"]["additive_bracket"].get<double>() ==
              Catch::Approx(0.235091575771).margin(1e-9));
        CHECK(ac["equation_roots"]["additive_bracket_gap_to_scan"].get<double>() ==
              Catch::Approx(0.235091575771 - 0.158).margin(1e-9));
        CHECK(ac["consistent_within_0.05"] == false);
    }

    SECTION("partition census separates boundary from interior") {
        const ordered_json& pc = rep["partition_census"];
        CHECK(pc["boundary"]["c_alpha"].get<double>() == Catch::Approx(0.25));
        CHECK(pc["interior"]["c_alpha"].get<double>() == Catch::Approx(0.30));
        CHECK(pc["boundary"]["all_found_ok"] == false);
        CHECK(pc["boundary"].contains("first_partition_failure_N"));
        CHECK(pc["interior"]["all_found_ok"] == true);
        CHECK(pc["interior"]["crossings_found"].get<int>() > 0);
    }

    SECTION("price formula audit") {
        CHECK(rep["price_mode_gap"]["max_abs_gap"].get<double>() ==
              Catch::Approx(2.891957422418268).margin(1e-12));
    }
}

TEST_CASE("reference report is deterministic") {
    const std::string a = build_reference_report().dump();
    const std::string b = build_reference_report().dump();
    CHECK(a == b);
}

TEST_CASE("csv renderings carry manifest comments and stable headers") {
    RunManifest m;
    m.command = "table1";
    m.seed = 7;
    const std::string csv = table1_csv(table1(), m);
    CHECK(csv.rfind("# manifest:", 0) == 0);
    CHECK(csv.find("beta,z_paper,z_computed,deviation") != std::string::npos);
    // Header comment + column header + 11 data rows.
    const long lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 13);

    DuelConfig cfg;
    cfg.model = Model::mono;
    cfg.N = 4;
    cfg.l1 = 2;
    cfg.l2 = 2;
    cfg.alpha = 0.5;
    cfg.c_alpha = 0.25;
    m.command = "simulate";
    const std::string hist = stop_histogram_csv(exact_expected_payoff(cfg), m);
    CHECK(hist.find("stop_time,count_buyer1,count_buyer2") != std::string::npos);
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 2 + cfg.N + 1);
}
