#include "doctest.h"

#include <cmath>

#include "rwlab/scenarios.hpp"

using namespace rwlab;

TEST_CASE("forelli-rudin single cases") {
    SUBCASE("equal weights") {
        const Report rep = verify_forelli_rudin(0.0, 0.0, 2.0);
        CHECK(rep.pass());
        // A_2 = 1 for equal weights
        for (const auto& c : rep.checks)
            if (c.name == "constant") CHECK(c.value == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("gamma=1, beta=0, p=2 has constant 2/sqrt(3)") {
        const Report rep = verify_forelli_rudin(1.0, 0.0, 2.0);
        CHECK(rep.pass());
        for (const auto& c : rep.checks)
            if (c.name == "constant")
                CHECK(c.value == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-8));
    }
    SUBCASE("divergent side (sign test false)") {
        const Report rep = verify_forelli_rudin(0.0, 3.0, 2.0);
        CHECK(rep.pass()); // both sides false still matches
    }
    CHECK_THROWS_AS(verify_forelli_rudin(-1.5, 0.0, 2.0), std::invalid_argument);
}

TEST_CASE("counterexample report passes for several (alpha, p)") {
    CHECK(counterexample_report(2.0, 2.0).pass());
    CHECK(counterexample_report(3.0, 3.0).pass());
    CHECK_THROWS_AS(counterexample_report(0.5, 2.0), std::invalid_argument);
}

TEST_CASE("calderon report on a fast pair") {
    CalderonOptions opts;
    opts.grid_n = 160;
    opts.chain_profiles = 60;
    const Report rep = verify_calderon(RadialWeight::standard(1.0), RadialWeight::standard(0.0),
                                       2.0, opts);
    CHECK(rep.pass());
    bool saw_band = false;
    for (const auto& c : rep.checks)
        if (c.name.rfind("band_", 0) == 0) saw_band = true;
    CHECK(saw_band);
}

TEST_CASE("calderon divergence branch") {
    CalderonOptions opts;
    opts.grid_n = 128;
    opts.chain_profiles = 30;
    const Report rep = verify_calderon(RadialWeight::standard(0.0), RadialWeight::log_type(2.0),
                                       2.0, opts);
    bool saw_growth = false;
    for (const auto& c : rep.checks)
        if (c.name == "divergence_growth") {
            saw_growth = true;
            CHECK(c.pass);
        }
    CHECK(saw_growth);
}

TEST_CASE("scenario parsing") {
    const std::string text = R"(
# a comment
name = "demo"
kind = "counterexample"
alpha = 2.5
p = [2, 3]
seed = 99
checks = ["mp_bounded", "ap_diverging"]
)";
    const Scenario s = parse_scenario_text(text, "fallback");
    CHECK(s.name == "demo");
    CHECK(s.kind == "counterexample");
    CHECK(s.number("alpha", 0.0) == 2.5);
    CHECK(s.list("p", {}).size() == 2);
    CHECK(s.seed == 99);
    REQUIRE(s.checks.size() == 2);
    CHECK(s.checks[0] == "mp_bounded");

    CHECK_THROWS_AS(parse_scenario_text("alpha = 2\n", "x"), std::invalid_argument); // no kind
    CHECK_THROWS_AS(parse_scenario_text("kind = \"counterexample\"\nbroken line\n", "x"),
                    std::invalid_argument);
}

TEST_CASE("run_scenario validates check names before computing") {
    Scenario s;
    s.kind = "counterexample";
    s.name = "bad-check";
    s.checks = {"no_such_check"};
    CHECK_THROWS_AS(run_scenario(s), std::invalid_argument);
    Scenario s2;
    s2.kind = "unknown-kind";
    CHECK_THROWS_AS(run_scenario(s2), std::invalid_argument);
}

TEST_CASE("run_scenario: counterexample with selected checks") {
    Scenario s;
    s.kind = "counterexample";
    s.name = "ce";
    s.numbers["alpha"] = {2.0};
    s.numbers["p"] = {2.0};
    s.checks = {"mp_bounded"};
    const Report rep = run_scenario(s);
    REQUIRE(rep.checks.size() == 1);
    CHECK(rep.checks[0].name == "mp_bounded");
    CHECK(rep.pass());
}

TEST_CASE("determinism: identical scenario and seed produce identical bytes") {
    Scenario s;
    s.kind = "calderon";
    s.name = "det";
    s.strings["omega"] = "std:gamma=0";
    s.strings["nu"] = "std:gamma=0";
    s.numbers["p"] = {2.0};
    s.numbers["grid_n"] = {96.0};
    s.numbers["chain_profiles"] = {20.0};
    s.seed = 5;
    const std::string a = run_scenario(s).to_json();
    const std::string b = run_scenario(s).to_json();
    CHECK(a == b);
    CHECK(a.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("report serialization") {
    Report rep;
    rep.scenario = "demo";
    rep.kind = "demo-kind";
    rep.seed = 3;
    rep.checks.push_back({"a", 1.0, 1.0, 0.1, true, ""});
    rep.checks.push_back({"b", 2.0, 0.0, 0.0, false, "why"});
    CHECK_FALSE(rep.pass());
    const std::string js = rep.to_json();
    CHECK(js.find("\"scenario\": \"demo\"") != std::string::npos);
    CHECK(js.find("\"pass\": false") != std::string::npos);
    const std::string csv = rep.to_csv();
    CHECK(csv.rfind("name,value", 0) == 0);

    Report prof;
    prof.profile = {{0.5, 1.25}, {0.75, 2.5}};
    const std::string pcsv = prof.to_csv();
    CHECK(pcsv.rfind("r,value", 0) == 0);
    CHECK(pcsv.find("0.5,1.25") != std::string::npos);
}
