#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nashvar/scenario.hpp"

using namespace nashvar;

namespace {

std::string temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("nashvar_scenario_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

const char* example_text(const std::string& name) {
    for (const auto& ex : example_configs()) {
        if (name == ex.name) return ex.text;
    }
    return nullptr;
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::string* header = nullptr) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ls, tok, ',')) {
            row.push_back(tok == "inf" ? kInfinity : std::stod(tok));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

TEST_CASE("config validation lists every problem") {
    CHECK_THROWS_AS(parse_config_text("not json"), std::invalid_argument);
    try {
        parse_config_text("{}");
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("solver") != std::string::npos);
        CHECK(msg.find("market") != std::string::npos);
        CHECK(msg.find("game") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text(R"({"solver":"bogus","market":{"mu":0.03,"sigma":0.2,
        "horizon":4.0},"game":{"x0":[3,2],"alpha":[0.5,0.2],"beta":[0.9,0.5]}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text(R"({"solver":"log2","market":{"mu":0.03,"sigma":0.2,
        "horizon":4.0},"game":{"x0":[3,2],"alpha":[0.5,0.2],"beta":[0.9,0.5]},
        "grid":{"min":0.0,"max":3.0,"points":100}})"),
                    std::invalid_argument);
}

TEST_CASE("every bundled example config parses") {
    for (const auto& ex : example_configs()) {
        CAPTURE(ex.name);
        CHECK_NOTHROW(parse_config_text(ex.text));
    }
}

TEST_CASE("run log2 scenario: outputs, jump location, round-trip, determinism") {
    ScenarioConfig cfg = parse_config_text(example_text("fig01"));
    std::string out1 = temp_dir("fig01_a");
    Outcome res = run_scenario(cfg, out1);
    CHECK(res.code == kStatusOk);

    // The payoff curve of agent 2 jumps at z ~ 0.7427 from beta1 x0_1 / z to
    // lambda2 / z.
    std::string header;
    auto rows = read_csv(out1 + "/payoff_curves.csv", &header);
    CHECK(header == "z,X1,X2,X1_unconstrained,X2_unconstrained");
    double split = 0.74268270586369789;
    for (const auto& row : rows) {
        double z = row[0];
        double expected2 = (z <= split ? 2.7 : 1.825) / z;
        CHECK(row[2] == doctest::Approx(expected2).epsilon(1e-12));
        CHECK(row[1] == doctest::Approx(3.0 / z).epsilon(1e-12));
    }

    // Wealth CSV round-trip reprices to the budget.
    LognormalLaw law(-0.045, 0.3);
    PiecewiseWealth w2 = read_wealth_csv(out1 + "/wealth_agent2.csv");
    CHECK(price(law, w2) == doctest::Approx(2.0).epsilon(1e-12));

    // Byte-identical outputs on a second run.
    std::string out2 = temp_dir("fig01_b");
    run_scenario(cfg, out2);
    for (const char* f : {"payoff_curves.csv", "wealth_agent1.csv", "wealth_agent2.csv"}) {
        CHECK(file_digest(out1 + "/" + f) == file_digest(out2 + "/" + f));
    }
}

TEST_CASE("config output field supplies the default directory") {
    std::string out = temp_dir("cfg_output_field");
    std::string text = std::string(example_text("fig01"));
    text.insert(text.rfind('}'), ", \"output\": \"" + out + "/nested\"\n");
    ScenarioConfig cfg = parse_config_text(text);
    CHECK(cfg.output_dir == out + "/nested");
    CHECK(run_scenario(cfg).code == kStatusOk);
    CHECK(std::filesystem::exists(out + "/nested/manifest.json"));
}

TEST_CASE("run scenarios: distinct exit codes") {
    // Infeasible power region.
    ScenarioConfig infeasible = parse_config_text(example_text("fig10b"));
    CHECK(run_scenario(infeasible, temp_dir("fig10b")).code == kStatusInfeasible);

    // No equilibrium in the log game.
    ScenarioConfig none = parse_config_text(R"({"solver":"log2",
        "market":{"mu":0.03,"sigma":0.2,"horizon":4.0},
        "game":{"x0":[3.0,2.0],"alpha":[0.5,0.9],"beta":[0.9,0.5],"gamma":1.0}})");
    CHECK(run_scenario(none, temp_dir("noeq")).code == kStatusNoEquilibrium);
}

TEST_CASE("run replicate scenario and verify it") {
    ScenarioConfig cfg = parse_config_text(example_text("fig05b"));
    std::string out = temp_dir("fig05b");
    Outcome res = run_scenario(cfg, out);
    CHECK(res.code == kStatusOk);

    std::string header;
    auto rows = read_csv(out + "/paths.csv", &header);
    CHECK(header == "path,time,z,closed_form_wealth,self_financed_wealth,amount_asset_1,capped");
    REQUIRE(rows.size() == 801);
    CHECK(rows[0][1] == 0.0);
    CHECK(rows[0][3] == doctest::Approx(2.0).epsilon(1e-9)); // initial price x0_2
    CHECK(rows[0][3] == rows[0][4]);                          // self-financed starts at the price

    Outcome verdict = verify_scenario(cfg, out);
    CHECK(verdict.code == kStatusOk);
    CHECK(verdict.message.find("band_additivity") != std::string::npos);
    CHECK(verdict.message.find("initial_price") != std::string::npos);

    // Tampering with an output breaks the digest check.
    {
        std::ofstream f(out + "/paths.csv", std::ios::app);
        f << "tamper\n";
    }
    Outcome tampered = verify_scenario(cfg, out);
    CHECK(tampered.code == kStatusVerificationFailed);
    CHECK(tampered.message.find("[FAIL] digest paths.csv") != std::string::npos);
}

TEST_CASE("verify flags an injected lambda perturbation with a named check") {
    ScenarioConfig cfg = parse_config_text(example_text("fig09"));
    std::string out = temp_dir("fig09");
    REQUIRE(run_scenario(cfg, out).code == kStatusOk);
    CHECK(verify_scenario(cfg, out).code == kStatusOk);

    Outcome bad = verify_scenario(cfg, out, 0.05);
    CHECK(bad.code == kStatusVerificationFailed);
    CHECK(bad.message.find("[FAIL] lagrangian_F_vanishes_at_split") != std::string::npos);
}

TEST_CASE("multi-agent scenarios run and verify") {
    for (const char* name : {"fig11", "partition", "benchmark"}) {
        CAPTURE(name);
        ScenarioConfig cfg = parse_config_text(example_text(name));
        std::string out = temp_dir(name);
        REQUIRE(run_scenario(cfg, out).code == kStatusOk);
        Outcome verdict = verify_scenario(cfg, out);
        CHECK(verdict.code == kStatusOk);
    }
}
