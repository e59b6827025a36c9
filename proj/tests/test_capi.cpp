// Exercises the shared-library C API surface end to end: handles, error codes,
// solver results and the scenario entry points.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "nashvar.h"

namespace {

std::string temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("nashvar_capi_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

struct LawHandle {
    nv_law* law = nullptr;
    ~LawHandle() { nv_law_free(law); }
};

} // namespace

TEST_CASE("law lifecycle, quantiles and moments") {
    LawHandle h;
    double mu = 0.03, sigma = 0.2;
    REQUIRE(nv_law_from_market(&mu, &sigma, 1, 4.0, &h.law) == NV_OK);

    double nu = 0.0, tau = 0.0;
    REQUIRE(nv_law_params(h.law, &nu, &tau) == NV_OK);
    CHECK(nu == doctest::Approx(-0.045).epsilon(1e-14));
    CHECK(tau * tau == doctest::Approx(0.09).epsilon(1e-14));

    double q80 = 0.0;
    REQUIRE(nv_law_quantile(h.law, 0.8, &q80) == NV_OK);
    CHECK(q80 == doctest::Approx(1.2306).epsilon(5e-4));

    CHECK(nv_law_quantile(h.law, 1.2, &q80) == NV_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(nv_last_error()) > 0);

    double full = 0.0;
    REQUIRE(nv_law_truncated_power_moment(h.law, 1.0, 0.0, INFINITY, &full) == NV_OK);
    CHECK(full == doctest::Approx(1.0).epsilon(1e-13));

    double c2 = 0.0;
    REQUIRE(nv_law_interval_upper_bound(h.law, 0.1, 0.2, &c2) == NV_OK);
    CHECK(c2 == doctest::Approx(0.7427).epsilon(5e-4));
    CHECK(nv_law_interval_upper_bound(h.law, 1.8, 0.9, &c2) == NV_ERR_INFEASIBLE);

    // Degenerate markets are rejected.
    nv_law* bad = nullptr;
    double zero = 0.0;
    CHECK(nv_law_from_market(&zero, &sigma, 1, 4.0, &bad) == NV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("two-agent log solve through the C API") {
    LawHandle h;
    REQUIRE(nv_law_create(-0.045, 0.3, &h.law) == NV_OK);

    nv_result* r = nullptr;
    REQUIRE(nv_solve_log2(h.law, 3.0, 2.0, 0.5, 0.2, 0.9, 0.5, nullptr, &r) == NV_OK);
    int tag = -1;
    REQUIRE(nv_result_case(r, &tag) == NV_OK);
    CHECK(tag == NV_CASE_FAMILY_FREE_SET);

    double lambda2 = 0.0;
    REQUIRE(nv_result_lambda(r, 1, &lambda2) == NV_OK);
    CHECK(lambda2 == doctest::Approx(1.825).epsilon(1e-14));

    double lo = 0.0, hi = 0.0;
    REQUIRE(nv_result_set(r, 1, &lo, &hi) == NV_OK);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(0.7427).epsilon(5e-4));
    CHECK(nv_result_set(r, 0, &lo, &hi) == NV_ERR_INVALID_ARGUMENT); // agent 1 has no set

    nv_wealth* w2 = nullptr;
    REQUIRE(nv_result_wealth(r, 1, &w2) == NV_OK);
    int cells = 0;
    REQUIRE(nv_wealth_num_cells(w2, &cells) == NV_OK);
    CHECK(cells == 2);
    double price = 0.0;
    REQUIRE(nv_wealth_price(h.law, w2, &price) == NV_OK);
    CHECK(price == doctest::Approx(2.0).epsilon(1e-12));
    double value = 0.0;
    REQUIRE(nv_wealth_eval(w2, 0.5, &value) == NV_OK);
    CHECK(value == doctest::Approx(2.7 / 0.5).epsilon(1e-12));
    nv_wealth_free(w2);

    // No equilibrium: status carries the case.
    nv_result* none = nullptr;
    CHECK(nv_solve_log2(h.law, 3.0, 2.0, 0.5, 0.9, 0.9, 0.5, nullptr, &none) ==
          NV_ERR_NO_EQUILIBRIUM);
    int none_tag = -1;
    REQUIRE(nv_result_case(none, &none_tag) == NV_OK);
    CHECK(none_tag == NV_CASE_NO_EQUILIBRIUM);
    nv_result_free(none);
    nv_result_free(r);
}

TEST_CASE("power, multi-agent and benchmark solves through the C API") {
    LawHandle h;
    REQUIRE(nv_law_create(-0.045, 0.3, &h.law) == NV_OK);

    nv_result* power = nullptr;
    REQUIRE(nv_solve_power2(h.law, 3.0, 2.0, 0.5, 0.5, 0.9, 0.5, 0.7, &power) == NV_OK);
    int tag = -1;
    nv_result_case(power, &tag);
    CHECK(tag == NV_CASE_POWER_A);
    nv_result_free(power);

    nv_result* infeasible = nullptr;
    CHECK(nv_solve_power2(h.law, 3.0, 2.0, 0.5, 0.9, 0.9, 0.5, 0.7, &infeasible) ==
          NV_ERR_INFEASIBLE);
    nv_result_free(infeasible);

    double x0[4] = {5.0, 4.0, 3.0, 2.0};
    double alpha[4] = {0.2, 0.2, 0.2, 0.2};
    double beta[16];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) beta[i * 4 + j] = (i == j) ? 0.0 : 0.3;
    }
    nv_result* multi = nullptr;
    REQUIRE(nv_solve_disjoint(h.law, 4, x0, alpha, beta, &multi) == NV_OK);
    double lam = 0.0;
    REQUIRE(nv_result_lambda(multi, 0, &lam) == NV_OK);
    CHECK(lam == 5.0);
    REQUIRE(nv_result_lambda(multi, 3, &lam) == NV_OK);
    CHECK(lam == doctest::Approx(1.6034).epsilon(1e-3));
    double resid = 1.0;
    REQUIRE(nv_result_residual(multi, &resid) == NV_OK);
    CHECK(resid <= 1e-12);
    nv_result_free(multi);

    double x03[3] = {3.0, 2.0, 1.0};
    double alpha3[3] = {0.4, 0.4, 0.4};
    double beta3[9];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) beta3[i * 3 + j] = (i == j) ? 0.0 : 0.4;
    }
    nv_result* part = nullptr;
    REQUIRE(nv_solve_partition(h.law, 3, 5, x03, alpha3, beta3, &part) == NV_OK);
    int converged = 0;
    REQUIRE(nv_result_converged(part, &converged) == NV_OK);
    CHECK(converged == 1);
    nv_result_free(part);

    nv_result* bench = nullptr;
    REQUIRE(nv_solve_benchmark(0.03, 0.2, 4.0, 0.45, 0.5, 0.3, &bench) == NV_OK);
    nv_result_case(bench, &tag);
    CHECK(tag == NV_CASE_BENCHMARK);
    nv_wealth* bw = nullptr;
    REQUIRE(nv_result_wealth(bench, 0, &bw) == NV_OK);
    double price = 0.0;
    REQUIRE(nv_wealth_price(h.law, bw, &price) == NV_OK);
    CHECK(price == doctest::Approx(0.45).epsilon(1e-10));
    nv_wealth_free(bw);
    nv_result_free(bench);
}

TEST_CASE("scenario entry points and example registry through the C API") {
    REQUIRE(nv_example_count() > 20);
    int fig01 = -1;
    for (int i = 0; i < nv_example_count(); ++i) {
        if (std::string(nv_example_name(i)) == "fig01") fig01 = i;
    }
    REQUIRE(fig01 >= 0);
    CHECK(nv_example_text(fig01) != nullptr);
    CHECK(nv_example_name(nv_example_count()) == nullptr);

    std::string dir = temp_dir("run");
    std::string config_path = dir + "/fig01.json";
    {
        std::ofstream f(config_path);
        f << nv_example_text(fig01);
    }
    REQUIRE(nv_run_scenario(config_path.c_str(), dir.c_str(), -1, nullptr) == NV_OK);
    CHECK(std::filesystem::exists(dir + "/manifest.json"));
    CHECK(std::filesystem::exists(dir + "/payoff_curves.csv"));

    char report[1 << 15];
    REQUIRE(nv_verify_scenario(config_path.c_str(), dir.c_str(), 0.0, report, sizeof(report)) ==
            NV_OK);
    CHECK(std::string(report).find("[PASS] budget_agent2") != std::string::npos);

    CHECK(nv_verify_scenario(config_path.c_str(), dir.c_str(), 0.05, report, sizeof(report)) ==
          NV_ERR_VERIFICATION_FAILED);
    CHECK(std::string(report).find("[FAIL]") != std::string::npos);

    // Grid override syntax is validated.
    CHECK(nv_run_scenario(config_path.c_str(), dir.c_str(), -1, "bad") == NV_ERR_INVALID_ARGUMENT);
    CHECK(nv_run_scenario(config_path.c_str(), dir.c_str(), -1, "0.1:2.0:50") == NV_OK);
}
