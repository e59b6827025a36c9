#include "nashvar.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "nashvar/errors.hpp"
#include "nashvar/market.hpp"
#include "nashvar/multi_agent.hpp"
#include "nashvar/scenario.hpp"
#include "nashvar/two_agent_log.hpp"
#include "nashvar/two_agent_power.hpp"

using namespace nashvar;

struct nv_law {
    LognormalLaw law;
};

struct nv_wealth {
    PiecewiseWealth wealth;
};

struct nv_result {
    nv_case tag = NV_CASE_NO_EQUILIBRIUM;
    std::vector<PiecewiseWealth> wealths;
    std::vector<double> lambdas;
    std::vector<std::optional<ZInterval>> sets;
    int iterations = 0;
    double residual = 0.0;
    bool converged = true;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
nv_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const NoEquilibriumError& e) {
        set_error(e.what());
        return NV_ERR_NO_EQUILIBRIUM;
    } catch (const InfeasibleError& e) {
        set_error(e.what());
        return NV_ERR_INFEASIBLE;
    } catch (const NonConvergenceError& e) {
        set_error(e.what());
        return NV_ERR_NO_CONVERGENCE;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return NV_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return NV_ERR_INTERNAL;
    }
}

nv_status require(bool cond, const char* msg) {
    if (cond) return NV_OK;
    set_error(msg);
    return NV_ERR_INVALID_ARGUMENT;
}

std::vector<std::vector<double>> beta_matrix_of(int n, const double* beta) {
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = beta[i * n + j];
    }
    return m;
}

nv_status status_from_code(int code, const std::string& msg) {
    if (code != kStatusOk) set_error(msg);
    switch (code) {
        case kStatusOk: return NV_OK;
        case kStatusInvalidConfig: return NV_ERR_INVALID_CONFIG;
        case kStatusNoEquilibrium: return NV_ERR_NO_EQUILIBRIUM;
        case kStatusInfeasible: return NV_ERR_INFEASIBLE;
        case kStatusNonConvergence: return NV_ERR_NO_CONVERGENCE;
        case kStatusVerificationFailed: return NV_ERR_VERIFICATION_FAILED;
        case kStatusIo: return NV_ERR_IO;
        default: return NV_ERR_INTERNAL;
    }
}

} // namespace

extern "C" {

const char* nv_version(void) { return "0.1.0"; }

const char* nv_last_error(void) { return g_last_error.c_str(); }

nv_status nv_law_create(double nu, double tau, nv_law** out) {
    if (nv_status s = require(out != nullptr, "nv_law_create: out is NULL")) return s;
    return guarded([&] {
        *out = new nv_law{LognormalLaw(nu, tau)};
        return NV_OK;
    });
}

nv_status nv_law_from_market(const double* mu, const double* sigma, int d, double horizon,
                             nv_law** out) {
    if (nv_status s = require(out && mu && sigma && d >= 1, "nv_law_from_market: bad arguments"))
        return s;
    return guarded([&] {
        MarketParams m(std::vector<double>(mu, mu + d),
                       std::vector<double>(sigma, sigma + static_cast<size_t>(d) * d), horizon);
        *out = new nv_law{law_from_market(m)};
        return NV_OK;
    });
}

void nv_law_free(nv_law* law) { delete law; }

nv_status nv_law_params(const nv_law* law, double* nu, double* tau) {
    if (nv_status s = require(law && nu && tau, "nv_law_params: bad arguments")) return s;
    *nu = law->law.nu;
    *tau = law->law.tau;
    return NV_OK;
}

nv_status nv_law_cdf(const nv_law* law, double z, double* out) {
    if (nv_status s = require(law && out, "nv_law_cdf: bad arguments")) return s;
    return guarded([&] {
        *out = cdf(law->law, z);
        return NV_OK;
    });
}

nv_status nv_law_quantile(const nv_law* law, double p, double* out) {
    if (nv_status s = require(law && out, "nv_law_quantile: bad arguments")) return s;
    return guarded([&] {
        *out = quantile(law->law, p);
        return NV_OK;
    });
}

nv_status nv_law_truncated_power_moment(const nv_law* law, double q, double lo, double hi,
                                        double* out) {
    if (nv_status s = require(law && out, "nv_law_truncated_power_moment: bad arguments")) return s;
    return guarded([&] {
        *out = truncated_power_moment(law->law, q, ZInterval(lo, hi));
        return NV_OK;
    });
}

nv_status nv_law_interval_upper_bound(const nv_law* law, double c1, double alpha, double* out) {
    if (nv_status s = require(law && out, "nv_law_interval_upper_bound: bad arguments")) return s;
    return guarded([&] {
        *out = interval_upper_bound(law->law, c1, alpha);
        return NV_OK;
    });
}

void nv_wealth_free(nv_wealth* w) { delete w; }

nv_status nv_wealth_num_cells(const nv_wealth* w, int* out) {
    if (nv_status s = require(w && out, "nv_wealth_num_cells: bad arguments")) return s;
    *out = static_cast<int>(w->wealth.cells().size());
    return NV_OK;
}

nv_status nv_wealth_cell(const nv_wealth* w, int index, double* z_lo, double* z_hi, double* coeff,
                         double* exponent) {
    if (nv_status s = require(w && z_lo && z_hi && coeff && exponent, "nv_wealth_cell: bad arguments"))
        return s;
    if (index < 0 || index >= static_cast<int>(w->wealth.cells().size())) {
        set_error("nv_wealth_cell: index out of range");
        return NV_ERR_INVALID_ARGUMENT;
    }
    const WealthCell& c = w->wealth.cells()[index];
    *z_lo = c.z_lo;
    *z_hi = c.z_hi;
    *coeff = c.coeff;
    *exponent = c.exponent;
    return NV_OK;
}

nv_status nv_wealth_eval(const nv_wealth* w, double z, double* out) {
    if (nv_status s = require(w && out, "nv_wealth_eval: bad arguments")) return s;
    return guarded([&] {
        *out = w->wealth(z);
        return NV_OK;
    });
}

nv_status nv_wealth_price(const nv_law* law, const nv_wealth* w, double* out) {
    if (nv_status s = require(law && w && out, "nv_wealth_price: bad arguments")) return s;
    return guarded([&] {
        *out = price(law->law, w->wealth);
        return NV_OK;
    });
}

nv_status nv_wealth_expected_utility(const nv_law* law, const nv_wealth* w, double gamma,
                                     double* out) {
    if (nv_status s = require(law && w && out, "nv_wealth_expected_utility: bad arguments")) return s;
    return guarded([&] {
        *out = expected_utility(law->law, w->wealth, gamma);
        return NV_OK;
    });
}

nv_status nv_solve_log2(const nv_law* law, double x01, double x02, double alpha1, double alpha2,
                        double beta1, double beta2, const double* a2_interval, nv_result** out) {
    if (nv_status s = require(law && out, "nv_solve_log2: bad arguments")) return s;
    return guarded([&] {
        GameSpec2 g(x01, x02, alpha1, alpha2, beta1, beta2, 1.0);
        std::optional<ZInterval> choice;
        if (a2_interval) choice = ZInterval(a2_interval[0], a2_interval[1]);
        EquilibriumResult2 res = solve_log2(g, law->law, choice);
        auto* r = new nv_result;
        switch (res.case_tag) {
            case Log2Case::NoEquilibrium: r->tag = NV_CASE_NO_EQUILIBRIUM; break;
            case Log2Case::DegenerateFamily: r->tag = NV_CASE_DEGENERATE_FAMILY; break;
            case Log2Case::Unique: r->tag = NV_CASE_UNIQUE; break;
            case Log2Case::FamilyFreeSet: r->tag = NV_CASE_FAMILY_FREE_SET; break;
        }
        if (res.wealth1) r->wealths.push_back(*res.wealth1);
        if (res.wealth2) r->wealths.push_back(*res.wealth2);
        r->lambdas = {res.lambda2 ? *res.lambda2 : 0.0, res.lambda2 ? *res.lambda2 : 0.0};
        r->sets = {std::nullopt, res.free_set};
        *out = r;
        if (res.case_tag == Log2Case::NoEquilibrium) {
            set_error(res.diagnostics.note);
            return NV_ERR_NO_EQUILIBRIUM;
        }
        return NV_OK;
    });
}

nv_status nv_solve_power2(const nv_law* law, double x01, double x02, double alpha1, double alpha2,
                          double beta1, double beta2, double gamma, nv_result** out) {
    if (nv_status s = require(law && out, "nv_solve_power2: bad arguments")) return s;
    return guarded([&] {
        GameSpec2 g(x01, x02, alpha1, alpha2, beta1, beta2, gamma);
        PowerSolveReport rep = solve_power2(g, law->law);
        auto* r = new nv_result;
        switch (rep.feasibility_case) {
            case PowerCase::Unconstrained: r->tag = NV_CASE_UNCONSTRAINED; break;
            case PowerCase::CaseA: r->tag = NV_CASE_POWER_A; break;
            case PowerCase::CaseB: r->tag = NV_CASE_POWER_B; break;
            case PowerCase::Infeasible: r->tag = NV_CASE_INFEASIBLE; break;
        }
        if (rep.wealth1) r->wealths.push_back(*rep.wealth1);
        if (rep.wealth2) r->wealths.push_back(*rep.wealth2);
        r->lambdas = {rep.lambda2, rep.lambda2};
        *out = r;
        if (rep.feasibility_case == PowerCase::Infeasible) {
            set_error(rep.violated);
            return NV_ERR_INFEASIBLE;
        }
        return NV_OK;
    });
}

nv_status nv_solve_disjoint(const nv_law* law, int n, const double* x0, const double* alpha,
                            const double* beta, nv_result** out) {
    if (nv_status s = require(law && out && x0 && alpha && beta && n >= 3,
                              "nv_solve_disjoint: bad arguments"))
        return s;
    return guarded([&] {
        GameSpecN g(std::vector<double>(x0, x0 + n), std::vector<double>(alpha, alpha + n),
                    beta_matrix_of(n, beta));
        DisjointEquilibrium eq = solve_disjoint(g, law->law);
        auto* r = new nv_result;
        r->tag = NV_CASE_DISJOINT;
        r->wealths = eq.wealths;
        r->lambdas = eq.lambdas;
        r->sets = eq.sets;
        r->iterations = eq.iterations;
        r->residual = eq.residual;
        *out = r;
        return NV_OK;
    });
}

nv_status nv_solve_partition(const nv_law* law, int n, int m, const double* x0, const double* alpha,
                             const double* beta, nv_result** out) {
    if (nv_status s = require(law && out && x0 && alpha && beta && n >= 3,
                              "nv_solve_partition: bad arguments"))
        return s;
    return guarded([&] {
        GameSpecN g(std::vector<double>(x0, x0 + n), std::vector<double>(alpha, alpha + n),
                    beta_matrix_of(n, beta));
        PartitionEquilibrium eq = solve_partition(g, law->law, m);
        auto* r = new nv_result;
        r->tag = NV_CASE_PARTITION;
        r->converged = eq.converged;
        r->iterations = eq.rounds;
        r->wealths = eq.wealths;
        for (int i = 0; i < g.n(); ++i) {
            double lo = 1e300;
            for (int k = 0; k < eq.m; ++k) lo = std::min(lo, eq.lambda[k][i]);
            r->lambdas.push_back(eq.converged ? lo : 0.0);
        }
        *out = r;
        if (!eq.converged) {
            set_error("partition dynamics did not converge");
            return NV_ERR_NO_CONVERGENCE;
        }
        return NV_OK;
    });
}

nv_status nv_solve_benchmark(double mu, double sigma, double horizon, double x0, double beta,
                             double alpha, nv_result** out) {
    if (nv_status s = require(out != nullptr, "nv_solve_benchmark: out is NULL")) return s;
    return guarded([&] {
        MarketParams m(mu, sigma, horizon);
        BenchmarkSolution sol = solve_benchmark(x0, beta, alpha, m);
        auto* r = new nv_result;
        r->tag = NV_CASE_BENCHMARK;
        r->wealths = {sol.wealth};
        r->lambdas = {sol.lambda};
        r->sets = {sol.band};
        r->converged = true;
        *out = r;
        return NV_OK;
    });
}

void nv_result_free(nv_result* r) { delete r; }

nv_status nv_result_case(const nv_result* r, int* out) {
    if (nv_status s = require(r && out, "nv_result_case: bad arguments")) return s;
    *out = r->tag;
    return NV_OK;
}

nv_status nv_result_agent_count(const nv_result* r, int* out) {
    if (nv_status s = require(r && out, "nv_result_agent_count: bad arguments")) return s;
    *out = static_cast<int>(r->wealths.size());
    return NV_OK;
}

nv_status nv_result_wealth(const nv_result* r, int agent, nv_wealth** out) {
    if (nv_status s = require(r && out, "nv_result_wealth: bad arguments")) return s;
    if (agent < 0 || agent >= static_cast<int>(r->wealths.size())) {
        set_error("nv_result_wealth: agent out of range");
        return NV_ERR_INVALID_ARGUMENT;
    }
    *out = new nv_wealth{r->wealths[agent]};
    return NV_OK;
}

nv_status nv_result_lambda(const nv_result* r, int agent, double* out) {
    if (nv_status s = require(r && out, "nv_result_lambda: bad arguments")) return s;
    if (agent < 0 || agent >= static_cast<int>(r->lambdas.size())) {
        set_error("nv_result_lambda: agent out of range");
        return NV_ERR_INVALID_ARGUMENT;
    }
    *out = r->lambdas[agent];
    return NV_OK;
}

nv_status nv_result_set(const nv_result* r, int agent, double* lo, double* hi) {
    if (nv_status s = require(r && lo && hi, "nv_result_set: bad arguments")) return s;
    if (agent < 0 || agent >= static_cast<int>(r->sets.size()) || !r->sets[agent]) {
        set_error("nv_result_set: agent has no constraint set");
        return NV_ERR_INVALID_ARGUMENT;
    }
    *lo = r->sets[agent]->lo;
    *hi = r->sets[agent]->hi;
    return NV_OK;
}

nv_status nv_result_iterations(const nv_result* r, int* out) {
    if (nv_status s = require(r && out, "nv_result_iterations: bad arguments")) return s;
    *out = r->iterations;
    return NV_OK;
}

nv_status nv_result_residual(const nv_result* r, double* out) {
    if (nv_status s = require(r && out, "nv_result_residual: bad arguments")) return s;
    *out = r->residual;
    return NV_OK;
}

nv_status nv_result_converged(const nv_result* r, int* out) {
    if (nv_status s = require(r && out, "nv_result_converged: bad arguments")) return s;
    *out = r->converged ? 1 : 0;
    return NV_OK;
}

nv_status nv_run_scenario(const char* config_path, const char* out_dir, long long seed,
                          const char* grid) {
    if (nv_status s = require(config_path && out_dir, "nv_run_scenario: bad arguments")) return s;
    return guarded([&]() -> nv_status {
        ScenarioConfig cfg;
        try {
            cfg = parse_config_file(config_path);
        } catch (const std::invalid_argument& e) {
            set_error(e.what());
            return NV_ERR_INVALID_CONFIG;
        }
        RunOverrides ov;
        if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
        if (grid) {
            GridSpec gs;
            if (std::sscanf(grid, "%lf:%lf:%d", &gs.min, &gs.max, &gs.points) != 3) {
                set_error("grid override must be min:max:points");
                return NV_ERR_INVALID_ARGUMENT;
            }
            ov.grid = gs;
        }
        Outcome outcome = run_scenario(cfg, out_dir, ov);
        return status_from_code(outcome.code, outcome.message);
    });
}

nv_status nv_verify_scenario(const char* config_path, const char* out_dir,
                             double perturb_lambda_rel, char* report, size_t cap) {
    if (nv_status s = require(config_path && out_dir, "nv_verify_scenario: bad arguments")) return s;
    return guarded([&]() -> nv_status {
        ScenarioConfig cfg;
        try {
            cfg = parse_config_file(config_path);
        } catch (const std::invalid_argument& e) {
            set_error(e.what());
            return NV_ERR_INVALID_CONFIG;
        }
        Outcome outcome = verify_scenario(cfg, out_dir, perturb_lambda_rel);
        if (report && cap > 0) {
            std::size_t n = std::min(cap - 1, outcome.message.size());
            std::memcpy(report, outcome.message.data(), n);
            report[n] = '\0';
        }
        return status_from_code(outcome.code, outcome.code == kStatusOk ? "" : "verification failed");
    });
}

int nv_example_count(void) { return static_cast<int>(example_configs().size()); }

const char* nv_example_name(int index) {
    const auto& ex = example_configs();
    if (index < 0 || index >= static_cast<int>(ex.size())) return nullptr;
    return ex[index].name;
}

const char* nv_example_description(int index) {
    const auto& ex = example_configs();
    if (index < 0 || index >= static_cast<int>(ex.size())) return nullptr;
    return ex[index].description;
}

const char* nv_example_text(int index) {
    const auto& ex = example_configs();
    if (index < 0 || index >= static_cast<int>(ex.size())) return nullptr;
    return ex[index].text;
}

} // extern "C"
