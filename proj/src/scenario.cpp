#include "nashvar/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "nashvar/errors.hpp"
#include "nashvar/multi_agent.hpp"
#include "nashvar/oracle.hpp"
#include "nashvar/replication.hpp"
#include "nashvar/two_agent_log.hpp"
#include "nashvar/two_agent_power.hpp"

namespace nashvar {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    if (v == kInfinity) return "inf";
    if (v == -kInfinity) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double_token(const std::string& tok) {
    if (tok == "inf") return kInfinity;
    if (tok == "-inf") return -kInfinity;
    return std::stod(tok);
}

std::uint64_t fnv1a_bytes(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

SolverKind solver_from_string(const std::string& s) {
    if (s == "log2") return SolverKind::Log2;
    if (s == "power2") return SolverKind::Power2;
    if (s == "multi_disjoint") return SolverKind::MultiDisjoint;
    if (s == "multi_partition") return SolverKind::MultiPartition;
    if (s == "benchmark") return SolverKind::Benchmark;
    if (s == "replicate") return SolverKind::Replicate;
    if (s == "simulate") return SolverKind::Simulate;
    throw std::invalid_argument(
        "solver must be one of log2|power2|multi_disjoint|multi_partition|benchmark|replicate|simulate, got '" +
        s + "'");
}

const char* solver_name(SolverKind k) {
    switch (k) {
        case SolverKind::Log2: return "log2";
        case SolverKind::Power2: return "power2";
        case SolverKind::MultiDisjoint: return "multi_disjoint";
        case SolverKind::MultiPartition: return "multi_partition";
        case SolverKind::Benchmark: return "benchmark";
        case SolverKind::Replicate: return "replicate";
        case SolverKind::Simulate: return "simulate";
    }
    return "?";
}

bool is_two_agent(SolverKind k) {
    return k == SolverKind::Log2 || k == SolverKind::Power2 || k == SolverKind::Replicate ||
           k == SolverKind::Simulate;
}

// Collects every problem instead of stopping at the first one.
struct FieldErrors {
    std::vector<std::string> items;
    void add(const std::string& msg) { items.push_back(msg); }
    void raise_if_any() const {
        if (items.empty()) return;
        std::ostringstream msg;
        msg << "invalid config (" << items.size() << " problem" << (items.size() > 1 ? "s" : "")
            << "):";
        for (const auto& it : items) msg << "\n  - " << it;
        throw std::invalid_argument(msg.str());
    }
};

} // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");

    ScenarioConfig cfg;
    cfg.raw_text = text;
    FieldErrors errors;

    if (doc.contains("name")) {
        if (doc["name"].is_string()) cfg.name = doc["name"].get<std::string>();
        else errors.add("name: must be a string");
    }

    if (!doc.contains("solver")) {
        errors.add("solver: missing (log2|power2|multi_disjoint|multi_partition|benchmark|replicate|simulate)");
    } else {
        try {
            cfg.solver = solver_from_string(doc["solver"].get<std::string>());
        } catch (const std::exception& e) {
            errors.add(std::string("solver: ") + e.what());
        }
    }

    if (!doc.contains("market")) {
        errors.add("market: missing (object with mu, sigma, horizon)");
    } else {
        const json& m = doc["market"];
        try {
            if (m.contains("mu") && m["mu"].is_array()) {
                cfg.mu = m.at("mu").get<std::vector<double>>();
            } else {
                cfg.mu = {m.at("mu").get<double>()};
            }
            if (m.contains("sigma") && m["sigma"].is_array()) {
                cfg.sigma.clear();
                for (const auto& row : m.at("sigma")) {
                    for (const auto& v : row) cfg.sigma.push_back(v.get<double>());
                }
            } else {
                cfg.sigma = {m.at("sigma").get<double>()};
            }
            cfg.horizon = m.at("horizon").get<double>();
            if (!(cfg.horizon > 0.0)) errors.add("market.horizon: must be positive");
        } catch (const json::exception&) {
            errors.add("market: needs numeric mu, sigma and horizon");
        }
    }

    const bool needs_game = true;
    if (needs_game && !doc.contains("game")) {
        errors.add("game: missing");
    } else if (doc.contains("game")) {
        const json& g = doc["game"];
        try {
            if (cfg.solver == SolverKind::Benchmark) {
                cfg.x0 = {g.at("x0").get<double>()};
                cfg.alpha = {g.at("alpha").get<double>()};
                cfg.beta1 = g.at("beta").get<double>();
            } else if (is_two_agent(cfg.solver)) {
                cfg.x0 = g.at("x0").get<std::vector<double>>();
                cfg.alpha = g.at("alpha").get<std::vector<double>>();
                std::vector<double> beta = g.at("beta").get<std::vector<double>>();
                if (cfg.x0.size() != 2 || cfg.alpha.size() != 2 || beta.size() != 2) {
                    errors.add("game: two-agent solvers need x0, alpha, beta of length 2");
                } else {
                    cfg.beta1 = beta[0];
                    cfg.beta2 = beta[1];
                }
                if (g.contains("gamma")) cfg.gamma = g.at("gamma").get<double>();
            } else {
                cfg.x0 = g.at("x0").get<std::vector<double>>();
                cfg.alpha = g.at("alpha").get<std::vector<double>>();
                const json& b = g.at("beta");
                std::size_t n = cfg.x0.size();
                cfg.beta_matrix.assign(n, std::vector<double>(n, 0.0));
                if (b.is_number()) {
                    double v = b.get<double>();
                    for (std::size_t i = 0; i < n; ++i) {
                        for (std::size_t j = 0; j < n; ++j) {
                            if (i != j) cfg.beta_matrix[i][j] = v;
                        }
                    }
                } else {
                    auto mat = b.get<std::vector<std::vector<double>>>();
                    if (mat.size() != n) {
                        errors.add("game.beta: matrix must be n x n");
                    } else {
                        cfg.beta_matrix = std::move(mat);
                    }
                }
            }
        } catch (const json::exception& e) {
            errors.add(std::string("game: ") + e.what());
        }
    }

    if (doc.contains("grid")) {
        const json& gr = doc["grid"];
        try {
            cfg.grid.min = gr.at("min").get<double>();
            cfg.grid.max = gr.at("max").get<double>();
            cfg.grid.points = gr.at("points").get<int>();
        } catch (const json::exception&) {
            errors.add("grid: needs numeric min, max and integer points");
        }
        if (!(cfg.grid.min > 0.0)) errors.add("grid.min: must be positive");
        if (!(cfg.grid.max > cfg.grid.min)) errors.add("grid.max: must exceed grid.min");
        if (cfg.grid.points < 2) errors.add("grid.points: must be at least 2");
    }

    if (doc.contains("output")) {
        if (doc["output"].is_string()) cfg.output_dir = doc["output"].get<std::string>();
        else errors.add("output: must be a directory path string");
    }
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("steps")) cfg.steps = doc["steps"].get<int>();
    if (doc.contains("n_paths")) cfg.n_paths = doc["n_paths"].get<int>();
    else if (cfg.solver == SolverKind::Simulate) cfg.n_paths = 5;
    if (doc.contains("amount_cap")) cfg.amount_cap = doc["amount_cap"].get<double>();
    if (doc.contains("m")) cfg.partition_m = doc["m"].get<int>();
    if (cfg.solver == SolverKind::MultiPartition && cfg.partition_m <= 0) {
        errors.add("m: multi_partition needs a positive cell count");
    }
    if ((cfg.solver == SolverKind::Replicate || cfg.solver == SolverKind::Simulate) && cfg.steps < 2) {
        errors.add("steps: must be at least 2");
    }

    if (doc.contains("a2_override")) {
        const json& a = doc["a2_override"];
        if (a.contains("c1")) {
            cfg.a2_c1 = a["c1"].get<double>();
        } else if (a.contains("interval")) {
            auto iv = a["interval"].get<std::vector<double>>();
            if (iv.size() != 2) errors.add("a2_override.interval: needs [lo, hi]");
            else cfg.a2_interval = ZInterval(iv[0], iv[1]);
        } else {
            errors.add("a2_override: needs c1 or interval");
        }
    }

    errors.raise_if_any();
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw std::invalid_argument(e.what());
    }
    return parse_config_text(text);
}

void write_wealth_csv(const std::string& path, const PiecewiseWealth& w) {
    std::ostringstream out;
    out << "z_lo,z_hi,coeff,exponent\n";
    for (const auto& c : w.cells()) {
        out << fmt17(c.z_lo) << ',' << fmt17(c.z_hi) << ',' << fmt17(c.coeff) << ','
            << fmt17(c.exponent) << '\n';
    }
    write_file(path, out.str());
}

PiecewiseWealth read_wealth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read wealth csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty wealth csv: " + path);
    std::vector<WealthCell> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        double vals[4];
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ls, tok, ',')) throw std::runtime_error("bad wealth csv row: " + line);
            vals[i] = parse_double_token(tok);
        }
        cells.push_back(WealthCell{vals[0], vals[1], vals[2], vals[3]});
    }
    return PiecewiseWealth(std::move(cells));
}

std::string file_digest(const std::string& path) {
    return hex64(fnv1a_bytes(read_file(path)));
}

namespace {

MarketParams market_of(const ScenarioConfig& cfg) {
    return MarketParams(cfg.mu, cfg.sigma, cfg.horizon);
}

GameSpec2 game2_of(const ScenarioConfig& cfg) {
    return GameSpec2(cfg.x0[0], cfg.x0[1], cfg.alpha[0], cfg.alpha[1], cfg.beta1, cfg.beta2,
                     cfg.gamma);
}

std::optional<ZInterval> free_set_choice(const ScenarioConfig& cfg, const LognormalLaw& law,
                                         double alpha2) {
    if (cfg.a2_interval) return cfg.a2_interval;
    if (cfg.a2_c1) {
        double c1 = *cfg.a2_c1;
        if (c1 <= 0.0) return ZInterval(0.0, quantile(law, alpha2));
        return ZInterval(c1, interval_upper_bound(law, c1, alpha2));
    }
    return std::nullopt;
}

json interval_json(const std::optional<ZInterval>& s) {
    if (!s) return nullptr;
    return json{{"lo", s->lo}, {"hi", s->unbounded() ? json("inf") : json(s->hi)}};
}

struct Emission {
    json summary;
    std::vector<PiecewiseWealth> wealths;
    std::vector<PiecewiseWealth> comparison; // unconstrained / benchmark curves
    std::vector<std::string> comparison_names;
    std::vector<StrategyPath> paths;
    int num_assets = 1;
    int code = kStatusOk;
    std::string message;
};

Emission solve_log2_scenario(const ScenarioConfig& cfg, const LognormalLaw& law) {
    Emission e;
    GameSpec2 g = game2_of(cfg);
    EquilibriumResult2 res = solve_log2(g, law, free_set_choice(cfg, law, g.alpha2));
    const char* tag = nullptr;
    switch (res.case_tag) {
        case Log2Case::NoEquilibrium: tag = "no_equilibrium"; break;
        case Log2Case::DegenerateFamily: tag = "degenerate_family"; break;
        case Log2Case::Unique: tag = "unique"; break;
        case Log2Case::FamilyFreeSet: tag = "family_free_set"; break;
    }
    e.summary["case"] = tag;
    e.summary["relabeled"] = res.diagnostics.relabeled;
    if (res.lambda2) e.summary["lambda2"] = *res.lambda2;
    e.summary["free_set"] = interval_json(res.free_set);
    e.summary["diagnostics"] = {
        {"budget_residual", {res.diagnostics.budget_residual1, res.diagnostics.budget_residual2}},
        {"probability_residual", res.diagnostics.probability_residual},
        {"boundary_lambda_zero", res.diagnostics.boundary_lambda_zero},
        {"beta_product_one_branch", res.diagnostics.beta_product_one_branch},
        {"note", res.diagnostics.note},
    };
    if (res.case_tag == Log2Case::NoEquilibrium) {
        e.code = kStatusNoEquilibrium;
        e.message = "no Nash equilibrium: " + res.diagnostics.note;
        return e;
    }
    e.wealths = {*res.wealth1, *res.wealth2};
    e.comparison = {PiecewiseWealth::single(g.x01, -1.0), PiecewiseWealth::single(g.x02, -1.0)};
    e.comparison_names = {"X1_unconstrained", "X2_unconstrained"};
    e.message = std::string("case ") + tag;
    return e;
}

Emission solve_power2_scenario(const ScenarioConfig& cfg, const LognormalLaw& law) {
    Emission e;
    GameSpec2 g = game2_of(cfg);
    PowerSolveReport r = solve_power2(g, law);
    const char* tag = nullptr;
    switch (r.feasibility_case) {
        case PowerCase::Unconstrained: tag = "unconstrained"; break;
        case PowerCase::CaseA: tag = "case_a"; break;
        case PowerCase::CaseB: tag = "case_b"; break;
        case PowerCase::Infeasible: tag = "infeasible"; break;
    }
    e.summary["case"] = tag;
    e.summary["epsilon_gamma"] = r.epsilon_gamma;
    e.summary["kappa"] = r.kappa;
    if (r.feasibility_case == PowerCase::Infeasible) {
        e.summary["violated"] = r.violated;
        e.code = kStatusInfeasible;
        e.message = "outside the covered parameter region: " + r.violated;
        return e;
    }
    e.summary["lambda2"] = r.lambda2;
    e.summary["eta2"] = r.eta2;
    e.summary["split_quantile"] = r.split_quantile;
    e.wealths = {*r.wealth1, *r.wealth2};
    double q = -1.0 / g.gamma;
    e.comparison = {PiecewiseWealth::single(g.x01 / r.epsilon_gamma, q, g.gamma),
                    PiecewiseWealth::single(g.x02 / r.epsilon_gamma, q, g.gamma)};
    e.comparison_names = {"X1_unconstrained", "X2_unconstrained"};
    e.message = std::string("case ") + tag;
    return e;
}

Emission solve_disjoint_scenario(const ScenarioConfig& cfg, const LognormalLaw& law) {
    Emission e;
    GameSpecN g(cfg.x0, cfg.alpha, cfg.beta_matrix);
    DisjointEquilibrium eq = solve_disjoint(g, law);
    e.summary["lambda"] = eq.lambdas;
    e.summary["lambda_beta"] = eq.lambda_beta;
    e.summary["iterations"] = eq.iterations;
    e.summary["residual"] = eq.residual;
    e.summary["order"] = g.order;
    json sets = json::array();
    for (const auto& s : eq.sets) sets.push_back(interval_json(s));
    e.summary["sets"] = sets;
    e.wealths = eq.wealths;
    for (int i = 0; i < g.n(); ++i) {
        e.comparison.push_back(PiecewiseWealth::single(g.x0[i], -1.0));
        e.comparison_names.push_back("X" + std::to_string(i + 1) + "_unconstrained");
    }
    e.message = "disjoint fixed point in " + std::to_string(eq.iterations) + " rounds";
    return e;
}

Emission solve_partition_scenario(const ScenarioConfig& cfg, const LognormalLaw& law) {
    Emission e;
    GameSpecN g(cfg.x0, cfg.alpha, cfg.beta_matrix);
    PartitionEquilibrium eq = solve_partition(g, law, cfg.partition_m);
    e.summary["m"] = eq.m;
    e.summary["ell"] = eq.ell;
    e.summary["rounds"] = eq.rounds;
    e.summary["converged"] = eq.converged;
    e.summary["order"] = g.order;
    json lam = json::array();
    json ind = json::array();
    for (int k = 0; k < eq.m; ++k) {
        lam.push_back(eq.lambda[k]);
        json row = json::array();
        for (int i = 0; i < g.n(); ++i) row.push_back(static_cast<int>(eq.indicator[k][i]));
        ind.push_back(row);
    }
    e.summary["lambda"] = lam;
    e.summary["indicator"] = ind;
    if (!eq.converged) {
        e.code = kStatusNonConvergence;
        e.message = "best-response dynamics did not converge (state revisited or round limit)";
        return e;
    }
    e.wealths = eq.wealths;
    for (int i = 0; i < g.n(); ++i) {
        e.comparison.push_back(PiecewiseWealth::single(g.x0[i], -1.0));
        e.comparison_names.push_back("X" + std::to_string(i + 1) + "_unconstrained");
    }
    e.message = "partition fixed point in " + std::to_string(eq.rounds) + " rounds";
    return e;
}

Emission solve_benchmark_scenario(const ScenarioConfig& cfg, const MarketParams& market) {
    Emission e;
    BenchmarkSolution sol = solve_benchmark(cfg.x0[0], cfg.beta1, cfg.alpha[0], market);
    e.summary["constrained"] = sol.constrained;
    e.summary["lambda"] = sol.lambda;
    e.summary["lambda_alpha"] = sol.lambda_alpha == kInfinity ? json("inf") : json(sol.lambda_alpha);
    e.summary["band"] = interval_json(sol.band);
    e.wealths = {sol.wealth};
    double mu = market.drift[0], sg = market.volatility[0];
    double cb = cfg.beta1 * std::exp(0.5 * (mu - sg * sg) * market.horizon);
    if (cb > 0.0) {
        e.comparison = {PiecewiseWealth::single(cb, -sg * sg / mu)};
        e.comparison_names = {"benchmark"};
    }
    e.message = sol.constrained ? "constrained benchmark solution" : "unconstrained (rich agent)";
    return e;
}

Emission solve_paths_scenario(const ScenarioConfig& cfg, const LognormalLaw& law,
                              const MarketParams& market, const RunOverrides& overrides) {
    Emission e;
    GameSpec2 g = game2_of(cfg);
    auto choice = free_set_choice(cfg, law, g.alpha2);
    ZInterval band_iv = choice ? *choice : ZInterval(0.0, quantile(law, g.alpha2));
    EquilibriumResult2 res = solve_log2(g, law, band_iv);
    if (res.case_tag != Log2Case::FamilyFreeSet) {
        throw InfeasibleError(
            "replication scenarios need the family case (x0_2 < beta1 x0_1, alpha2 < 1)");
    }
    DigitalBand band(band_iv.lo, band_iv.hi);
    ReplicationClaim claim = claim_from_equilibrium(g, band, law);

    SimulationOptions opt;
    opt.steps = cfg.steps;
    opt.n_paths = cfg.n_paths;
    opt.seed = overrides.seed ? *overrides.seed : cfg.seed;
    opt.amount_cap = cfg.amount_cap;
    e.paths = simulate_paths(market, claim, opt);
    e.num_assets = market.num_assets;

    e.summary["case"] = "family_free_set";
    e.summary["lambda2"] = *res.lambda2;
    e.summary["band"] = interval_json(band_iv);
    e.summary["steps"] = opt.steps;
    e.summary["n_paths"] = opt.n_paths;
    e.summary["seed"] = opt.seed;
    e.summary["rng"] = "philox4x32-10/inverse-cdf";
    e.summary["amount_cap"] = opt.amount_cap;
    json targets = json::array();
    for (const auto& p : e.paths) {
        targets.push_back({{"path", p.path_index},
                           {"terminal_payoff_target", p.terminal_payoff_target},
                           {"z_T", p.points.back().z}});
    }
    e.summary["targets"] = targets;
    e.wealths = {*res.wealth1, *res.wealth2};
    e.message = "simulated " + std::to_string(opt.n_paths) + " path(s) with " +
                std::to_string(opt.steps) + " steps";
    return e;
}

std::string payoff_curves_csv(const GridSpec& grid, const std::vector<PiecewiseWealth>& wealths,
                              const std::vector<PiecewiseWealth>& comparison,
                              const std::vector<std::string>& comparison_names) {
    std::ostringstream out;
    out << "z";
    for (std::size_t i = 0; i < wealths.size(); ++i) out << ",X" << (i + 1);
    for (const auto& name : comparison_names) out << ',' << name;
    out << '\n';
    for (int j = 0; j < grid.points; ++j) {
        double z = grid.min + (grid.max - grid.min) * j / (grid.points - 1);
        out << fmt17(z);
        for (const auto& w : wealths) out << ',' << fmt17(w(z));
        for (const auto& w : comparison) out << ',' << fmt17(w(z));
        out << '\n';
    }
    return out.str();
}

std::string paths_csv(const std::vector<StrategyPath>& paths, int num_assets) {
    std::ostringstream out;
    out << "path,time,z,closed_form_wealth,self_financed_wealth";
    for (int i = 1; i <= num_assets; ++i) out << ",amount_asset_" << i;
    out << ",capped\n";
    for (const auto& p : paths) {
        for (const auto& pt : p.points) {
            out << p.path_index << ',' << fmt17(pt.t) << ',' << fmt17(pt.z) << ','
                << fmt17(pt.wealth_closed) << ',' << fmt17(pt.wealth_self);
            for (int i = 0; i < num_assets; ++i) {
                out << ',' << fmt17(i < static_cast<int>(pt.amounts.size()) ? pt.amounts[i] : 0.0);
            }
            out << ',' << (pt.capped ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

} // namespace

Outcome run_scenario(const ScenarioConfig& config, const std::string& out_dir_arg,
                     const RunOverrides& overrides) {
    auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg = config;
    if (overrides.grid) cfg.grid = *overrides.grid;
    const std::string out_dir = out_dir_arg.empty() ? cfg.output_dir : out_dir_arg;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) return Outcome{kStatusIo, "cannot create output directory " + out_dir};

    Emission e;
    try {
        MarketParams market = market_of(cfg);
        if (cfg.solver == SolverKind::Benchmark) {
            e = solve_benchmark_scenario(cfg, market);
        } else {
            LognormalLaw law = law_from_market(market);
            switch (cfg.solver) {
                case SolverKind::Log2: e = solve_log2_scenario(cfg, law); break;
                case SolverKind::Power2: e = solve_power2_scenario(cfg, law); break;
                case SolverKind::MultiDisjoint: e = solve_disjoint_scenario(cfg, law); break;
                case SolverKind::MultiPartition: e = solve_partition_scenario(cfg, law); break;
                case SolverKind::Replicate:
                case SolverKind::Simulate:
                    e = solve_paths_scenario(cfg, law, market, overrides);
                    break;
                default: break;
            }
        }
    } catch (const NoEquilibriumError& err) {
        e.code = kStatusNoEquilibrium;
        e.message = err.what();
        e.summary["error"] = err.what();
    } catch (const InfeasibleError& err) {
        e.code = kStatusInfeasible;
        e.message = err.what();
        e.summary["error"] = err.what();
    } catch (const NonConvergenceError& err) {
        e.code = kStatusNonConvergence;
        e.message = err.what();
        e.summary["error"] = err.what();
    } catch (const std::invalid_argument& err) {
        return Outcome{kStatusInvalidConfig, err.what()};
    } catch (const std::exception& err) {
        return Outcome{kStatusInternal, err.what()};
    }

    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(out_dir + "/" + name, content);
        files.push_back(name);
    };

    e.summary["name"] = cfg.name;
    e.summary["solver"] = solver_name(cfg.solver);
    e.summary["status"] = e.code;
    json wealth_files = json::array();
    for (std::size_t i = 0; i < e.wealths.size(); ++i) {
        std::string fname = "wealth_agent" + std::to_string(i + 1) + ".csv";
        write_wealth_csv(out_dir + "/" + fname, e.wealths[i]);
        files.push_back(fname);
        wealth_files.push_back(fname);
    }
    e.summary["wealth_files"] = wealth_files;
    emit("summary.json", e.summary.dump(2) + "\n");
    if (!e.wealths.empty()) {
        emit("payoff_curves.csv",
             payoff_curves_csv(cfg.grid, e.wealths, e.comparison, e.comparison_names));
    }
    if (!e.paths.empty()) emit("paths.csv", paths_csv(e.paths, e.num_assets));

    auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    json manifest;
    manifest["tool"] = "nashvar";
    manifest["version"] = "0.1.0";
    manifest["config_name"] = cfg.name;
    manifest["config_digest"] = hex64(fnv1a_bytes(cfg.raw_text));
    manifest["digest_algorithm"] = "fnv1a64";
    manifest["solver"] = solver_name(cfg.solver);
    manifest["seed"] = overrides.seed ? *overrides.seed : cfg.seed;
    manifest["status"] = e.code;
    manifest["message"] = e.message;
    manifest["wall_ms"] = wall_ms;
    manifest["verification"] = "not-run";
    if (e.summary.contains("diagnostics")) manifest["residuals"] = e.summary["diagnostics"];
    if (e.summary.contains("residual")) manifest["residuals"] = {{"fixed_point", e.summary["residual"]}};
    json flist = json::array();
    for (const auto& f : files) {
        flist.push_back({{"name", f}, {"digest", file_digest(out_dir + "/" + f)}});
    }
    manifest["files"] = flist;
    write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");

    return Outcome{e.code, e.message};
}

namespace {

struct Verifier {
    std::ostringstream report;
    bool all_pass = true;

    void check(const std::string& name, bool pass, double residual) {
        report << (pass ? "[PASS] " : "[FAIL] ") << name << " residual=" << fmt17(residual) << '\n';
        all_pass = all_pass && pass;
    }
    void note(const std::string& line) { report << line << '\n'; }
};

// Deviation gap of one two-agent player on an aligned grid.
double two_agent_deviation(const LognormalLaw& law, const PiecewiseWealth& own,
                           const PiecewiseWealth& other, double beta_other, double alpha,
                           double budget, double gamma, bool ce_units) {
    std::vector<double> boundaries;
    for (const auto& c : own.cells()) {
        if (c.z_hi != kInfinity) boundaries.push_back(c.z_hi);
    }
    for (const auto& c : other.cells()) {
        if (c.z_hi != kInfinity) boundaries.push_back(c.z_hi);
    }
    auto cells = build_cells(law, refine_boundaries(law, boundaries, 500), gamma);
    for (auto& c : cells) c.floor_value = beta_other * other(c.zbar);
    GridProblem p(std::move(cells), alpha, budget, gamma);
    DeviationReport rep = deviation_search(p, discretize(own, p.cells));
    return ce_units ? rep.improvement_ce : rep.improvement;
}

void verify_digests(Verifier& v, const std::string& out_dir) {
    std::string manifest_path = out_dir + "/manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
        v.note("[....] no manifest.json in " + out_dir + "; digest check skipped");
        return;
    }
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const std::exception& e) {
        v.check("manifest_parse", false, 0.0);
        return;
    }
    for (const auto& f : manifest["files"]) {
        std::string name = f["name"].get<std::string>();
        std::string want = f["digest"].get<std::string>();
        std::string path = out_dir + "/" + name;
        bool ok = std::filesystem::exists(path) && file_digest(path) == want;
        v.check("digest " + name, ok, 0.0);
    }
}

} // namespace

Outcome verify_scenario(const ScenarioConfig& config, const std::string& out_dir_arg,
                        double perturb_lambda_rel) {
    const std::string out_dir = out_dir_arg.empty() ? config.output_dir : out_dir_arg;
    Verifier v;
    verify_digests(v, out_dir);
    const double scale = 1.0 + perturb_lambda_rel;

    try {
        MarketParams market = market_of(config);
        if (config.solver == SolverKind::Benchmark) {
            LognormalLaw law = law_from_market(market);
            BenchmarkSolution sol = solve_benchmark(config.x0[0], config.beta1, config.alpha[0], market);
            PiecewiseWealth wealth = sol.wealth;
            if (perturb_lambda_rel != 0.0 && sol.constrained) {
                std::vector<WealthCell> cells = wealth.cells();
                for (auto& c : cells) {
                    if (c.exponent == -1.0) c.coeff *= scale;
                }
                wealth = PiecewiseWealth(std::move(cells));
            }
            double budget_res = price(law, wealth) - config.x0[0];
            v.check("budget", std::abs(budget_res) <= 1e-10, budget_res);
            if (sol.constrained) {
                double mu = market.drift[0], sg = market.volatility[0];
                double cb = config.beta1 * std::exp(0.5 * (mu - sg * sg) * market.horizon);
                auto bench = [&](double z) { return cb * std::pow(z, -sg * sg / mu); };
                std::vector<double> boundaries{sol.band->lo, sol.band->hi};
                if (boundaries[0] <= 0.0) boundaries.erase(boundaries.begin());
                if (!boundaries.empty() && boundaries.back() == kInfinity) boundaries.pop_back();
                auto cells = build_cells(law, refine_boundaries(law, boundaries, 2000));
                for (auto& c : cells) c.floor_value = bench(c.zbar);
                GridProblem p(std::move(cells), config.alpha[0], config.x0[0], 1.0);
                DeviationReport rep = deviation_search(p, discretize(wealth, p.cells));
                v.check("oracle_no_deviation", rep.improvement <= 1e-6, rep.improvement);
            }
        } else {
            LognormalLaw law = law_from_market(market);
            switch (config.solver) {
                case SolverKind::Log2:
                case SolverKind::Replicate:
                case SolverKind::Simulate: {
                    GameSpec2 g = game2_of(config);
                    EquilibriumResult2 res = solve_log2(g, law, free_set_choice(config, law, g.alpha2));
                    if (res.case_tag == Log2Case::NoEquilibrium) {
                        v.check("solvable", false, 0.0);
                        break;
                    }
                    PiecewiseWealth w2 = *res.wealth2;
                    if (perturb_lambda_rel != 0.0 && res.lambda2) {
                        std::vector<WealthCell> cells = w2.cells();
                        for (auto& c : cells) {
                            if (std::abs(c.coeff - *res.lambda2) <= 1e-12 * *res.lambda2) c.coeff *= scale;
                        }
                        w2 = PiecewiseWealth(std::move(cells));
                    }
                    double b1 = price(law, *res.wealth1) - g.x01;
                    double b2 = price(law, w2) - g.x02;
                    v.check("budget_agent1", std::abs(b1) <= 1e-10, b1);
                    v.check("budget_agent2", std::abs(b2) <= 1e-10, b2);
                    v.check("probability", std::abs(res.diagnostics.probability_residual) <= 1e-10,
                            res.diagnostics.probability_residual);
                    if (std::abs(b2) <= 1e-8) {
                        double d2 = two_agent_deviation(law, w2, *res.wealth1, g.beta1, g.alpha2,
                                                        g.x02, 1.0, false);
                        v.check("no_deviation_agent2", d2 <= 1e-6, d2);
                    } else {
                        v.check("no_deviation_agent2 (skipped: infeasible candidate)", false, b2);
                    }
                    double d1 = two_agent_deviation(law, *res.wealth1, w2, g.beta2, g.alpha1, g.x01,
                                                    1.0, false);
                    v.check("no_deviation_agent1", d1 <= 1e-6, d1);

                    if (config.solver != SolverKind::Log2 && res.free_set) {
                        // Replication consistency: band additivity and the t=0 price.
                        DigitalBand band(res.free_set->lo, res.free_set->hi);
                        double worst = 0.0;
                        for (double t : {0.0, 0.25 * market.horizon, 0.75 * market.horizon}) {
                            for (double z : {0.5, 0.9, 1.4}) {
                                PathState s{t, z, std::vector<double>(market.num_assets, 0.0)};
                                PortfolioPoint merton = digital_pair(DigitalBand(0.0, kInfinity), s, market);
                                PortfolioPoint low = band.c1 > 0.0
                                                         ? digital_pair(DigitalBand(0.0, band.c1), s, market)
                                                         : PortfolioPoint{0.0, std::vector<double>(market.num_assets, 0.0)};
                                PortfolioPoint mid = digital_pair(band, s, market);
                                PortfolioPoint high = band.c2 != kInfinity
                                                          ? digital_pair(DigitalBand(band.c2, kInfinity), s, market)
                                                          : PortfolioPoint{0.0, std::vector<double>(market.num_assets, 0.0)};
                                worst = std::max(worst, std::abs(low.wealth + mid.wealth + high.wealth - merton.wealth));
                            }
                        }
                        v.check("band_additivity", worst <= 1e-12, worst);
                        PathState s0{0.0, 1.0, std::vector<double>(market.num_assets, 0.0)};
                        double p0 = equilibrium_pair(g, band, s0, market).wealth - g.x02;
                        v.check("initial_price", std::abs(p0) <= 1e-9, p0);
                    }
                    break;
                }
                case SolverKind::Power2: {
                    GameSpec2 g = game2_of(config);
                    PowerSolveReport r = solve_power2(g, law);
                    if (r.feasibility_case == PowerCase::Infeasible) {
                        v.check("solvable", false, 0.0);
                        break;
                    }
                    if (r.feasibility_case != PowerCase::Unconstrained) {
                        r.lambda2 *= scale;
                        LagrangianReport rep = verify_lagrangian(r, law, g);
                        for (const auto& c : rep.checks) v.check("lagrangian_" + c.name, c.pass, c.residual);
                    }
                    double b2 = price(law, *r.wealth2) - g.x02;
                    v.check("budget_agent2", std::abs(b2) <= 1e-9, b2);
                    double d2 = two_agent_deviation(law, *r.wealth2, *r.wealth1, g.beta1, g.alpha2,
                                                    g.x02, g.gamma, true);
                    v.check("no_deviation_agent2_ce", d2 <= 1e-6, d2);
                    break;
                }
                case SolverKind::MultiDisjoint: {
                    GameSpecN g(config.x0, config.alpha, config.beta_matrix);
                    DisjointEquilibrium eq = solve_disjoint(g, law);
                    if (perturb_lambda_rel != 0.0) {
                        for (auto& l : eq.lambdas) l *= scale;
                    }
                    double worst = 0.0;
                    for (int i = 0; i < g.n(); ++i) {
                        double lb = 0.0;
                        for (int j = 0; j < g.n(); ++j) {
                            if (j != i) lb += g.beta[i][j] * eq.lambdas[j];
                        }
                        double rhs = (g.x0[i] >= lb) ? g.x0[i]
                                                     : (g.x0[i] - g.alpha[i] * lb) / (1.0 - g.alpha[i]);
                        worst = std::max(worst, std::abs(eq.lambdas[i] - rhs));
                    }
                    v.check("fixed_point_residual", worst <= 1e-12, worst);
                    for (int i = 0; i < g.n(); ++i) {
                        double b = price(law, eq.wealths[i]) - g.x0[i];
                        v.check("budget_agent" + std::to_string(i + 1), std::abs(b) <= 1e-10, b);
                    }
                    NashVerification nash = verify_nash_n(eq, g, law, 500);
                    for (const auto& a : nash.agents) {
                        v.check("no_deviation_agent" + std::to_string(a.agent + 1), a.pass, a.improvement);
                    }
                    break;
                }
                case SolverKind::MultiPartition: {
                    GameSpecN g(config.x0, config.alpha, config.beta_matrix);
                    PartitionEquilibrium eq = solve_partition(g, law, config.partition_m);
                    v.check("converged", eq.converged, static_cast<double>(eq.rounds));
                    if (!eq.converged) break;
                    for (int i = 0; i < g.n(); ++i) {
                        double total = 0.0;
                        for (int k = 0; k < eq.m; ++k) total += eq.lambda[k][i];
                        double b = total / eq.m - g.x0[i];
                        v.check("budget_agent" + std::to_string(i + 1), std::abs(b) <= 1e-10, b);
                    }
                    NashVerification nash = verify_nash_n(eq, g, law, 500);
                    for (const auto& a : nash.agents) {
                        v.check("no_deviation_agent" + std::to_string(a.agent + 1), a.pass, a.improvement);
                    }
                    break;
                }
                default: break;
            }
        }
    } catch (const std::invalid_argument& err) {
        return Outcome{kStatusInvalidConfig, err.what()};
    } catch (const InfeasibleError& err) {
        v.report << "[FAIL] verification aborted: " << err.what() << '\n';
        v.all_pass = false;
    } catch (const std::exception& err) {
        return Outcome{kStatusInternal, err.what()};
    }

    // Record the verdicts into the manifest when a run left one behind.
    std::string manifest_path = out_dir + "/manifest.json";
    if (perturb_lambda_rel == 0.0 && std::filesystem::exists(manifest_path)) {
        try {
            json manifest = json::parse(read_file(manifest_path));
            manifest["verification"] = {{"passed", v.all_pass}, {"report", v.report.str()}};
            write_file(manifest_path, manifest.dump(2) + "\n");
        } catch (const std::exception&) {
            // leave the manifest untouched if it cannot be parsed
        }
    }

    return Outcome{v.all_pass ? kStatusOk : kStatusVerificationFailed, v.report.str()};
}

} // namespace nashvar
