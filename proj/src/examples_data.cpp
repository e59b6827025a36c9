#include "nashvar/scenario.hpp"

namespace nashvar {

namespace {

constexpr const char* kMarketBlock =
    R"("market": {"mu": 0.03, "sigma": 0.2, "horizon": 4.0})";

std::string log2_config(const char* name, double alpha2, double beta1) {
    std::string s = "{\n  \"name\": \"";
    s += name;
    s += "\",\n  \"solver\": \"log2\",\n  ";
    s += kMarketBlock;
    s += ",\n  \"game\": {\"x0\": [3.0, 2.0], \"alpha\": [0.5, ";
    s += std::to_string(alpha2);
    s += "], \"beta\": [";
    s += std::to_string(beta1);
    s += ", 0.5], \"gamma\": 1.0},\n  \"grid\": {\"min\": 0.05, \"max\": 3.0, \"points\": 600}\n}\n";
    return s;
}

std::string band_config(const char* name, double c1) {
    std::string s = log2_config(name, 0.2, 0.9);
    s.erase(s.rfind("\n}\n"));
    s += ",\n  \"a2_override\": {\"c1\": " + std::to_string(c1) + "}\n}\n";
    return s;
}

std::string path_config(const char* name, const char* solver, double c1, int n_paths) {
    std::string s = "{\n  \"name\": \"";
    s += name;
    s += "\",\n  \"solver\": \"";
    s += solver;
    s += "\",\n  ";
    s += kMarketBlock;
    s += ",\n  \"game\": {\"x0\": [3.0, 2.0], \"alpha\": [0.5, 0.2], \"beta\": [0.9, 0.5], \"gamma\": 1.0},"
         "\n  \"a2_override\": {\"c1\": " + std::to_string(c1) + "},"
         "\n  \"steps\": 800,\n  \"n_paths\": " + std::to_string(n_paths) +
         ",\n  \"seed\": 20240801\n}\n";
    return s;
}

std::string power_config(const char* name, double alpha2, double beta1) {
    std::string s = "{\n  \"name\": \"";
    s += name;
    s += "\",\n  \"solver\": \"power2\",\n  ";
    s += kMarketBlock;
    s += ",\n  \"game\": {\"x0\": [3.0, 2.0], \"alpha\": [0.5, ";
    s += std::to_string(alpha2);
    s += "], \"beta\": [";
    s += std::to_string(beta1);
    s += ", 0.5], \"gamma\": 0.7},\n  \"grid\": {\"min\": 0.05, \"max\": 3.0, \"points\": 600}\n}\n";
    return s;
}

std::vector<ExampleConfig> build_examples() {
    static std::vector<std::string> storage; // keeps the text alive; reserved so c_str() stays stable
    storage.reserve(32);
    std::vector<ExampleConfig> out;
    auto add = [&](const char* name, const char* desc, std::string text) {
        storage.push_back(std::move(text));
        out.push_back(ExampleConfig{name, desc, storage.back().c_str()});
    };

    add("fig01", "two-agent log equilibrium, alpha2=0.2, beta1=0.9", log2_config("fig01", 0.2, 0.9));
    add("fig02a", "log equilibrium, alpha2 sweep: 0.1", log2_config("fig02a", 0.1, 0.9));
    add("fig02b", "log equilibrium, alpha2 sweep: 0.3", log2_config("fig02b", 0.3, 0.9));
    add("fig02c", "log equilibrium, alpha2 sweep: 0.5", log2_config("fig02c", 0.5, 0.9));
    add("fig02d", "log equilibrium, alpha2 sweep: 0.7", log2_config("fig02d", 0.7, 0.9));
    add("fig03a", "log equilibrium, beta1 sweep: 0.7", log2_config("fig03a", 0.2, 0.7));
    add("fig03b", "log equilibrium, beta1 sweep: 0.8", log2_config("fig03b", 0.2, 0.8));
    add("fig03c", "log equilibrium, beta1 sweep: 0.9", log2_config("fig03c", 0.2, 0.9));
    add("fig03d", "log equilibrium, beta1 sweep: 0.999", log2_config("fig03d", 0.2, 0.999));
    add("fig04a", "log equilibrium with free set starting at c1=0.1", band_config("fig04a", 0.1));
    add("fig04b", "log equilibrium with free set starting at c1=0.5", band_config("fig04b", 0.5));
    add("fig04c", "log equilibrium with free set starting at c1=0.8", band_config("fig04c", 0.8));
    add("fig04d", "log equilibrium with free set starting at c1=1.2", band_config("fig04d", 1.2));
    add("fig05a", "replicating strategy along one path, band c1=0", path_config("fig05a", "replicate", 0.0, 1));
    add("fig05b", "replicating strategy along one path, band c1=0.75", path_config("fig05b", "replicate", 0.75, 1));
    add("fig05c", "replicating strategy along one path, band c1=1.2", path_config("fig05c", "replicate", 1.2, 1));
    add("fig07", "five replicating-strategy realizations, band c1=0", path_config("fig07", "simulate", 0.0, 5));
    add("fig09", "two-agent power equilibrium, gamma=0.7, alpha2=0.5, beta1=0.9", power_config("fig09", 0.5, 0.9));
    add("fig10a", "power equilibrium, alpha2=0.5", power_config("fig10a", 0.5, 0.9));
    add("fig10b", "power equilibrium, alpha2=0.9 (reports infeasible: band price exceeds budget)",
        power_config("fig10b", 0.9, 0.9));
    add("fig10c", "power equilibrium, alpha2=0.2, beta1=0.7", power_config("fig10c", 0.2, 0.7));
    add("fig10d", "power equilibrium, alpha2=0.2, beta1=0.9", power_config("fig10d", 0.2, 0.9));
    add("fig11",
        "four-agent log equilibrium with disjoint constraint sets (also provides the "
        "constrained-vs-unconstrained comparison curves)",
        "{\n  \"name\": \"fig11\",\n  \"solver\": \"multi_disjoint\",\n  " + std::string(kMarketBlock) +
            ",\n  \"game\": {\"x0\": [5.0, 4.0, 3.0, 2.0], \"alpha\": [0.2, 0.2, 0.2, 0.2], \"beta\": 0.3},"
            "\n  \"grid\": {\"min\": 0.05, \"max\": 3.0, \"points\": 600}\n}\n");
    add("partition",
        "three-agent game with overlapping constraint probabilities (sum > 1), solved on a 5-cell partition",
        "{\n  \"name\": \"partition\",\n  \"solver\": \"multi_partition\",\n  " + std::string(kMarketBlock) +
            ",\n  \"game\": {\"x0\": [3.0, 2.0, 1.0], \"alpha\": [0.4, 0.4, 0.4], \"beta\": 0.4},"
            "\n  \"m\": 5,\n  \"grid\": {\"min\": 0.05, \"max\": 3.0, \"points\": 600}\n}\n");
    add("benchmark",
        "single agent maximizing log utility while beating half the stock price with probability 0.3",
        "{\n  \"name\": \"benchmark\",\n  \"solver\": \"benchmark\",\n  " + std::string(kMarketBlock) +
            ",\n  \"game\": {\"x0\": 0.45, \"alpha\": 0.3, \"beta\": 0.5},"
            "\n  \"grid\": {\"min\": 0.05, \"max\": 3.0, \"points\": 600}\n}\n");
    return out;
}

} // namespace

const std::vector<ExampleConfig>& example_configs() {
    static const std::vector<ExampleConfig> examples = build_examples();
    return examples;
}

} // namespace nashvar
