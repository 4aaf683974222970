// Experiment driver: single reconstructions or the exp1..exp4 sweeps.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "geoxray/experiment.hpp"
#include "geoxray/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Geodesic X-ray inversion of k-differentials on the unit disc"};

    std::string config_path;
    std::string suite;
    std::vector<std::string> emit;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string metric, mode, out;
    int k = 0;
    std::size_t n = 0, iters = 0;
    double dt = 0.0;

    app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    auto* metric_opt = app.add_option("--metric", metric, "euclidean | cpc:R | cnc:R | lens:ell");
    auto* k_opt = app.add_option("--k", k, "order of the differential");
    auto* mode_opt = app.add_option("--mode", mode, "ik | ikperp")->check(CLI::IsMember({"ik", "ikperp"}));
    auto* n_opt = app.add_option("--n", n, "grid side length");
    auto* dt_opt = app.add_option("--dt", dt, "geodesic step");
    auto* iters_opt = app.add_option("--iters", iters, "Neumann partial sums");
    auto* out_opt = app.add_option("--out", out, "output directory");
    app.add_option("--suite", suite, "run a sweep instead of one experiment")
        ->check(CLI::IsMember({"exp1", "exp2", "exp3", "exp4"}));
    app.add_option("--emit", emit, "extra artifacts: sino, grids, images")
        ->check(CLI::IsMember({"sino", "grids", "images"}));

    CLI11_PARSE(app, argc, argv);

    if (*metric_opt) overrides.emplace_back("metric", metric);
    if (*k_opt) overrides.emplace_back("k", std::to_string(k));
    if (*mode_opt) overrides.emplace_back("mode", mode);
    if (*n_opt) overrides.emplace_back("n", std::to_string(n));
    if (*dt_opt) overrides.emplace_back("dt", geoxray::io::format_double(dt));
    if (*iters_opt) overrides.emplace_back("iters", std::to_string(iters));
    if (*out_opt) overrides.emplace_back("out", out);
    for (const auto& e : emit) overrides.emplace_back("emit", e);

    geoxray::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = geoxray::load_config(config_path);
        }
        for (const auto& [key, value] : overrides) {
            geoxray::apply_setting(cfg, key, value);
        }
    } catch (const geoxray::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (!suite.empty()) {
            const auto cells = geoxray::run_suite(suite, cfg, std::cout);
            for (const auto& c : cells) {
                std::cout << suite << ' ' << c.metric << " k=" << c.k << ' ' << geoxray::to_string(c.mode)
                          << ' ' << 100.0 * c.rel_l2.back() << "% " << geoxray::to_string(c.regime) << '\n';
            }
        } else {
            geoxray::run_experiment(cfg, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
