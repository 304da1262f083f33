#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pmhe/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

pmhe::Scenario load(const std::string& path, const std::optional<unsigned long long>& seed) {
    pmhe::Scenario sc = path == "builtin:reactor" ? pmhe::Scenario::builtin_reactor()
                                                  : pmhe::Scenario::parse_file(path);
    if (seed) sc.seed = *seed;
    return sc;
}

pmhe::OutputFormat parse_format(const std::string& fmt) {
    if (fmt == "csv") return pmhe::OutputFormat::kCsv;
    if (fmt == "csv+svg") return pmhe::OutputFormat::kCsvSvg;
    throw pmhe::ConfigError("--format must be csv or csv+svg");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained anytime proximity-MHE simulation runner"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = "out";
    std::string format = "csv+svg";
    std::optional<unsigned long long> seed;
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--format", format, "csv or csv+svg");
    app.add_option("--seed", seed, "override the scenario RNG seed");

    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "run one scenario and emit trace/regret files");
    run->add_option("config", run_config, "config file or builtin:reactor")->required();

    std::vector<std::string> cmp_configs;
    CLI::App* cmp = app.add_subcommand("compare", "run scenarios on one stream, tabulate");
    cmp->add_option("configs", cmp_configs, "config files")->required()->expected(-1);

    std::string cert_config;
    CLI::App* cert = app.add_subcommand("certify", "synthesize and print the certificate");
    cert->add_option("config", cert_config, "config file or builtin:reactor")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const pmhe::Scenario sc = load(run_config, seed);
            const pmhe::ScenarioResult res = pmhe::run_scenario(sc, out_dir, parse_format(format));
            for (const auto& f : res.files_written) std::cout << "wrote " << f << "\n";
            std::cout << "rmse = " << res.rmse_value << "\n";
            if (!res.report.R.empty()) std::cout << "R(T) = " << res.report.R.back() << "\n";
        } else if (cmp->parsed()) {
            std::vector<pmhe::Scenario> scenarios;
            for (const auto& path : cmp_configs) scenarios.push_back(load(path, seed));
            const pmhe::CompareTable table =
                pmhe::compare_estimators(scenarios, out_dir, parse_format(format));
            std::cout << table.format();
        } else if (cert->parsed()) {
            const pmhe::Scenario sc = load(cert_config, seed);
            sc.validate();
            const pmhe::LtiSystem sys(sc.A, sc.B, sc.C);
            const pmhe::ScenarioDesign design = pmhe::design_scenario(sc, sys);
            std::cout << design.cert.report();
            if (!design.cert.valid) return kExitConfig;
        }
    } catch (const pmhe::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitSolver;
    } catch (const pmhe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pmhe::DesignError& e) {
        std::cerr << "design error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pmhe::DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
