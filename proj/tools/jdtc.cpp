#include "jdtc/core/errors.hpp"
#include "jdtc/harness/config_io.hpp"
#include "jdtc/harness/monte_carlo.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Options {
    std::string scenario;  // empty: example1, or the file given by --config
    std::string config_path;
    std::optional<std::string> algo;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> gamma;
    int threads = 0;
    std::string out = "results";
    bool raw = false;
};

/// Scenario plus command-line overrides. Throws ConfigError.
jdtc::ScenarioConfig resolve(const Options& opt, std::vector<std::string>& warnings) {
    jdtc::ScenarioConfig config;
    if (!opt.config_path.empty()) {
        if (!opt.scenario.empty() && opt.scenario != "file") {
            throw jdtc::ConfigError("--config requires --scenario file");
        }
        config = jdtc::load_scenario_config(opt.config_path);
    } else if (opt.scenario == "file") {
        throw jdtc::ConfigError("--scenario file requires --config PATH");
    } else if (opt.scenario == "example2" && opt.gamma) {
        config = jdtc::build_example2(*opt.gamma, &warnings);
    } else {
        config = jdtc::builtin_scenario(opt.scenario.empty() ? "example1" : opt.scenario, &warnings);
    }
    if (opt.algo) config.algorithm = jdtc::parse_algorithm(*opt.algo);
    if (opt.trials) config.trials = *opt.trials;
    if (opt.seed) config.seed = *opt.seed;
    if (opt.gamma) {
        if (!(*opt.gamma >= 0.0)) throw jdtc::ConfigError("--gamma must be nonnegative");
        if (*opt.gamma == 0.0 && opt.scenario != "example2") {
            warnings.push_back("gamma = 0 removes the cardinality cost; tracks may be dropped freely");
        }
        config.coeffs.gamma = *opt.gamma;
    }
    config.validate();
    return config;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

int run(const Options& opt) {
    std::vector<std::string> warnings;
    jdtc::ScenarioConfig config;
    try {
        config = resolve(opt, warnings);
    } catch (const jdtc::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    try {
        const std::filesystem::path out(opt.out);
        std::filesystem::create_directories(out);
        const std::string stem = config.name + "_" + std::string(jdtc::to_string(config.algorithm));

        const jdtc::MonteCarloResult result = jdtc::run_monte_carlo(config, opt.threads);

        jdtc::RunInfo info;
        info.version = JDTC_VERSION;
        info.git_describe = JDTC_GIT_DESCRIBE;
        info.threads = opt.threads;
        info.warnings = warnings;

        std::ostringstream summary;
        jdtc::write_summary_csv(summary, result.rows);
        const auto summary_path = out / (stem + ".csv");
        write_file(summary_path, summary.str());
        info.outputs.push_back(summary_path.string());
        if (opt.raw) {
            std::ostringstream raw;
            jdtc::write_raw_csv(raw, result.trials);
            const auto raw_path = out / (stem + "_raw.csv");
            write_file(raw_path, raw.str());
            info.outputs.push_back(raw_path.string());
        }
        const auto manifest_path = out / (stem + "_manifest.json");
        info.outputs.push_back(manifest_path.string());
        write_file(manifest_path, jdtc::make_manifest(config, result, info).dump(2) + "\n");

        std::cout << "wrote " << summary_path.string() << " (" << config.trials << " trials, "
                  << result.failures << " failed)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int validate(const Options& opt) {
    std::vector<std::string> warnings;
    try {
        const jdtc::ScenarioConfig config = resolve(opt, warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        std::cout << "ok: " << config.name << " (" << config.num_classes() << " classes, "
                  << config.targets.size() << " targets, " << config.horizon << " scans)\n";
        return kExitOk;
    } catch (const jdtc::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }
}

void add_common(CLI::App& cmd, Options& opt) {
    cmd.add_option("--scenario", opt.scenario, "Built-in scenario or 'file' with --config")
        ->check(CLI::IsMember({"example1", "example2", "fusion-demo", "file"}));
    cmd.add_option("--config", opt.config_path, "Scenario JSON file");
    cmd.add_option("--algo", opt.algo, "cjde-lmb, etd or dte")
        ->check(CLI::IsMember({"cjde-lmb", "etd", "dte"}));
    cmd.add_option("--trials", opt.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", opt.seed, "Master seed; trial t uses seed + t");
    cmd.add_option("--gamma", opt.gamma, "Cardinality cost weight");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint detection, tracking and classification experiments"};
    app.set_version_flag("--version", std::string(JDTC_VERSION) + " (" + JDTC_GIT_DESCRIBE + ")");
    app.require_subcommand(1);

    Options opt;
    CLI::App* run_cmd = app.add_subcommand("run", "Run Monte Carlo trials and write CSV results");
    add_common(*run_cmd, opt);
    run_cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--out", opt.out, "Output directory");
    run_cmd->add_flag("--raw", opt.raw, "Also write per-trial rows");

    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a scenario without running it");
    add_common(*validate_cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    if (run_cmd->parsed()) return run(opt);
    return validate(opt);
}
