#pragma once

#include "jdtc/core/errors.hpp"
#include "jdtc/harness/monte_carlo.hpp"
#include "jdtc/harness/scenario.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace jdtc {

/// ConfigError whose message is anchored as "source:line: error: detail".
class ConfigFileError : public ConfigError {
public:
    ConfigFileError(std::string source, int line, const std::string& detail);
    [[nodiscard]] const std::string& source() const { return source_; }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] const std::string& detail() const { return detail_; }

private:
    std::string source_;
    int line_;
    std::string detail_;
};

/// Built-in scenario by name: example1, example2 (gamma 10 unless overridden
/// later) or fusion-demo. Throws ConfigError on an unknown name.
[[nodiscard]] ScenarioConfig builtin_scenario(std::string_view name,
                                              std::vector<std::string>* warnings = nullptr);

/// Parse a scenario document. Keys left out keep the values of the built-in
/// scenario named by "base" (example1 by default); unknown keys are errors.
/// Classes and targets use 1-based class numbers. The result is validated.
[[nodiscard]] ScenarioConfig parse_scenario_config(std::string_view text,
                                                   const std::string& source = "<config>");
[[nodiscard]] ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Fully resolved document; parse_scenario_config(to_json(c)) reproduces c.
[[nodiscard]] nlohmann::ordered_json scenario_to_json(const ScenarioConfig& config);

/// 1-based line of a byte offset.
[[nodiscard]] int line_of_offset(std::string_view text, std::size_t offset);

/// Line of the value addressed by a JSON pointer ("/targets/0/birth"), the
/// closest enclosing value when part of the path is absent, or 1.
[[nodiscard]] int locate_pointer(std::string_view text, std::string_view pointer);

struct RunInfo {
    std::string version;
    std::string git_describe;
    int threads = 0;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
};

/// Everything needed to repeat a run: resolved config, seed, code version,
/// failure count and a note on the joint performance metric.
[[nodiscard]] nlohmann::ordered_json make_manifest(const ScenarioConfig& config,
                                                   const MonteCarloResult& result,
                                                   const RunInfo& info);

} // namespace jdtc
