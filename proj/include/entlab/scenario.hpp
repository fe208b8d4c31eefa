#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entlab/errors.hpp"
#include "entlab/gaussian.hpp"

namespace entlab::scenario {

inline constexpr const char* VERSION = "0.1.0";

// Flat key = value configuration; '#' starts a comment.
struct ScenarioConfig {
    std::string scenario;
    std::map<std::string, std::string> params;
    std::string output;          // artifact path
    std::string format = "csv";  // csv | json
    bool timestamp = false;      // off by default: byte-identical reruns

    static ScenarioConfig from_file(const std::string& path);
    static ScenarioConfig from_text(const std::string& text);

    double number(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
};

struct ScenarioInfo {
    std::string name;
    std::string summary;
    std::vector<std::string> keys;  // accepted parameter keys
};

const std::vector<ScenarioInfo>& catalog();
std::string list_scenarios();

// Runs a scenario and writes its artifact. Throws ConfigError on invalid
// configuration and NumericalFailure on solver trouble.
void run(const ScenarioConfig& config);

// Schedule dump used by both the CLI subcommand and the tables_* scenarios.
std::string schedule_csv(gaussian::Protocol protocol, double r);
std::optional<gaussian::Protocol> protocol_from_string(const std::string& name);

// Ordered parallel map over sweep cells; worker count from the
// ENTLAB_WORKERS environment variable (default: hardware concurrency).
void parallel_for_indexed(std::size_t n, const std::function<void(std::size_t)>& fn);

// Full-precision number formatting shared by all writers (17 significant
// digits, so artifacts can feed regression comparisons).
std::string format_number(double x);

} // namespace entlab::scenario
