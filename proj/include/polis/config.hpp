#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polis/types.hpp"

namespace polis {

using Json = nlohmann::ordered_json;

struct ConfigIssue {
    std::string path;
    std::string message;
};

/// Collects every problem found in a config rather than stopping at the
/// first one. what() lists them one per line as "path: message".
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);

    const std::vector<ConfigIssue>& issues() const { return issues_; }
    bool mentions(std::string_view path) const;

private:
    std::vector<ConfigIssue> issues_;
};

/// Defaults: two topics (A true, B false), the 70/20/10 population and the
/// constants of the published parameter table.
ExperimentConfig default_config();

/// Checks every structural invariant; throws ConfigError listing them all.
/// Returns the config unchanged when it is valid, so re-validation is
/// idempotent.
ExperimentConfig validate_config(ExperimentConfig config);

/// Parses a config tree. Absent fields take their defaults; unknown keys are
/// errors. The result is validated.
ExperimentConfig config_from_json(const Json& tree);

/// Fully resolved tree, every field present. config_from_json inverts it.
Json config_to_json(const ExperimentConfig& config);

/// Reads a config file (comments allowed) or the manifest of an earlier run.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies a dotted-path override ("noise.nu=2", "population.groups.0.count=50")
/// on the resolved tree. The value is parsed as JSON when possible and taken
/// as a string otherwise. A few short aliases are accepted: mechanism, nu,
/// rounds, trials, seed.
ExperimentConfig apply_override(const ExperimentConfig& config, std::string_view assignment);
ExperimentConfig apply_override(const ExperimentConfig& config, std::string_view path, const Json& value);

/// Expands aliases and checks the path resolves in a resolved config tree.
std::string canonical_path(const ExperimentConfig& config, std::string_view path);

}  // namespace polis
