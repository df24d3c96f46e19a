#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "elastic_flow/convergence.hpp"
#include "elastic_flow/flow.hpp"
#include "elastic_flow/initial_curves.hpp"

namespace elastic_flow {

/// Carries the dotted key path (e.g. "flow.epsilon") of the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& reason)
      : std::invalid_argument(key + ": " + reason), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ParsedConfig {
  std::variant<FlowConfig, SweepConfig> config;
  InitialCurveParams initial;
  std::size_t stride = 1;

  bool is_sweep() const { return std::holds_alternative<SweepConfig>(config); }
  const FlowConfig& flow() const;
};

/// Line-oriented `key = value` document with optional sections [flow],
/// [initial], [sweep] and [output]; keys before the first section belong to
/// [flow]. Lists are written `[a, b, c]`. A [sweep] section selects a
/// SweepConfig. Unknown keys and invalid values raise ConfigError.
ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config(const std::filesystem::path& path);

}  // namespace elastic_flow
