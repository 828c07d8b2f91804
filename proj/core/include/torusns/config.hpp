#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "torusns/experiments.hpp"

namespace torusns {

/// Field-level configuration failure; the CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Strictly validated experiment configuration.  Unknown keys are rejected at
/// every level so parameter-sweep typos fail loudly instead of running the
/// default silently.
struct ConfigDocument {
    ExperimentPlan plan;

    static ConfigDocument from_json(const nlohmann::json& j);
    static ConfigDocument load(const std::string& path);

    /// Canonical form (sorted keys, defaults filled in); hashing input.
    nlohmann::json to_json() const;

    /// Stable 64-bit FNV-1a hash of the canonical serialization.
    std::string hash() const;
};

std::string fnv1a_hex(const std::string& data);

}  // namespace torusns
