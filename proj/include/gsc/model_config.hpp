#pragma once

#include <json.hpp>

#include "gsc/model.hpp"
#include "gsc/potential.hpp"

namespace gsc {

/// Raised for malformed configuration; the message names the offending key
/// path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Build a model from a configuration record:
///   {"type": "regular_bec", "l": 3, "r": 6, "eps": 0.45}
///   {"type": "product", "components": [ ... ]}
/// Unknown keys are rejected. `path` prefixes error messages.
ModelPtr model_from_json(const nlohmann::json& cfg, const std::string& path = "model");

/// Family record for threshold scans: {"type": "regular_bec", "l": 3, "r": 6}.
ModelFamily family_from_json(const nlohmann::json& cfg,
                             const std::string& path = "family");

/// Reject keys outside `allowed`, naming the first offender.
void check_allowed_keys(const nlohmann::json& obj, const std::string& path,
                        std::initializer_list<const char*> allowed);

double require_number(const nlohmann::json& obj, const std::string& path,
                      const char* key);
double number_or(const nlohmann::json& obj, const std::string& path, const char* key,
                 double fallback);
long integer_or(const nlohmann::json& obj, const std::string& path, const char* key,
                long fallback);
long require_integer(const nlohmann::json& obj, const std::string& path,
                     const char* key);
std::string require_string(const nlohmann::json& obj, const std::string& path,
                           const char* key);
std::string string_or(const nlohmann::json& obj, const std::string& path,
                      const char* key, const std::string& fallback);

}  // namespace gsc
