#pragma once

#include <string>

#include <json.hpp>

#include "fluxepr/sweep.hpp"

namespace fluxepr {

// A run configuration parsed from the strict JSON schema (SI units, Hz for
// frequencies; unknown keys are rejected). `resolved` carries the document
// with all defaults materialized; `hash_hex` is the FNV-1a 64-bit hash of its
// canonical dump and is embedded in every output header.
struct RunConfig {
  ExperimentConfig experiment;
  nlohmann::json resolved;
  std::string hash_hex;
};

RunConfig parse_run_config(const nlohmann::json& document);
RunConfig load_run_config(const std::string& path);

// FNV-1a 64-bit over a byte string, lowercase hex
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace fluxepr
