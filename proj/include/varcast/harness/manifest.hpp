#pragma once

#include <string>

#include <json.hpp>

#include "varcast/harness/config.hpp"

namespace varcast::harness {

/// Run bookkeeping written alongside the artifacts: the config (and its
/// hash), the engine version, per-stage artifact paths relative to the
/// output directory, and wall-clock timings.
struct RunManifest {
  std::string engine_version;
  std::string hash;
  nlohmann::json config;
  nlohmann::json artifacts = nlohmann::json::object();
  nlohmann::json timings_ms = nlohmann::json::object();
};

std::string manifest_path(const ExperimentConfig& config);

/// Loads the manifest, or starts a fresh one bound to `config` if none
/// exists yet. A manifest written by a different config hash is rejected.
RunManifest load_or_init_manifest(const ExperimentConfig& config);

/// Loads an existing manifest; throws DataError when missing or corrupt.
RunManifest load_manifest(const ExperimentConfig& config);

void save_manifest(const ExperimentConfig& config,
                   const RunManifest& manifest);

}  // namespace varcast::harness
