#include "varcast/harness/manifest.hpp"

#include <filesystem>

#include "varcast/errors.hpp"
#include "varcast/harness/io.hpp"
#include "varcast/version.hpp"

namespace varcast::harness {

std::string manifest_path(const ExperimentConfig& config) {
  return (std::filesystem::path(config.output_dir) / "manifest.json").string();
}

namespace {

RunManifest parse_manifest(const std::string& text) {
  RunManifest m;
  try {
    auto doc = nlohmann::json::parse(text);
    m.engine_version = doc.at("engine_version").get<std::string>();
    m.hash = doc.at("config_hash").get<std::string>();
    m.config = doc.at("config");
    m.artifacts = doc.at("artifacts");
    m.timings_ms = doc.at("timings_ms");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest: invalid or corrupt: ") + e.what());
  }
  return m;
}

}  // namespace

RunManifest load_or_init_manifest(const ExperimentConfig& config) {
  const std::string path = manifest_path(config);
  if (!std::filesystem::exists(path)) {
    RunManifest m;
    m.engine_version = kEngineVersion;
    m.hash = config_hash(config);
    m.config = config_to_json(config);
    return m;
  }
  RunManifest m = parse_manifest(read_text_file(path));
  if (m.hash != config_hash(config)) {
    throw DataError("manifest: existing run used a different config (hash " +
                    m.hash + " vs " + config_hash(config) +
                    "); choose a fresh output_dir");
  }
  return m;
}

RunManifest load_manifest(const ExperimentConfig& config) {
  const std::string path = manifest_path(config);
  if (!std::filesystem::exists(path)) {
    throw DataError("manifest not found at " + path + "; run the pipeline "
                    "first");
  }
  return parse_manifest(read_text_file(path));
}

void save_manifest(const ExperimentConfig& config,
                   const RunManifest& manifest) {
  nlohmann::json doc{{"engine_version", manifest.engine_version},
                     {"config_hash", manifest.hash},
                     {"config", manifest.config},
                     {"artifacts", manifest.artifacts},
                     {"timings_ms", manifest.timings_ms}};
  atomic_write_file(manifest_path(config), doc.dump(2) + "\n");
}

}  // namespace varcast::harness
