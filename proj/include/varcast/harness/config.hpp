#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "varcast/series.hpp"

namespace varcast::harness {

/// Model identifiers accepted in configs and on the command line, in the
/// canonical reporting order.
const std::vector<std::string>& known_models();
bool is_nnet(const std::string& model_id);

/// One experiment: a data source, an evaluation window, and the models to
/// run. Loaded from a JSON document; individual CLI flags override fields.
struct ExperimentConfig {
  std::string source;
  series::Date eval_start;
  series::Date eval_end;
  double alpha = 0.99;
  std::size_t benchmark_window = 250;
  std::size_t lookback = 10;
  std::vector<std::string> models = {"hs",    "cmm",   "garch",
                                     "nnet1", "nnet2", "nnet3"};
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 42;
  double train_fraction = 0.9;
  std::string output_dir = "out";

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// FNV-1a over the canonical serialization of every semantically meaningful
/// field (everything except output_dir, which only moves artifacts around).
std::string config_hash(const ExperimentConfig& config);

}  // namespace varcast::harness
