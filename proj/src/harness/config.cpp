#include "varcast/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "varcast/errors.hpp"

namespace varcast::harness {

const std::vector<std::string>& known_models() {
  static const std::vector<std::string> ids = {"hs",    "cmm",   "garch",
                                               "nnet1", "nnet2", "nnet3"};
  return ids;
}

bool is_nnet(const std::string& model_id) {
  return model_id.rfind("nnet", 0) == 0;
}

void ExperimentConfig::validate() const {
  if (source.empty()) throw UsageError("config: source is required");
  series::validate_date(eval_start);
  series::validate_date(eval_end);
  if (!(eval_start < eval_end)) {
    throw UsageError("config: eval_start must precede eval_end");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError("config: alpha must lie in (0,1)");
  }
  if (benchmark_window < 2) throw UsageError("config: benchmark_window >= 2");
  if (lookback == 0) throw UsageError("config: lookback >= 1");
  if (models.empty()) throw UsageError("config: at least one model");
  for (const auto& m : models) {
    const auto& ids = known_models();
    if (std::find(ids.begin(), ids.end(), m) == ids.end()) {
      throw UsageError("unknown model id '" + m + "'");
    }
  }
  if (mc_samples < 1000) throw UsageError("config: mc_samples >= 1000");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw UsageError("config: train_fraction in (0,1)");
  }
  if (output_dir.empty()) throw UsageError("config: output_dir is required");
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig c;
  try {
    c.source = doc.at("source").get<std::string>();
    c.eval_start = doc.at("eval_start").get<std::string>();
    c.eval_end = doc.at("eval_end").get<std::string>();
    if (doc.contains("alpha")) c.alpha = doc.at("alpha").get<double>();
    if (doc.contains("benchmark_window")) {
      c.benchmark_window = doc.at("benchmark_window").get<std::size_t>();
    }
    if (doc.contains("lookback")) {
      c.lookback = doc.at("lookback").get<std::size_t>();
    }
    if (doc.contains("models")) {
      c.models = doc.at("models").get<std::vector<std::string>>();
    }
    if (doc.contains("mc_samples")) {
      c.mc_samples = doc.at("mc_samples").get<std::size_t>();
    }
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("train_fraction")) {
      c.train_fraction = doc.at("train_fraction").get<double>();
    }
    if (doc.contains("output_dir")) {
      c.output_dir = doc.at("output_dir").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config not found: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config: invalid JSON in " + path + ": " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return nlohmann::json{{"source", c.source},
                        {"eval_start", c.eval_start},
                        {"eval_end", c.eval_end},
                        {"alpha", c.alpha},
                        {"benchmark_window", c.benchmark_window},
                        {"lookback", c.lookback},
                        {"models", c.models},
                        {"mc_samples", c.mc_samples},
                        {"seed", c.seed},
                        {"train_fraction", c.train_fraction},
                        {"output_dir", c.output_dir}};
}

std::string config_hash(const ExperimentConfig& config) {
  nlohmann::json j = config_to_json(config);
  j.erase("output_dir");
  const std::string canonical = j.dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace varcast::harness
