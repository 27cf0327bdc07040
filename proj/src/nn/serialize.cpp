#include "varcast/nn/serialize.hpp"

#include <json.hpp>

#include "varcast/errors.hpp"

namespace varcast::nn {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "lstm-mdn-params";
constexpr int kVersion = 1;

json config_to_json(const NetworkConfig& c) {
  return json{{"lookback", c.lookback},
              {"lstm_units", c.lstm_units},
              {"dense_units", c.dense_units},
              {"components", c.components},
              {"lstm_activation", act_name(c.lstm_activation)},
              {"dense_activation", act_name(c.dense_activation)},
              {"loss", c.loss == LossKind::kRegNll ? "reg_nll" : "nll"},
              {"lambda", c.lambda}};
}

NetworkConfig config_from_json(const json& j) {
  NetworkConfig c;
  c.lookback = j.at("lookback").get<std::size_t>();
  c.lstm_units = j.at("lstm_units").get<std::size_t>();
  c.dense_units = j.at("dense_units").get<std::size_t>();
  c.components = j.at("components").get<std::size_t>();
  c.lstm_activation = act_from_name(j.at("lstm_activation").get<std::string>());
  c.dense_activation =
      act_from_name(j.at("dense_activation").get<std::string>());
  std::string loss = j.at("loss").get<std::string>();
  if (loss == "nll") {
    c.loss = LossKind::kNll;
  } else if (loss == "reg_nll") {
    c.loss = LossKind::kRegNll;
  } else {
    throw DataError("params json: unknown loss kind '" + loss + "'");
  }
  c.lambda = j.at("lambda").get<double>();
  c.validate();
  return c;
}

}  // namespace

std::string params_to_json(const NetworkParams& params) {
  ParamLayout layout(params.config);
  if (params.values.size() != layout.total) {
    throw NumericError("params_to_json: value vector does not match layout");
  }
  json tensors = json::array();
  for (const auto& t : layout.tensors) {
    json values = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
      values.push_back(params.values[t.offset + i]);
    }
    tensors.push_back({{"name", t.name},
                       {"shape", {t.rows, t.cols}},
                       {"data", std::move(values)}});
  }
  json doc{{"format", kFormat},
           {"version", kVersion},
           {"config", config_to_json(params.config)},
           {"tensors", std::move(tensors)}};
  return doc.dump(2) + "\n";
}

NetworkParams params_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("params json: parse failure: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw DataError("params json: unexpected format tag");
    }
    if (doc.at("version").get<int>() != kVersion) {
      throw DataError("params json: unsupported version");
    }
    NetworkParams params;
    params.config = config_from_json(doc.at("config"));
    ParamLayout layout(params.config);
    params.values.assign(layout.total, 0.0);
    for (const auto& t : doc.at("tensors")) {
      const auto& spec = layout.find(t.at("name").get<std::string>());
      auto shape = t.at("shape").get<std::vector<std::size_t>>();
      const auto& data = t.at("data");
      if (shape.size() != 2 || shape[0] != spec.rows || shape[1] != spec.cols ||
          data.size() != spec.size()) {
        throw DataError("params json: tensor '" + spec.name +
                        "' has the wrong shape");
      }
      for (std::size_t i = 0; i < spec.size(); ++i) {
        params.values[spec.offset + i] = data[i].get<double>();
      }
    }
    return params;
  } catch (const json::exception& e) {
    throw DataError(std::string("params json: missing or bad field: ") +
                    e.what());
  }
}

std::string history_to_json(const TrainResult& result) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : result.history) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"validation_loss", e.validation_loss}});
  }
  nlohmann::json doc{{"seed", result.seed},
                     {"best_epoch", result.best_epoch},
                     {"best_validation_loss", result.best_validation_loss},
                     {"epochs", std::move(epochs)}};
  return doc.dump(2) + "\n";
}

}  // namespace varcast::nn
