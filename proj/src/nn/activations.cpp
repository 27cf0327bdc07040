#include "varcast/nn/activations.hpp"

#include <algorithm>

#include "varcast/errors.hpp"

namespace varcast::nn {

const char* act_name(ActKind kind) {
  switch (kind) {
    case ActKind::kSigmoid: return "sigmoid";
    case ActKind::kTanh: return "tanh";
    case ActKind::kRelu: return "relu";
    case ActKind::kElu1: return "elu1";
    case ActKind::kSoftmax: return "softmax";
  }
  return "?";
}

ActKind act_from_name(const std::string& name) {
  if (name == "sigmoid") return ActKind::kSigmoid;
  if (name == "tanh") return ActKind::kTanh;
  if (name == "relu") return ActKind::kRelu;
  if (name == "elu1") return ActKind::kElu1;
  if (name == "softmax") return ActKind::kSoftmax;
  throw NumericError("unknown activation '" + name + "'");
}

void softmax_inplace(std::vector<double>& v) {
  double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

std::vector<double> activate(ActKind kind, const std::vector<double>& input) {
  if (input.empty()) throw NumericError("activate: empty input");
  for (double x : input) {
    if (!std::isfinite(x)) {
      throw NumericError("activate: non-finite input to " +
                         std::string(act_name(kind)));
    }
  }
  std::vector<double> out = input;
  switch (kind) {
    case ActKind::kSigmoid:
      for (double& x : out) x = sigmoid(x);
      break;
    case ActKind::kTanh:
      for (double& x : out) x = std::tanh(x);
      break;
    case ActKind::kRelu:
      for (double& x : out) x = relu(x);
      break;
    case ActKind::kElu1:
      for (double& x : out) x = elu1(x);
      break;
    case ActKind::kSoftmax:
      softmax_inplace(out);
      break;
  }
  return out;
}

}  // namespace varcast::nn
