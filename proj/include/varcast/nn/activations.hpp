#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace varcast::nn {

enum class ActKind { kSigmoid, kTanh, kRelu, kElu1, kSoftmax };

const char* act_name(ActKind kind);
ActKind act_from_name(const std::string& name);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

/// ELU shifted up by one: x+1 for x > 0, exp(x) otherwise. Strictly positive.
inline double elu1(double x) { return x > 0.0 ? x + 1.0 : std::exp(x); }

/// Elementwise activation, or softmax over the whole vector (max-shifted so
/// large inputs cannot overflow). Throws NumericError on empty or non-finite
/// input.
std::vector<double> activate(ActKind kind, const std::vector<double>& input);

/// In-place max-shifted softmax.
void softmax_inplace(std::vector<double>& v);

}  // namespace varcast::nn
