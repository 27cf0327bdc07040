#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "varcast/mixture.hpp"
#include "varcast/nn/activations.hpp"
#include "varcast/rng.hpp"

namespace varcast::nn {

enum class LossKind { kNll, kRegNll };

/// Architecture of the LSTM -> Dense -> mixture head stack. The LSTM
/// activation applies to both the candidate vector and the cell-output
/// squashing; the gate sigmoids are fixed.
struct NetworkConfig {
  std::size_t lookback = 10;
  std::size_t lstm_units = 6;
  std::size_t dense_units = 12;
  std::size_t components = 2;
  ActKind lstm_activation = ActKind::kRelu;
  ActKind dense_activation = ActKind::kRelu;
  LossKind loss = LossKind::kNll;
  double lambda = 0.0;  // L2 weight on the mixture probabilities

  void validate() const;
};

/// The three architectures used for forecasting: nnet1 (K=2, plain NLL),
/// nnet2 (K=2, L2-regularized, lambda 0.1), nnet3 (K=3, plain NLL).
NetworkConfig preset_network(const std::string& id);

/// One named tensor inside the flat parameter vector. Weight matrices are
/// row-major rows x cols; biases have cols == 1.
struct TensorSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  bool is_weight = false;  // weights get Glorot init, biases start at zero
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;

  std::size_t size() const { return rows * cols; }
};

/// Deterministic flat layout of every parameter in the stack, in fixed
/// declaration order (LSTM gates, dense, pi/mu/sigma heads).
struct ParamLayout {
  explicit ParamLayout(const NetworkConfig& config);

  std::vector<TensorSpec> tensors;
  std::size_t total = 0;

  const TensorSpec& find(const std::string& name) const;
};

/// All weights and biases as one flat vector, addressed through ParamLayout.
struct NetworkParams {
  NetworkConfig config;
  std::vector<double> values;
};

/// Row-major (n_out x n_in) matrix with entries i.i.d. uniform on
/// +-sqrt(6 / (n_in + n_out)).
std::vector<double> glorot_uniform(std::size_t n_in, std::size_t n_out,
                                   stats::Rng& rng);

/// Glorot weights (drawn from `rng` in layout order), zero biases.
NetworkParams init_params(const NetworkConfig& config, stats::Rng& rng);

/// LSTM cell state pair.
struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

/// Everything the backward pass needs from one forward evaluation. The raw
/// pre-activations (z_candidate, z_dense) are kept as well so finite-
/// difference checks can tell how close the pass came to a ReLU kink.
struct ForwardTrace {
  std::vector<double> inputs;                 // the window, length d
  std::vector<std::vector<double>> gate_f;    // per step, length u each
  std::vector<std::vector<double>> gate_i;
  std::vector<std::vector<double>> gate_o;
  std::vector<std::vector<double>> z_candidate;
  std::vector<std::vector<double>> candidate;  // g(z_c)
  std::vector<std::vector<double>> cell;       // C_t
  std::vector<std::vector<double>> act_cell;   // g(C_t)
  std::vector<std::vector<double>> hidden;     // h_t
  std::vector<double> z_dense;                 // dense pre-activation
  std::vector<double> dense_out;               // after dense activation
  std::vector<double> z_pi, z_mu, z_sigma;     // head pre-activations
  stats::MixtureParams output;
};

/// One LSTM step on input x against `state`; pure, returns the new state.
LstmState lstm_step(double x, const LstmState& state,
                    const NetworkParams& params);

/// Full forward pass: the LSTM consumes the window from zero state, the last
/// hidden state feeds the dense layer and the three mixture heads. The sigma
/// head is floored at 1e-6 after ELU+1. Throws NumericError naming the layer
/// if anything goes non-finite.
stats::MixtureParams forward(const std::vector<double>& window,
                             const NetworkParams& params,
                             ForwardTrace* trace = nullptr);

constexpr double kSigmaFloor = 1e-6;

}  // namespace varcast::nn
