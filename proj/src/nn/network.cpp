#include "varcast/nn/network.hpp"

#include <cmath>
#include <string>

#include "varcast/errors.hpp"
#include "param_offsets.hpp"

namespace varcast::nn {

void NetworkConfig::validate() const {
  if (lookback == 0 || lstm_units == 0 || dense_units == 0 ||
      components == 0) {
    throw NumericError("NetworkConfig: all unit counts must be >= 1");
  }
  if (lambda < 0.0) throw NumericError("NetworkConfig: lambda must be >= 0");
  if (lstm_activation == ActKind::kSoftmax ||
      dense_activation == ActKind::kSoftmax) {
    throw NumericError("NetworkConfig: softmax is reserved for the pi head");
  }
}

NetworkConfig preset_network(const std::string& id) {
  NetworkConfig c;
  if (id == "nnet1") {
    c.components = 2;
  } else if (id == "nnet2") {
    c.components = 2;
    c.loss = LossKind::kRegNll;
    c.lambda = 0.1;
  } else if (id == "nnet3") {
    c.components = 3;
  } else {
    throw UsageError("unknown network preset '" + id + "'");
  }
  return c;
}

ParamLayout::ParamLayout(const NetworkConfig& config) {
  config.validate();
  const std::size_t u = config.lstm_units;
  const std::size_t m = config.dense_units;
  const std::size_t k = config.components;
  auto add = [&](const std::string& name, std::size_t rows, std::size_t cols,
                 bool is_weight, std::size_t fan_in, std::size_t fan_out) {
    tensors.push_back({name, rows, cols, total, is_weight, fan_in, fan_out});
    total += rows * cols;
  };
  for (const char* gate : {"forget", "input", "candidate", "output"}) {
    add("lstm.w_" + std::string(gate), u, 1 + u, true, 1 + u, u);
    add("lstm.b_" + std::string(gate), u, 1, false, 0, 0);
  }
  add("dense.w", m, u, true, u, m);
  add("dense.b", m, 1, false, 0, 0);
  for (const char* head : {"pi", "mu", "sigma"}) {
    add("head." + std::string(head) + "_w", k, m, true, m, k);
    add("head." + std::string(head) + "_b", k, 1, false, 0, 0);
  }
}

const TensorSpec& ParamLayout::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw NumericError("ParamLayout: no tensor named '" + name + "'");
}

std::vector<double> glorot_uniform(std::size_t n_in, std::size_t n_out,
                                   stats::Rng& rng) {
  if (n_in == 0 || n_out == 0) {
    throw NumericError("glorot_uniform: fan sizes must be >= 1");
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(n_in + n_out));
  std::vector<double> out(n_in * n_out);
  for (double& w : out) w = (2.0 * rng.next_double() - 1.0) * bound;
  return out;
}

NetworkParams init_params(const NetworkConfig& config, stats::Rng& rng) {
  ParamLayout layout(config);
  NetworkParams params;
  params.config = config;
  params.values.assign(layout.total, 0.0);
  for (const auto& t : layout.tensors) {
    if (!t.is_weight) continue;  // biases stay zero
    auto w = glorot_uniform(t.fan_in, t.fan_out, rng);
    std::copy(w.begin(), w.end(), params.values.begin() + t.offset);
  }
  return params;
}

namespace {

double apply_act(ActKind kind, double x) {
  switch (kind) {
    case ActKind::kRelu: return relu(x);
    case ActKind::kTanh: return std::tanh(x);
    case ActKind::kSigmoid: return sigmoid(x);
    case ActKind::kElu1: return elu1(x);
    default: break;
  }
  throw NumericError("unsupported scalar activation");
}

// z = W [x | h] + b for one gate; W row-major u x (1+u).
void gate_affine(const double* w, const double* b, double x,
                 const std::vector<double>& h, std::vector<double>& z) {
  const std::size_t u = h.size();
  for (std::size_t j = 0; j < u; ++j) {
    const double* row = w + j * (1 + u);
    double acc = b[j] + row[0] * x;
    for (std::size_t k = 0; k < u; ++k) acc += row[1 + k] * h[k];
    z[j] = acc;
  }
}

void check_finite(const std::vector<double>& v, const char* where) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string("forward: non-finite value in ") + where);
    }
  }
}

}  // namespace

LstmState lstm_step(double x, const LstmState& state,
                    const NetworkParams& params) {
  const auto& c = params.config;
  const std::size_t u = c.lstm_units;
  if (state.h.size() != u || state.c.size() != u) {
    throw NumericError("lstm_step: state size does not match lstm_units");
  }
  detail::Offsets off(c);
  const double* pv = params.values.data();

  LstmState next;
  next.h.resize(u);
  next.c.resize(u);
  std::vector<double> zf(u), zi(u), zc(u), zo(u);
  gate_affine(pv + off.wf, pv + off.bf, x, state.h, zf);
  gate_affine(pv + off.wi, pv + off.bi, x, state.h, zi);
  gate_affine(pv + off.wc, pv + off.bc, x, state.h, zc);
  gate_affine(pv + off.wo, pv + off.bo, x, state.h, zo);
  for (std::size_t j = 0; j < u; ++j) {
    double f = sigmoid(zf[j]);
    double i = sigmoid(zi[j]);
    double o = sigmoid(zo[j]);
    double cand = apply_act(c.lstm_activation, zc[j]);
    next.c[j] = f * state.c[j] + i * cand;
    next.h[j] = apply_act(c.lstm_activation, next.c[j]) * o;
  }
  return next;
}

stats::MixtureParams forward(const std::vector<double>& window,
                             const NetworkParams& params,
                             ForwardTrace* trace) {
  const auto& c = params.config;
  c.validate();
  if (window.size() != c.lookback) {
    throw NumericError("forward: window length " +
                       std::to_string(window.size()) + " != lookback " +
                       std::to_string(c.lookback));
  }
  const std::size_t u = c.lstm_units;
  const std::size_t m = c.dense_units;
  const std::size_t k = c.components;
  detail::Offsets off(c);
  if (params.values.size() != off.total) {
    throw NumericError("forward: parameter vector has wrong length");
  }
  const double* pv = params.values.data();

  if (trace) {
    trace->inputs = window;
    trace->gate_f.assign(c.lookback, std::vector<double>(u));
    trace->gate_i.assign(c.lookback, std::vector<double>(u));
    trace->gate_o.assign(c.lookback, std::vector<double>(u));
    trace->z_candidate.assign(c.lookback, std::vector<double>(u));
    trace->candidate.assign(c.lookback, std::vector<double>(u));
    trace->cell.assign(c.lookback, std::vector<double>(u));
    trace->act_cell.assign(c.lookback, std::vector<double>(u));
    trace->hidden.assign(c.lookback, std::vector<double>(u));
    trace->z_dense.resize(m);
  }

  std::vector<double> h(u, 0.0), cell(u, 0.0);
  std::vector<double> zf(u), zi(u), zc(u), zo(u);
  for (std::size_t t = 0; t < c.lookback; ++t) {
    const double x = window[t];
    if (!std::isfinite(x)) {
      throw NumericError("forward: non-finite input at step " +
                         std::to_string(t));
    }
    gate_affine(pv + off.wf, pv + off.bf, x, h, zf);
    gate_affine(pv + off.wi, pv + off.bi, x, h, zi);
    gate_affine(pv + off.wc, pv + off.bc, x, h, zc);
    gate_affine(pv + off.wo, pv + off.bo, x, h, zo);
    for (std::size_t j = 0; j < u; ++j) {
      double f = sigmoid(zf[j]);
      double i = sigmoid(zi[j]);
      double o = sigmoid(zo[j]);
      double cand = apply_act(c.lstm_activation, zc[j]);
      double cj = f * cell[j] + i * cand;
      double acj = apply_act(c.lstm_activation, cj);
      cell[j] = cj;
      h[j] = acj * o;
      if (trace) {
        trace->gate_f[t][j] = f;
        trace->gate_i[t][j] = i;
        trace->gate_o[t][j] = o;
        trace->z_candidate[t][j] = zc[j];
        trace->candidate[t][j] = cand;
        trace->cell[t][j] = cj;
        trace->act_cell[t][j] = acj;
        trace->hidden[t][j] = h[j];
      }
    }
    double probe = 0.0;
    for (std::size_t j = 0; j < u; ++j) probe += h[j] + cell[j];
    if (!std::isfinite(probe)) {
      check_finite(h, ("lstm step " + std::to_string(t)).c_str());
      check_finite(cell, ("lstm step " + std::to_string(t)).c_str());
    }
  }

  std::vector<double> dense(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double* row = pv + off.wd + j * u;
    double acc = pv[off.bd + j];
    for (std::size_t i = 0; i < u; ++i) acc += row[i] * h[i];
    if (trace) trace->z_dense[j] = acc;
    dense[j] = apply_act(c.dense_activation, acc);
  }
  check_finite(dense, "dense layer");

  auto head = [&](std::size_t w_off, std::size_t b_off,
                  std::vector<double>& z) {
    z.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double* row = pv + w_off + j * m;
      double acc = pv[b_off + j];
      for (std::size_t i = 0; i < m; ++i) acc += row[i] * dense[i];
      z[j] = acc;
    }
    check_finite(z, "mixture head");
  };
  std::vector<double> z_pi, z_mu, z_sigma;
  head(off.wpi, off.bpi, z_pi);
  head(off.wmu, off.bmu, z_mu);
  head(off.wsig, off.bsig, z_sigma);

  stats::MixtureParams out;
  out.pi = z_pi;
  softmax_inplace(out.pi);
  out.mu = z_mu;
  out.sigma.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    out.sigma[j] = std::max(elu1(z_sigma[j]), kSigmaFloor);
  }

  if (trace) {
    trace->dense_out = std::move(dense);
    trace->z_pi = std::move(z_pi);
    trace->z_mu = std::move(z_mu);
    trace->z_sigma = std::move(z_sigma);
    trace->output = out;
  }
  return out;
}

}  // namespace varcast::nn
