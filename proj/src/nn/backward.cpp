#include "varcast/nn/backward.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "varcast/errors.hpp"
#include "param_offsets.hpp"

namespace varcast::nn {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

// Derivative of the activation expressed through its own output value; holds
// for every kind used in the stack.
double act_deriv(ActKind kind, double out) {
  switch (kind) {
    case ActKind::kRelu: return out > 0.0 ? 1.0 : 0.0;
    case ActKind::kTanh: return 1.0 - out * out;
    case ActKind::kSigmoid: return out * (1.0 - out);
    case ActKind::kElu1: return out < 1.0 ? out : 1.0;
    default: break;
  }
  throw NumericError("act_deriv: unsupported activation");
}

}  // namespace

BackwardResult backward(const std::vector<std::vector<double>>& windows,
                        const std::vector<double>& targets,
                        const NetworkParams& params) {
  if (windows.empty() || windows.size() != targets.size()) {
    throw DataError("backward: batch must be non-empty with aligned targets");
  }
  const auto& c = params.config;
  const std::size_t u = c.lstm_units;
  const std::size_t m = c.dense_units;
  const std::size_t k = c.components;
  const std::size_t d = c.lookback;
  const detail::Offsets off(c);
  const double* pv = params.values.data();
  const double lambda = c.loss == LossKind::kRegNll ? c.lambda : 0.0;

  BackwardResult result;
  result.grad.assign(off.total, 0.0);
  double* gv = result.grad.data();

  ForwardTrace trace;
  std::vector<double> r(k), dz_pi(k), dz_mu(k), dz_sigma(k);
  std::vector<double> d_dense(m), dz_dense(m);
  std::vector<double> dh(u), dc(u), dh_prev(u);
  std::vector<double> dzf(u), dzi(u), dzc(u), dzo(u);

  for (std::size_t b = 0; b < windows.size(); ++b) {
    const double y = targets[b];
    forward(windows[b], params, &trace);
    const auto& out = trace.output;

    // Mixture posterior responsibilities via log-sum-exp.
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      double z = (y - out.mu[j]) / out.sigma[j];
      r[j] = std::log(out.pi[j]) - 0.5 * (kLogTwoPi + z * z) -
             std::log(out.sigma[j]);
      max_term = std::max(max_term, r[j]);
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < k; ++j) norm += std::exp(r[j] - max_term);
    const double log_z = max_term + std::log(norm);
    result.mean_loss += -log_z;
    for (std::size_t j = 0; j < k; ++j) r[j] = std::exp(r[j] - log_z);

    // Head pre-activation gradients. The softmax Jacobian collapses the NLL
    // part to pi - r; the regularizer routes through the same Jacobian.
    double pi_sq = 0.0;
    if (lambda > 0.0) {
      for (double p : out.pi) pi_sq += p * p;
      result.mean_loss += lambda * pi_sq;
    }
    for (std::size_t j = 0; j < k; ++j) {
      dz_pi[j] = (out.pi[j] - r[j]) +
                 2.0 * lambda * out.pi[j] * (out.pi[j] - pi_sq);
      double diff = y - out.mu[j];
      double s = out.sigma[j];
      dz_mu[j] = r[j] * (out.mu[j] - y) / (s * s);
      double d_sigma = r[j] * (1.0 / s - diff * diff / (s * s * s));
      double raw = elu1(trace.z_sigma[j]);
      dz_sigma[j] = raw < kSigmaFloor
                        ? 0.0
                        : d_sigma * act_deriv(ActKind::kElu1, raw);
    }

    // Heads -> dense output.
    std::fill(d_dense.begin(), d_dense.end(), 0.0);
    auto head_back = [&](std::size_t w_off, std::size_t b_off,
                         const std::vector<double>& dz) {
      for (std::size_t j = 0; j < k; ++j) {
        const double* row = pv + w_off + j * m;
        double* grow = gv + w_off + j * m;
        for (std::size_t i = 0; i < m; ++i) {
          d_dense[i] += row[i] * dz[j];
          grow[i] += dz[j] * trace.dense_out[i];
        }
        gv[b_off + j] += dz[j];
      }
    };
    head_back(off.wpi, off.bpi, dz_pi);
    head_back(off.wmu, off.bmu, dz_mu);
    head_back(off.wsig, off.bsig, dz_sigma);

    // Dense layer.
    const auto& h_last = trace.hidden[d - 1];
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      dz_dense[j] =
          d_dense[j] * act_deriv(c.dense_activation, trace.dense_out[j]);
      const double* row = pv + off.wd + j * u;
      double* grow = gv + off.wd + j * u;
      for (std::size_t i = 0; i < u; ++i) {
        dh[i] += row[i] * dz_dense[j];
        grow[i] += dz_dense[j] * h_last[i];
      }
      gv[off.bd + j] += dz_dense[j];
    }

    // Backpropagation through time.
    std::fill(dc.begin(), dc.end(), 0.0);
    for (std::size_t t = d; t-- > 0;) {
      const double x = trace.inputs[t];
      const std::vector<double>* h_prev = t > 0 ? &trace.hidden[t - 1] : nullptr;
      const std::vector<double>* c_prev = t > 0 ? &trace.cell[t - 1] : nullptr;
      for (std::size_t j = 0; j < u; ++j) {
        double f = trace.gate_f[t][j];
        double i = trace.gate_i[t][j];
        double o = trace.gate_o[t][j];
        double cand = trace.candidate[t][j];
        double act_c = trace.act_cell[t][j];

        double d_o = dh[j] * act_c;
        dzo[j] = d_o * o * (1.0 - o);
        double dcj = dc[j] + dh[j] * o * act_deriv(c.lstm_activation, act_c);
        double cp = c_prev ? (*c_prev)[j] : 0.0;
        dzf[j] = dcj * cp * f * (1.0 - f);
        dzi[j] = dcj * cand * i * (1.0 - i);
        dzc[j] = dcj * i * act_deriv(c.lstm_activation, cand);
        dc[j] = dcj * f;  // flows to step t-1
      }

      std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
      auto gate_back = [&](std::size_t w_off, std::size_t b_off,
                           const std::vector<double>& dz) {
        for (std::size_t j = 0; j < u; ++j) {
          const double* row = pv + w_off + j * (1 + u);
          double* grow = gv + w_off + j * (1 + u);
          grow[0] += dz[j] * x;
          gv[b_off + j] += dz[j];
          if (h_prev) {
            for (std::size_t i = 0; i < u; ++i) {
              dh_prev[i] += row[1 + i] * dz[j];
              grow[1 + i] += dz[j] * (*h_prev)[i];
            }
          }
        }
      };
      gate_back(off.wf, off.bf, dzf);
      gate_back(off.wi, off.bi, dzi);
      gate_back(off.wc, off.bc, dzc);
      gate_back(off.wo, off.bo, dzo);
      std::swap(dh, dh_prev);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(windows.size());
  for (double& g : result.grad) {
    g *= inv_n;
    if (!std::isfinite(g)) {
      throw NumericError("backward: non-finite gradient");
    }
  }
  result.mean_loss *= inv_n;
  return result;
}

}  // namespace varcast::nn
