#pragma once

#include <cstddef>

#include "varcast/nn/network.hpp"

namespace varcast::nn::detail {

// Flat offsets of every tensor, mirroring ParamLayout's declaration order.
// Gate weight rows are laid out as [x | h_{t-1}]: column 0 is the input
// weight, columns 1..u the recurrent weights.
struct Offsets {
  explicit Offsets(const NetworkConfig& c) {
    const std::size_t u = c.lstm_units;
    const std::size_t m = c.dense_units;
    const std::size_t k = c.components;
    const std::size_t gate_w = u * (1 + u);
    std::size_t at = 0;
    auto take = [&](std::size_t n) {
      std::size_t o = at;
      at += n;
      return o;
    };
    wf = take(gate_w); bf = take(u);
    wi = take(gate_w); bi = take(u);
    wc = take(gate_w); bc = take(u);
    wo = take(gate_w); bo = take(u);
    wd = take(m * u);  bd = take(m);
    wpi = take(k * m);  bpi = take(k);
    wmu = take(k * m);  bmu = take(k);
    wsig = take(k * m); bsig = take(k);
    total = at;
  }

  std::size_t wf, bf, wi, bi, wc, bc, wo, bo;
  std::size_t wd, bd;
  std::size_t wpi, bpi, wmu, bmu, wsig, bsig;
  std::size_t total;
};

}  // namespace varcast::nn::detail
