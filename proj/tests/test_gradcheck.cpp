#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "varcast/nn/backward.hpp"
#include "varcast/nn/loss.hpp"
#include "varcast/nn/network.hpp"
#include "varcast/rng.hpp"

using namespace varcast;
using namespace varcast::nn;

namespace {

// Central-difference oracle for the mean batch loss.
double batch_loss(const std::vector<std::vector<double>>& windows,
                  const std::vector<double>& targets,
                  const NetworkParams& params) {
  const double lambda =
      params.config.loss == LossKind::kRegNll ? params.config.lambda : 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    acc += reg_nll_loss(forward(windows[i], params), targets[i], lambda);
  }
  return acc / static_cast<double>(windows.size());
}

struct CheckStats {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};

CheckStats finite_difference_check(
    const std::vector<std::vector<double>>& windows,
    const std::vector<double>& targets, const NetworkParams& params,
    double step = 1e-5) {
  auto analytic = backward(windows, targets, params);
  NetworkParams probe = params;
  CheckStats out;
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    const double saved = probe.values[i];
    probe.values[i] = saved + step;
    double up = batch_loss(windows, targets, probe);
    probe.values[i] = saved - step;
    double down = batch_loss(windows, targets, probe);
    probe.values[i] = saved;
    double fd = (up - down) / (2.0 * step);
    double a = analytic.grad[i];
    double rel = std::fabs(a - fd) /
                 std::max({std::fabs(a), std::fabs(fd), 1e-6});
    if (rel > out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst_index = i;
    }
  }
  return out;
}

NetworkConfig gradcheck_config(std::size_t k, bool regularized) {
  NetworkConfig c;
  c.lookback = 4;
  c.lstm_units = 3;
  c.dense_units = 5;
  c.components = k;
  if (regularized) {
    c.loss = LossKind::kRegNll;
    c.lambda = 0.1;
  }
  return c;
}

// Central differences are only a valid oracle away from the ReLU kinks: a
// pre-activation within a few steps of zero makes the two-sided difference
// straddle the kink. Returns the smallest kink distance over the batch so
// such batches can be re-drawn (this conditions on oracle validity only,
// never on gradient agreement).
double min_kink_distance(const std::vector<std::vector<double>>& windows,
                         const NetworkParams& params) {
  double dist = 1e300;
  ForwardTrace trace;
  for (const auto& w : windows) {
    forward(w, params, &trace);
    for (std::size_t t = 0; t < trace.cell.size(); ++t) {
      for (std::size_t j = 0; j < trace.cell[t].size(); ++j) {
        dist = std::min(dist, std::fabs(trace.z_candidate[t][j]));
        // A cell pinned at exactly zero cannot cross the kink under a
        // parameter perturbation (that would need the candidate
        // pre-activation to cross zero, which is filtered above).
        double cell = trace.cell[t][j];
        if (cell != 0.0) dist = std::min(dist, std::fabs(cell));
      }
    }
    for (double z : trace.z_dense) dist = std::min(dist, std::fabs(z));
  }
  return dist;
}

}  // namespace

TEST_CASE("analytic gradients match central differences on 20 seeded nets") {
  // The acceptance property: 10 seeds x K in {2,3}, both loss variants
  // interleaved, max relative error <= 1e-4 at step 1e-5.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (std::size_t k : {2u, 3u}) {
      const bool regularized = (seed + k) % 2 == 0;
      NetworkConfig c = gradcheck_config(k, regularized);
      stats::Rng rng(seed * 100 + k);
      stats::Rng init_rng = rng.child(0);
      auto params = init_params(c, init_rng);

      // Draw batches until none of the ReLU pre-activations sits within
      // 100 finite-difference steps of a kink.
      std::vector<std::vector<double>> windows;
      std::vector<double> targets;
      for (std::uint64_t attempt = 1; attempt < 64; ++attempt) {
        stats::Rng data = rng.child(attempt);
        windows.clear();
        targets.clear();
        for (int s = 0; s < 3; ++s) {
          std::vector<double> w(c.lookback);
          for (double& x : w) x = 2.0 * data.next_double() - 1.0;
          windows.push_back(std::move(w));
          targets.push_back(0.5 * data.next_normal());
        }
        if (min_kink_distance(windows, params) > 1e-3) break;
      }
      REQUIRE(min_kink_distance(windows, params) > 1e-3);

      auto stats_out = finite_difference_check(windows, targets, params);
      INFO("seed ", seed, " K ", k, " reg ", regularized, " worst index ",
           stats_out.worst_index);
      CHECK(stats_out.max_rel_error <= 1e-4);
    }
  }
}

TEST_CASE("gradients vanish at the symmetric fixed point") {
  // Zero network: pi uniform, mu = 0, sigma = 1. A target equal to the
  // mixture mean zeroes every mu-head gradient by symmetry.
  NetworkConfig c = gradcheck_config(2, false);
  NetworkParams p;
  p.config = c;
  p.values.assign(ParamLayout(c).total, 0.0);

  std::vector<std::vector<double>> windows = {{0.1, -0.2, 0.3, 0.0}};
  auto at_mean = backward(windows, {0.0}, p);
  ParamLayout layout(c);
  const auto& mu_b = layout.find("head.mu_b");
  for (std::size_t i = 0; i < mu_b.size(); ++i) {
    CHECK(at_mean.grad[mu_b.offset + i] == doctest::Approx(0.0));
  }

  // Off the mean, the mu-branch gradient direction agrees with central
  // differences sign-exactly.
  auto off_mean = backward(windows, {0.3}, p);
  NetworkParams probe = p;
  const double h = 1e-5;
  for (std::size_t i = 0; i < mu_b.size(); ++i) {
    std::size_t idx = mu_b.offset + i;
    probe.values[idx] = h;
    double up = batch_loss(windows, {0.3}, probe);
    probe.values[idx] = -h;
    double down = batch_loss(windows, {0.3}, probe);
    probe.values[idx] = 0.0;
    double fd = (up - down) / (2.0 * h);
    CHECK(std::signbit(off_mean.grad[idx]) == std::signbit(fd));
    CHECK(off_mean.grad[idx] < 0.0);  // raising mu toward y lowers the loss
  }
}

TEST_CASE("gradcheck holds for the tanh variant as well") {
  NetworkConfig c = gradcheck_config(2, false);
  c.lstm_activation = ActKind::kTanh;
  c.dense_activation = ActKind::kTanh;
  stats::Rng rng(424242);
  stats::Rng init_rng = rng.child(0);
  auto params = init_params(c, init_rng);
  stats::Rng data = rng.child(1);
  std::vector<std::vector<double>> windows;
  std::vector<double> targets;
  for (int s = 0; s < 4; ++s) {
    std::vector<double> w(c.lookback);
    for (double& x : w) x = data.next_normal();
    windows.push_back(std::move(w));
    targets.push_back(data.next_normal());
  }
  auto stats_out = finite_difference_check(windows, targets, params);
  CHECK(stats_out.max_rel_error <= 1e-4);
}
