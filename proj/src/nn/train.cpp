#include "varcast/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "varcast/errors.hpp"
#include "varcast/nn/loss.hpp"

namespace varcast::nn {

double evaluate_loss(const NetworkParams& params,
                     const series::WindowedDataset& data) {
  if (data.size() == 0) throw DataError("evaluate_loss: empty dataset");
  const double lambda =
      params.config.loss == LossKind::kRegNll ? params.config.lambda : 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto pred = forward(data.windows[i], params);
    acc += reg_nll_loss(pred, data.targets[i], lambda);
  }
  return acc / static_cast<double>(data.size());
}

TrainResult train(const series::WindowedDataset& train_set,
                  const series::WindowedDataset& validation_set,
                  const NetworkConfig& config, const TrainConfig& train_config,
                  stats::Rng rng, std::vector<EpochRecord>* history_out) {
  config.validate();
  if (train_set.size() == 0) throw DataError("train: empty training set");
  if (validation_set.size() == 0) throw DataError("train: empty validation set");
  if (train_config.patience == 0 || train_config.max_epochs == 0) {
    throw DataError("train: patience and max_epochs must be >= 1");
  }

  stats::Rng init_rng = rng.child(0);
  stats::Rng shuffle_rng = rng.child(1);

  TrainResult result;
  result.seed = rng.seed();
  result.params = init_params(config, init_rng);
  NetworkParams best = result.params;

  AdamState adam(result.params.values.size());
  const std::size_t batch = train_config.adam.batch_size;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> batch_windows;
  std::vector<double> batch_targets;

  double best_val = std::numeric_limits<double>::infinity();
  double prev_val = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= train_config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double train_acc = 0.0;
    std::size_t n_batches = 0;
    double val = 0.0;
    try {
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t end = std::min(start + batch, order.size());
        batch_windows.clear();
        batch_targets.clear();
        for (std::size_t i = start; i < end; ++i) {
          batch_windows.push_back(train_set.windows[order[i]]);
          batch_targets.push_back(train_set.targets[order[i]]);
        }
        auto bw = backward(batch_windows, batch_targets, result.params);
        if (!std::isfinite(bw.mean_loss)) {
          throw NumericError("train: divergence at epoch " +
                             std::to_string(epoch) + " (non-finite loss)");
        }
        adam_step(result.params.values, bw.grad, adam, train_config.adam);
        train_acc += bw.mean_loss;
        ++n_batches;
      }
      val = evaluate_loss(result.params, validation_set);
      if (!std::isfinite(val)) {
        throw NumericError("train: divergence at epoch " +
                           std::to_string(epoch) +
                           " (non-finite validation loss)");
      }
    } catch (const NumericError&) {
      // Divergence anywhere in the epoch: hand the history so far to the
      // caller for diagnosis.
      if (history_out) *history_out = result.history;
      throw;
    }
    result.history.push_back(
        {epoch, train_acc / static_cast<double>(n_batches), val});

    if (val < best_val) {
      best_val = val;
      best_epoch = epoch;
      best = result.params;
    }
    // An epoch improves when it beats its immediate predecessor; training
    // stops after `patience` consecutive non-improving epochs. (Measuring
    // against the running best instead halts almost every run inside the
    // first dozen epochs here: the epoch-level validation loss is noisy
    // enough that new running minima become rare long before the network
    // has learned anything window-dependent.)
    stale = val < prev_val ? 0 : stale + 1;
    prev_val = val;
    if (stale >= train_config.patience) break;
  }

  result.params = std::move(best);
  result.best_epoch = best_epoch;
  result.best_validation_loss = best_val;
  if (history_out) *history_out = result.history;
  return result;
}

TrainResult train_best_of_seeds(const series::WindowedDataset& train_set,
                                const series::WindowedDataset& validation_set,
                                const NetworkConfig& config,
                                const TrainConfig& train_config,
                                std::vector<EpochRecord>* history_out) {
  if (train_config.seeds.empty()) {
    throw DataError("train_best_of_seeds: no seeds configured");
  }
  TrainResult best;
  bool have = false;
  for (std::uint64_t seed : train_config.seeds) {
    TrainResult r = train(train_set, validation_set, config, train_config,
                          stats::Rng(seed), history_out);
    if (!have || r.best_validation_loss < best.best_validation_loss) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace varcast::nn
