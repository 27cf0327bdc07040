#pragma once

#include <cstdint>
#include <vector>

#include "varcast/nn/adam.hpp"
#include "varcast/nn/backward.hpp"
#include "varcast/nn/network.hpp"
#include "varcast/series.hpp"

namespace varcast::nn {

struct TrainConfig {
  std::size_t max_epochs = 100;
  std::size_t patience = 5;
  std::vector<std::uint64_t> seeds = {911, 6969, 9999};
  AdamConfig adam;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainResult {
  NetworkParams params;  // best-epoch weights
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
  std::uint64_t seed = 0;
};

/// Mean loss (the config's loss kind) over a dataset at fixed parameters.
double evaluate_loss(const NetworkParams& params,
                     const series::WindowedDataset& data);

/// Minibatch Adam over per-epoch shuffles drawn from `rng`. Stops after
/// max_epochs, or early once the validation loss has failed to improve on
/// its previous-epoch value for `patience` consecutive epochs; the returned
/// parameters are the best-validation epoch's. Divergence (non-finite loss)
/// throws NumericError; the history up to the failing epoch is written to
/// *history_out when provided.
TrainResult train(const series::WindowedDataset& train_set,
                  const series::WindowedDataset& validation_set,
                  const NetworkConfig& config, const TrainConfig& train_config,
                  stats::Rng rng,
                  std::vector<EpochRecord>* history_out = nullptr);

/// The seed protocol: one full training run per configured seed, keeping the
/// run with the lowest best validation loss (first seed wins ties). On
/// divergence *history_out holds the failing run's partial history.
TrainResult train_best_of_seeds(const series::WindowedDataset& train_set,
                                const series::WindowedDataset& validation_set,
                                const NetworkConfig& config,
                                const TrainConfig& train_config,
                                std::vector<EpochRecord>* history_out = nullptr);

}  // namespace varcast::nn
