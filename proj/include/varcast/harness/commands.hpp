#pragma once

#include <string>
#include <vector>

#include "varcast/harness/config.hpp"

namespace varcast::harness {

/// Each command reads/writes artifacts under config.output_dir and updates
/// the run manifest. Errors are reported by throwing; the CLI maps the
/// exception taxonomy onto exit codes.

/// Source -> gap repair -> returns.csv, plus a summary on stdout.
void cmd_ingest(const ExperimentConfig& config);

/// Per-model fitting. Benchmarks only echo their configuration; GARCH
/// persists the AIC innovation choice for the period; networks persist
/// best-of-seeds weights and training history.
void cmd_fit(const ExperimentConfig& config,
             const std::vector<std::string>& models, unsigned jobs = 1);

/// One VaR per evaluation day per model, written as forecast CSVs.
void cmd_forecast(const ExperimentConfig& config,
                  const std::vector<std::string>& models, unsigned jobs = 1);

/// Backtest reports (JSON + summary CSV), the rolling-volatility correlation
/// table, plot-data CSV and optionally a static SVG chart.
void cmd_backtest(const ExperimentConfig& config, bool svg = false);

/// Validates the manifest and renders report.md from the stored artifacts.
void cmd_report(const ExperimentConfig& config);

}  // namespace varcast::harness
