#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "varcast/errors.hpp"
#include "varcast/harness/commands.hpp"
#include "varcast/harness/config.hpp"
#include "varcast/version.hpp"

namespace {

using varcast::harness::ExperimentConfig;

struct CommonArgs {
  std::string config_path;
  std::string source, eval_start, eval_end, output_dir, models_csv;
  double alpha = -1.0, train_fraction = -1.0;
  long long seed = -1;
  long long mc_samples = -1, window = -1, lookback = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "experiment config JSON")
      ->required();
  cmd->add_option("--source", args.source, "override data source");
  cmd->add_option("--eval-start", args.eval_start, "override eval_start");
  cmd->add_option("--eval-end", args.eval_end, "override eval_end");
  cmd->add_option("--alpha", args.alpha, "override VaR confidence");
  cmd->add_option("--seed", args.seed, "override master seed");
  cmd->add_option("--output-dir", args.output_dir, "override output dir");
  cmd->add_option("--models", args.models_csv,
                  "override model list (comma separated)");
  cmd->add_option("--mc-samples", args.mc_samples, "override MC sample count");
  cmd->add_option("--window", args.window, "override benchmark window");
  cmd->add_option("--lookback", args.lookback, "override network lookback");
  cmd->add_option("--train-fraction", args.train_fraction,
                  "override train fraction");
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig config = varcast::harness::load_config(args.config_path);
  if (!args.source.empty()) config.source = args.source;
  if (!args.eval_start.empty()) config.eval_start = args.eval_start;
  if (!args.eval_end.empty()) config.eval_end = args.eval_end;
  if (args.alpha >= 0.0) config.alpha = args.alpha;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.output_dir.empty()) config.output_dir = args.output_dir;
  if (!args.models_csv.empty()) config.models = split_csv(args.models_csv);
  if (args.mc_samples > 0) {
    config.mc_samples = static_cast<std::size_t>(args.mc_samples);
  }
  if (args.window > 0) {
    config.benchmark_window = static_cast<std::size_t>(args.window);
  }
  if (args.lookback > 0) {
    config.lookback = static_cast<std::size_t>(args.lookback);
  }
  if (args.train_fraction > 0.0) config.train_fraction = args.train_fraction;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varcast: one-day-ahead Value-at-Risk forecasting and "
               "backtesting"};
  app.set_version_flag("--version", varcast::kEngineVersion);
  app.require_subcommand(1);

  CommonArgs ingest_args, fit_args, forecast_args, backtest_args, report_args;
  std::string fit_model, forecast_model;
  unsigned fit_jobs = 1, forecast_jobs = 1;
  bool svg = false;

  auto* ingest = app.add_subcommand("ingest", "load prices, write returns");
  add_common(ingest, ingest_args);

  auto* fit = app.add_subcommand("fit", "fit models on the training data");
  add_common(fit, fit_args);
  fit->add_option("-m,--model", fit_model, "fit only this model");
  fit->add_option("-j,--jobs", fit_jobs, "worker threads");

  auto* forecast = app.add_subcommand("forecast", "write per-day VaR CSVs");
  add_common(forecast, forecast_args);
  forecast->add_option("-m,--model", forecast_model,
                       "forecast only this model");
  forecast->add_option("-j,--jobs", forecast_jobs, "worker threads");

  auto* backtest = app.add_subcommand("backtest", "evaluate forecasts");
  add_common(backtest, backtest_args);
  backtest->add_flag("--svg", svg, "also render a static SVG chart");

  auto* report = app.add_subcommand("report", "render report.md");
  add_common(report, report_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (ingest->parsed()) {
      varcast::harness::cmd_ingest(resolve_config(ingest_args));
    } else if (fit->parsed()) {
      std::vector<std::string> models;
      if (!fit_model.empty()) models.push_back(fit_model);
      varcast::harness::cmd_fit(resolve_config(fit_args), models, fit_jobs);
    } else if (forecast->parsed()) {
      std::vector<std::string> models;
      if (!forecast_model.empty()) models.push_back(forecast_model);
      varcast::harness::cmd_forecast(resolve_config(forecast_args), models,
                                     forecast_jobs);
    } else if (backtest->parsed()) {
      varcast::harness::cmd_backtest(resolve_config(backtest_args), svg);
    } else if (report->parsed()) {
      varcast::harness::cmd_report(resolve_config(report_args));
    }
  } catch (const varcast::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 64;
  } catch (const varcast::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const varcast::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const varcast::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
