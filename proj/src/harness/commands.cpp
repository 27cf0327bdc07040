#include "varcast/harness/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <thread>

#include "varcast/backtest.hpp"
#include "varcast/errors.hpp"
#include "varcast/harness/io.hpp"
#include "varcast/harness/manifest.hpp"
#include "varcast/harness/svg.hpp"
#include "varcast/mdn_forecast.hpp"
#include "varcast/nn/serialize.hpp"
#include "varcast/nn/train.hpp"
#include "varcast/var_models.hpp"

namespace varcast::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kMissingWarnThreshold = 0.03;
constexpr double kSignificance = 0.05;
constexpr std::size_t kVolatilityWindow = 5;

class StageTimer {
 public:
  explicit StageTimer(RunManifest& manifest, const std::string& key)
      : manifest_(manifest), key_(key),
        start_(std::chrono::steady_clock::now()) {}

  // Must run before the manifest is saved; the destructor only covers
  // early-exit paths.
  void stop() {
    if (stopped_) return;
    stopped_ = true;
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start_)
                  .count();
    manifest_.timings_ms[key_] = ms;
  }
  ~StageTimer() { stop(); }

 private:
  RunManifest& manifest_;
  std::string key_;
  std::chrono::steady_clock::time_point start_;
  bool stopped_ = false;
};

std::string out_path(const ExperimentConfig& config, const std::string& rel) {
  return (fs::path(config.output_dir) / rel).string();
}

series::ReturnSeries load_returns(const ExperimentConfig& config) {
  const std::string path = out_path(config, "returns.csv");
  if (!fs::exists(path)) {
    throw DataError("returns.csv not found under " + config.output_dir +
                    "; run `ingest` first");
  }
  return returns_from_csv(read_text_file(path));
}

series::SplitSpec split_spec(const ExperimentConfig& config) {
  return {config.eval_start, config.eval_end, config.train_fraction};
}

std::size_t model_stream_index(const std::string& model_id) {
  const auto& ids = known_models();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == model_id) return i;
  }
  throw UsageError("unknown model id '" + model_id + "'");
}

// Deterministic per-model Monte Carlo seed derived from the master seed.
std::uint64_t model_seed(const ExperimentConfig& config,
                         const std::string& model_id) {
  return stats::Rng(config.seed)
      .child(1000 + model_stream_index(model_id))
      .seed();
}

void run_days(std::size_t n, unsigned jobs,
              const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned workers = std::min<unsigned>(jobs, n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<std::string> resolve_models(const ExperimentConfig& config,
                                        const std::vector<std::string>& ask) {
  if (ask.empty()) return config.models;
  for (const auto& m : ask) model_stream_index(m);  // validates
  return ask;
}

}  // namespace

void cmd_ingest(const ExperimentConfig& config) {
  config.validate();
  RunManifest manifest = load_or_init_manifest(config);
  StageTimer timer(manifest, "ingest");

  series::PriceSeries prices = series::ingest(config.source);
  const double missing = series::missing_fraction(prices);
  if (missing > kMissingWarnThreshold) {
    std::fprintf(stderr,
                 "warning: %.2f%% of entries are missing (threshold %.0f%%); "
                 "interpolating anyway\n",
                 missing * 100.0, kMissingWarnThreshold * 100.0);
  }
  prices = series::interpolate_missing(prices);
  series::ReturnSeries returns = series::to_returns(prices);
  atomic_write_file(out_path(config, "returns.csv"), returns_to_csv(returns));

  auto all_stats = series::sample_stats(returns.returns);
  std::printf("ingested %zu prices (%s .. %s), %.2f%% interpolated\n",
              prices.size(), prices.dates.front().c_str(),
              prices.dates.back().c_str(), missing * 100.0);
  std::printf("returns: %zu rows, full-sample mean %.6g, sigma %.6g\n",
              returns.size(), all_stats.mean, all_stats.stddev);
  try {
    auto parts = series::split(returns, split_spec(config));
    auto eval_stats = series::sample_stats(parts.test.returns);
    std::printf("evaluation period %s..%s: %zu days, sigma %.5f\n",
                config.eval_start.c_str(), config.eval_end.c_str(),
                parts.test.size(), eval_stats.stddev);
  } catch (const DataError&) {
    std::printf("evaluation period %s..%s: no observations yet\n",
                config.eval_start.c_str(), config.eval_end.c_str());
  }

  manifest.artifacts["returns"] = "returns.csv";
  timer.stop();
  save_manifest(config, manifest);
}

namespace {

void fit_one(const ExperimentConfig& config, RunManifest& manifest,
             const std::string& model_id) {
  StageTimer timer(manifest, "fit." + model_id);
  series::ReturnSeries returns = load_returns(config);
  auto parts = series::split(returns, split_spec(config));

  if (model_id == "hs" || model_id == "cmm") {
    // Window-local models: nothing to fit, echo the configuration.
    nlohmann::json echo{{"model", model_id},
                        {"window", config.benchmark_window},
                        {"alpha", config.alpha},
                        {"config_hash", config_hash(config)}};
    const std::string rel = "models/" + model_id + ".json";
    atomic_write_file(out_path(config, rel), echo.dump(2) + "\n");
    manifest.artifacts["models"][model_id] = rel;
    return;
  }

  if (model_id == "garch") {
    const std::size_t pre = parts.train.size() + parts.validation.size();
    if (pre < config.benchmark_window) {
      throw DataError("garch: need " +
                      std::to_string(config.benchmark_window) +
                      " returns before the evaluation period, have " +
                      std::to_string(pre));
    }
    std::vector<double> window(returns.returns.begin() +
                                   (pre - config.benchmark_window),
                               returns.returns.begin() + pre);
    auto choice = models::select_innovation(window);
    nlohmann::json doc{
        {"model", "garch"},
        {"innovation", models::innovation_name(choice.innovation)},
        {"nu", choice.nu},
        {"aic_normal", choice.aic_normal},
        {"aic_ged", choice.aic_ged},
        {"window", config.benchmark_window},
        {"config_hash", config_hash(config)}};
    const std::string rel = "models/garch.json";
    atomic_write_file(out_path(config, rel), doc.dump(2) + "\n");
    manifest.artifacts["models"]["garch"] = rel;
    std::printf("garch: selected %s innovations (AIC normal %.2f, ged %.2f)\n",
                models::innovation_name(choice.innovation), choice.aic_normal,
                choice.aic_ged);
    return;
  }

  // Neural networks.
  nn::NetworkConfig net = nn::preset_network(model_id);
  net.lookback = config.lookback;
  auto train_windows = series::rolling_windows(parts.train, config.lookback);
  auto val_windows =
      series::rolling_windows(parts.validation, config.lookback);
  nn::TrainConfig tc;

  std::vector<nn::EpochRecord> history;
  try {
    nn::TrainResult result = nn::train_best_of_seeds(train_windows,
                                                     val_windows, net, tc,
                                                     &history);
    const std::string wrel = "models/" + model_id + ".weights.json";
    const std::string hrel = "models/" + model_id + ".history.json";
    atomic_write_file(out_path(config, wrel),
                      nn::params_to_json(result.params));
    atomic_write_file(out_path(config, hrel), nn::history_to_json(result));
    manifest.artifacts["models"][model_id] =
        nlohmann::json{{"weights", wrel}, {"history", hrel}};
    std::printf("%s: seed %llu, best epoch %zu, validation loss %.6f\n",
                model_id.c_str(),
                static_cast<unsigned long long>(result.seed),
                result.best_epoch, result.best_validation_loss);
  } catch (const NumericError&) {
    // Divergence: keep the history around for diagnosis, then re-throw.
    nn::TrainResult partial;
    partial.history = history;
    const std::string hrel = "models/" + model_id + ".history.json";
    atomic_write_file(out_path(config, hrel), nn::history_to_json(partial));
    manifest.artifacts["models"][model_id] =
        nlohmann::json{{"history", hrel}};
    throw;
  }
}

}  // namespace

void cmd_fit(const ExperimentConfig& config,
             const std::vector<std::string>& models, unsigned /*jobs*/) {
  config.validate();
  RunManifest manifest = load_or_init_manifest(config);
  for (const auto& m : resolve_models(config, models)) {
    fit_one(config, manifest, m);
    save_manifest(config, manifest);
  }
}

namespace {

backtest::DatedSeries forecast_benchmark(const ExperimentConfig& config,
                                         const series::ReturnSeries& returns,
                                         std::size_t test_begin,
                                         std::size_t test_len,
                                         const std::string& model_id,
                                         const models::GarchParams* garch,
                                         unsigned jobs) {
  const std::size_t w = config.benchmark_window;
  if (test_begin < w) {
    throw DataError(model_id + ": insufficient history, need " +
                    std::to_string(w) + " returns before " +
                    returns.dates[test_begin]);
  }
  models::VaRConfig vc;
  vc.alpha = config.alpha;
  vc.window = w;

  backtest::DatedSeries out;
  out.dates.assign(returns.dates.begin() + test_begin,
                   returns.dates.begin() + test_begin + test_len);
  out.values.resize(test_len);
  run_days(test_len, jobs, [&](std::size_t i) {
    const std::size_t t = test_begin + i;
    if (model_id == "hs") {
      std::vector<double> window(returns.losses.begin() + (t - w),
                                 returns.losses.begin() + t);
      out.values[i] = models::var_hs(window, vc);
    } else if (model_id == "cmm") {
      std::vector<double> window(returns.returns.begin() + (t - w),
                                 returns.returns.begin() + t);
      out.values[i] = models::var_cmm(window, vc);
    } else {
      std::vector<double> window(returns.returns.begin() + (t - w),
                                 returns.returns.begin() + t);
      auto fit = models::fit_garch11(window, garch->innovation);
      out.values[i] = models::garch_var(fit, vc);
    }
  });
  return out;
}

}  // namespace

void cmd_forecast(const ExperimentConfig& config,
                  const std::vector<std::string>& models, unsigned jobs) {
  config.validate();
  RunManifest manifest = load_or_init_manifest(config);
  series::ReturnSeries returns = load_returns(config);
  auto parts = series::split(returns, split_spec(config));
  const std::size_t test_begin = parts.train.size() + parts.validation.size();
  const std::size_t test_len = parts.test.size();

  for (const auto& model_id : resolve_models(config, models)) {
    StageTimer timer(manifest, "forecast." + model_id);
    backtest::DatedSeries fc;

    if (model_id == "garch") {
      const std::string sel_path = out_path(config, "models/garch.json");
      if (!fs::exists(sel_path)) {
        throw DataError("garch: innovation selection missing; run `fit "
                        "--model garch` first");
      }
      auto sel = nlohmann::json::parse(read_text_file(sel_path));
      models::GarchParams proto;
      proto.innovation = sel.at("innovation").get<std::string>() == "ged"
                             ? models::Innovation::kGed
                             : models::Innovation::kNormal;
      fc = forecast_benchmark(config, returns, test_begin, test_len, model_id,
                              &proto, jobs);
    } else if (is_nnet(model_id)) {
      const std::string wpath =
          out_path(config, "models/" + model_id + ".weights.json");
      if (!fs::exists(wpath)) {
        throw DataError(model_id + ": trained weights missing; run `fit "
                        "--model " + model_id + "` first");
      }
      nn::NetworkParams params = nn::params_from_json(read_text_file(wpath));
      forecast::MonteCarloConfig mc;
      mc.samples = config.mc_samples;
      mc.alpha = config.alpha;
      mc.seed = model_seed(config, model_id);
      // Slice off anything after eval_end; day seeds key on the series
      // index, which slicing from the front preserves.
      series::ReturnSeries in_window;
      const std::size_t end = test_begin + test_len;
      in_window.dates.assign(returns.dates.begin(), returns.dates.begin() + end);
      in_window.returns.assign(returns.returns.begin(),
                               returns.returns.begin() + end);
      in_window.losses.assign(returns.losses.begin(),
                              returns.losses.begin() + end);
      auto points =
          forecast::forecast_series(params, in_window, test_begin, mc, jobs);
      for (auto& p : points) {
        fc.dates.push_back(std::move(p.date));
        fc.values.push_back(p.value);
      }
    } else {
      fc = forecast_benchmark(config, returns, test_begin, test_len, model_id,
                              nullptr, jobs);
    }

    const std::string rel = "forecasts/" + model_id + ".csv";
    atomic_write_file(out_path(config, rel),
                      forecasts_to_csv(fc, model_id, config.alpha));
    manifest.artifacts["forecasts"][model_id] = rel;
    timer.stop();
    save_manifest(config, manifest);
    std::printf("%s: %zu forecasts written\n", model_id.c_str(), fc.size());
  }
}

void cmd_backtest(const ExperimentConfig& config, bool svg) {
  config.validate();
  RunManifest manifest = load_or_init_manifest(config);
  StageTimer timer(manifest, "backtest");

  series::ReturnSeries returns = load_returns(config);
  auto parts = series::split(returns, split_spec(config));
  backtest::DatedSeries losses{parts.test.dates, parts.test.losses};

  std::string summary = backtest::report_csv_header() + "\n";
  std::string correlations = "model,pearson_r\n";
  backtest::RollingVolSeries vol;
  if (losses.size() >= kVolatilityWindow) {
    vol = backtest::rolling_volatility(losses, kVolatilityWindow);
  }

  std::vector<ChartSeries> chart{{"loss", losses.values}};
  std::string plotdata_header = "date,loss";
  std::vector<backtest::DatedSeries> all_forecasts;

  for (const auto& model_id : config.models) {
    const std::string rel = "forecasts/" + model_id + ".csv";
    const std::string path = out_path(config, rel);
    if (!fs::exists(path)) {
      throw DataError("no forecasts for model '" + model_id + "'; run "
                      "`forecast` first");
    }
    auto fc = forecasts_from_csv(read_text_file(path));
    auto report = backtest::run_backtest(model_id, losses, fc, config.alpha,
                                         kSignificance);
    const std::string rrel = "reports/" + model_id + ".json";
    atomic_write_file(out_path(config, rrel),
                      backtest::report_to_json(report));
    manifest.artifacts["reports"][model_id] = rrel;
    summary += backtest::report_csv_row(report) + "\n";

    // Reactivity: contemporaneous correlation with the d=5 rolling
    // volatility (defined from the window-th test day on).
    if (vol.values.empty()) {
      correlations += model_id + ",nan\n";
    } else {
      std::vector<double> aligned(fc.values.begin() + (kVolatilityWindow - 1),
                                  fc.values.end());
      try {
        double r = backtest::pearson_correlation(vol.values, aligned);
        correlations += model_id + "," + format_double(r) + "\n";
      } catch (const DataError&) {
        correlations += model_id + ",nan\n";
      }
    }

    chart.push_back({model_id, fc.values});
    plotdata_header += "," + model_id;
    all_forecasts.push_back(std::move(fc));
  }

  std::string plotdata = plotdata_header + "\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    plotdata += losses.dates[i] + "," + format_double(losses.values[i]);
    for (const auto& fc : all_forecasts) {
      plotdata += "," + format_double(fc.values[i]);
    }
    plotdata += "\n";
  }

  atomic_write_file(out_path(config, "reports/summary.csv"), summary);
  atomic_write_file(out_path(config, "reports/volatility_correlation.csv"),
                    correlations);
  atomic_write_file(out_path(config, "reports/plotdata.csv"), plotdata);
  manifest.artifacts["summary_csv"] = "reports/summary.csv";
  manifest.artifacts["correlation_csv"] = "reports/volatility_correlation.csv";
  manifest.artifacts["plotdata_csv"] = "reports/plotdata.csv";
  if (svg) {
    atomic_write_file(
        out_path(config, "reports/forecasts.svg"),
        render_line_chart("VaR forecasts vs ex-post losses", chart));
    manifest.artifacts["chart_svg"] = "reports/forecasts.svg";
  }
  timer.stop();
  save_manifest(config, manifest);
  std::printf("backtest: %zu models evaluated over %zu days\n",
              config.models.size(), losses.size());
}

namespace {

void require_artifact(const ExperimentConfig& config, const std::string& rel) {
  const std::string path = out_path(config, rel);
  if (!fs::exists(path)) {
    throw DataError("manifest references missing artifact: " + rel);
  }
}

void walk_artifacts(const ExperimentConfig& config, const nlohmann::json& node) {
  if (node.is_string()) {
    require_artifact(config, node.get<std::string>());
  } else if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      (void)key;
      walk_artifacts(config, value);
    }
  }
}

}  // namespace

void cmd_report(const ExperimentConfig& config) {
  config.validate();
  RunManifest manifest = load_manifest(config);
  walk_artifacts(config, manifest.artifacts);

  // Schema validation of the typed artifacts.
  if (manifest.artifacts.contains("returns")) {
    returns_from_csv(read_text_file(
        out_path(config, manifest.artifacts["returns"].get<std::string>())));
  }
  if (manifest.artifacts.contains("models")) {
    for (const auto& [model_id, entry] : manifest.artifacts["models"].items()) {
      if (entry.is_object() && entry.contains("weights")) {
        nn::params_from_json(read_text_file(
            out_path(config, entry["weights"].get<std::string>())));
      }
      (void)model_id;
    }
  }
  std::vector<backtest::BacktestReport> reports;
  if (manifest.artifacts.contains("forecasts")) {
    for (const auto& [model_id, rel] : manifest.artifacts["forecasts"].items()) {
      forecasts_from_csv(read_text_file(
          out_path(config, rel.get<std::string>())));
      (void)model_id;
    }
  }
  if (manifest.artifacts.contains("reports")) {
    for (const auto& model_id : config.models) {
      if (manifest.artifacts["reports"].contains(model_id)) {
        reports.push_back(backtest::report_from_json(read_text_file(out_path(
            config,
            manifest.artifacts["reports"][model_id].get<std::string>()))));
      }
    }
  }

  std::string md;
  md += "# Run report\n\n";
  md += "- engine: varcast " + manifest.engine_version + "\n";
  md += "- config hash: `" + manifest.hash + "`\n";
  md += "- source: " + manifest.config.value("source", std::string("?")) +
        "\n";
  md += "- evaluation window: " +
        manifest.config.value("eval_start", std::string("?")) + " .. " +
        manifest.config.value("eval_end", std::string("?")) + "\n";
  md += "- alpha: " + format_double(manifest.config.value("alpha", 0.0)) +
        "\n\n";

  if (!reports.empty()) {
    md += "## Backtest (5% significance)\n\n";
    md += "| model | overshoots | UC p | Ind p | CC p | UC | Ind | CC |\n";
    md += "|---|---|---|---|---|---|---|---|\n";
    char row[256];
    for (const auto& r : reports) {
      std::snprintf(row, sizeof(row),
                    "| %s | %.3f%% | %.3f | %.3f | %.3f | %s | %s | %s |\n",
                    r.model_id.c_str(), r.overshoot * 100.0, r.p_pof,
                    r.p_independence, r.p_cc, r.pass_pof ? "pass" : "fail",
                    r.pass_independence ? "pass" : "fail",
                    r.pass_cc ? "pass" : "fail");
      md += row;
    }
    md += "\n";
  }

  md += "## Timings\n\n";
  for (const auto& [stage, ms] : manifest.timings_ms.items()) {
    md += "- " + stage + ": " + std::to_string(ms.get<long long>()) + " ms\n";
  }
  md += "\n## Configuration\n\n```json\n" + manifest.config.dump(2) +
        "\n```\n";

  atomic_write_file(out_path(config, "report.md"), md);
  std::printf("report.md written under %s\n", config.output_dir.c_str());
}

}  // namespace varcast::harness
