#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "test_support.hpp"
#include "varcast/errors.hpp"
#include "varcast/garch.hpp"
#include "varcast/harness/config.hpp"
#include "varcast/harness/io.hpp"
#include "varcast/rng.hpp"
#include "varcast/series.hpp"

using namespace varcast;
using test_support::CliResult;
using test_support::run_cli;
using test_support::TempDir;

namespace {

const char* cli_path() { return VARCAST_CLI_PATH; }

std::string iso_date(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04zu-%02zu-%02zu", 2001 + i / 360,
                (i / 30) % 12 + 1, i % 30 + 1);
  return buf;
}

std::string synthetic_price_csv(std::size_t days, std::uint64_t seed,
                                double sigma = 0.01) {
  stats::Rng rng(seed);
  std::string csv = "date,close\n";
  double price = 100.0;
  for (std::size_t i = 0; i < days; ++i) {
    csv += iso_date(i) + "," + harness::format_double(price) + "\n";
    price *= 1.0 + sigma * rng.next_normal();
  }
  return csv;
}

nlohmann::json base_config(const TempDir& dir, const std::string& csv_name,
                           std::size_t n_prices, std::size_t eval_days) {
  // Returns are indexed 1..n_prices-1 by price date; the eval window covers
  // the last eval_days of them.
  return nlohmann::json{
      {"source", dir.file(csv_name)},
      {"eval_start", iso_date(n_prices - eval_days)},
      {"eval_end", iso_date(n_prices - 1)},
      {"alpha", 0.99},
      {"benchmark_window", 100},
      {"lookback", 10},
      {"models", {"hs", "cmm"}},
      {"mc_samples", 2000},
      {"seed", 42},
      {"output_dir", dir.file("out")}};
}

std::string write_config(const TempDir& dir, const nlohmann::json& cfg,
                         const std::string& name = "config.json") {
  test_support::write_file(dir.file(name), cfg.dump(2));
  return dir.file(name);
}

}  // namespace

TEST_CASE("config loading, defaults and validation") {
  TempDir dir("cfg");
  nlohmann::json doc{{"source", "x.csv"},
                     {"eval_start", "2017-01-01"},
                     {"eval_end", "2018-12-31"}};
  auto path = write_config(dir, doc);
  auto cfg = harness::load_config(path);
  CHECK(cfg.alpha == 0.99);
  CHECK(cfg.benchmark_window == 250);
  CHECK(cfg.lookback == 10);
  CHECK(cfg.models.size() == 6);
  CHECK(cfg.mc_samples == 100000);
  CHECK(cfg.train_fraction == doctest::Approx(0.9));

  doc["models"] = {"hs", "frobnicator"};
  CHECK_THROWS_AS(harness::config_from_json(doc), UsageError);
  doc["models"] = {"hs"};
  doc["alpha"] = 1.5;
  CHECK_THROWS_AS(harness::config_from_json(doc), UsageError);
  doc.erase("alpha");
  doc.erase("source");
  CHECK_THROWS_AS(harness::config_from_json(doc), UsageError);
  CHECK_THROWS_AS(harness::load_config(dir.file("absent.json")), IoError);
}

TEST_CASE("config hash tracks semantic fields only") {
  TempDir dir("cfg_hash");
  auto cfg = harness::config_from_json(base_config(dir, "a.csv", 400, 50));
  auto h0 = harness::config_hash(cfg);

  auto moved = cfg;
  moved.output_dir = dir.file("elsewhere");
  CHECK(harness::config_hash(moved) == h0);

  auto re_alpha = cfg;
  re_alpha.alpha = 0.95;
  CHECK(harness::config_hash(re_alpha) != h0);
  auto re_seed = cfg;
  re_seed.seed = 43;
  CHECK(harness::config_hash(re_seed) != h0);
  auto re_models = cfg;
  re_models.models = {"hs"};
  CHECK(harness::config_hash(re_models) != h0);
  auto re_window = cfg;
  re_window.benchmark_window = 250;
  CHECK(harness::config_hash(re_window) != h0);
}

TEST_CASE("cli usage errors exit 64") {
  CHECK(run_cli(cli_path(), "").exit_code == 64);
  CHECK(run_cli(cli_path(), "frobnicate").exit_code == 64);

  TempDir dir("cli_usage");
  test_support::write_file(dir.file("px.csv"),
                           synthetic_price_csv(400, 1));
  auto cfg = base_config(dir, "px.csv", 400, 50);
  auto path = write_config(dir, cfg);
  auto res = run_cli(cli_path(),
                     "fit --config " + path + " --model frobnicator");
  CHECK(res.exit_code == 64);
  CHECK(res.output.find("unknown model") != std::string::npos);
}

TEST_CASE("ingest writes returns and reports errors by exit code") {
  TempDir dir("ingest");
  test_support::write_file(dir.file("px.csv"), synthetic_price_csv(400, 2));
  auto path = write_config(dir, base_config(dir, "px.csv", 400, 50));

  auto ok = run_cli(cli_path(), "ingest --config " + path);
  CHECK(ok.exit_code == 0);
  auto returns = harness::returns_from_csv(
      test_support::read_file(dir.file("out/returns.csv")));
  CHECK(returns.size() == 399);

  // Missing source file -> exit 2.
  auto missing_cfg = base_config(dir, "absent.csv", 400, 50);
  missing_cfg["output_dir"] = dir.file("out_missing");
  auto missing = run_cli(cli_path(),
                         "ingest --config " + write_config(dir, missing_cfg,
                                                           "missing.json"));
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("source not found") != std::string::npos);

  // Boundary gap -> exit 3 naming the interpolation failure.
  test_support::write_file(dir.file("gap.csv"),
                           "date,close\n2020-01-02,NA\n2020-01-03,100\n"
                           "2020-01-06,101\n");
  auto gap_cfg = base_config(dir, "gap.csv", 400, 50);
  gap_cfg["output_dir"] = dir.file("out_gap");
  auto gap = run_cli(cli_path(),
                     "ingest --config " + write_config(dir, gap_cfg,
                                                       "gap.json"));
  CHECK(gap.exit_code == 3);
  CHECK(gap.output.find("boundary gap") != std::string::npos);

  // Reusing an output dir with a different config trips the hash guard.
  auto reused = base_config(dir, "gap.csv", 400, 50);
  auto guard = run_cli(cli_path(),
                       "ingest --config " + write_config(dir, reused,
                                                         "reused.json"));
  CHECK(guard.exit_code == 3);
  CHECK(guard.output.find("different config") != std::string::npos);
}

TEST_CASE("ingest warns above the missing-data threshold") {
  TempDir dir("ingest_warn");
  // 2 of 40 entries missing -> 5% > 3% threshold.
  stats::Rng rng(3);
  std::string csv = "date,close\n";
  double price = 100.0;
  for (std::size_t i = 0; i < 40; ++i) {
    bool missing = (i == 10 || i == 20);
    csv += iso_date(i) + "," +
           (missing ? "NA" : harness::format_double(price)) + "\n";
    price *= 1.0 + 0.01 * rng.next_normal();
  }
  test_support::write_file(dir.file("px.csv"), csv);
  auto cfg = base_config(dir, "px.csv", 40, 10);
  auto res = run_cli(cli_path(), "ingest --config " + write_config(dir, cfg));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("warning") != std::string::npos);
}

TEST_CASE("ingest fetches plain http sources") {
  httplib::Server server;
  const std::string payload = synthetic_price_csv(60, 4);
  server.Get("/prices.csv", [&](const httplib::Request&,
                                httplib::Response& res) {
    res.set_content(payload, "text/csv");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto url = "http://127.0.0.1:" + std::to_string(port);
  auto fetched = series::ingest(url + "/prices.csv");
  CHECK(fetched.size() == 60);
  CHECK_THROWS_AS(series::ingest(url + "/absent.csv"), IoError);

  server.stop();
  worker.join();
}

TEST_CASE("fit is deterministic per seed and records the garch choice") {
  TempDir dir("fit");
  test_support::write_file(dir.file("px.csv"), synthetic_price_csv(400, 5));
  auto cfg = base_config(dir, "px.csv", 400, 50);
  cfg["models"] = {"hs", "nnet1"};
  auto path = write_config(dir, cfg);

  REQUIRE(run_cli(cli_path(), "ingest --config " + path).exit_code == 0);
  REQUIRE(run_cli(cli_path(), "fit --config " + path + " --model nnet1")
              .exit_code == 0);
  auto weights1 =
      test_support::read_file(dir.file("out/models/nnet1.weights.json"));
  REQUIRE(run_cli(cli_path(), "fit --config " + path + " --model nnet1")
              .exit_code == 0);
  auto weights2 =
      test_support::read_file(dir.file("out/models/nnet1.weights.json"));
  CHECK(weights1 == weights2);  // byte-identical refit
  CHECK(weights1.find("lstm-mdn-params") != std::string::npos);

  // Benchmarks only echo their configuration.
  REQUIRE(run_cli(cli_path(), "fit --config " + path + " --model hs")
              .exit_code == 0);
  auto echo = nlohmann::json::parse(
      test_support::read_file(dir.file("out/models/hs.json")));
  CHECK(echo["model"] == "hs");
  CHECK(echo["window"] == 100);
}

TEST_CASE("fit selects ged innovations on fat-tailed returns") {
  TempDir dir("fit_garch");
  // Simulated GARCH returns with GED(1.2) innovations, persisted directly
  // as a returns artifact.
  models::GarchParams truth;
  truth.alpha0 = 1e-6;
  truth.alpha1 = 0.08;
  truth.beta1 = 0.88;
  truth.innovation = models::Innovation::kGed;
  truth.nu = 1.2;
  stats::Rng rng(2311);
  auto sim = models::garch_simulate(truth, 700, rng);

  nlohmann::json cfg{{"source", dir.file("unused.csv")},
                     {"eval_start", sim.dates[600]},
                     {"eval_end", sim.dates[699]},
                     {"benchmark_window", 500},
                     {"models", {"garch"}},
                     {"output_dir", dir.file("out")}};
  auto path = write_config(dir, cfg);
  test_support::write_file(dir.file("out/returns.csv"),
                           harness::returns_to_csv(sim));

  auto res = run_cli(cli_path(), "fit --config " + path + " --model garch");
  CHECK(res.exit_code == 0);
  auto doc = nlohmann::json::parse(
      test_support::read_file(dir.file("out/models/garch.json")));
  CHECK(doc["innovation"] == "ged");
  CHECK(doc["aic_ged"].get<double>() < doc["aic_normal"].get<double>());
  CHECK(doc["nu"].get<double>() < 1.7);
}

TEST_CASE("forecast and backtest produce the full artifact set") {
  TempDir dir("e2e");
  test_support::write_file(dir.file("px.csv"), synthetic_price_csv(400, 6));
  auto cfg = base_config(dir, "px.csv", 400, 50);
  cfg["models"] = {"hs", "cmm", "garch"};
  auto path = write_config(dir, cfg);

  REQUIRE(run_cli(cli_path(), "ingest --config " + path).exit_code == 0);
  REQUIRE(run_cli(cli_path(), "fit --config " + path).exit_code == 0);
  REQUIRE(run_cli(cli_path(), "forecast --config " + path).exit_code == 0);

  auto hs = harness::forecasts_from_csv(
      test_support::read_file(dir.file("out/forecasts/hs.csv")));
  auto cmm = harness::forecasts_from_csv(
      test_support::read_file(dir.file("out/forecasts/cmm.csv")));
  auto garch = harness::forecasts_from_csv(
      test_support::read_file(dir.file("out/forecasts/garch.csv")));
  CHECK(hs.size() == 50);
  CHECK(cmm.size() == 50);
  CHECK(garch.size() == 50);
  CHECK(hs.dates == cmm.dates);
  CHECK(hs.dates == garch.dates);
  for (double v : garch.values) CHECK(v > 0.0);

  REQUIRE(run_cli(cli_path(), "backtest --config " + path + " --svg")
              .exit_code == 0);
  CHECK(std::filesystem::exists(dir.file("out/reports/hs.json")));
  CHECK(std::filesystem::exists(dir.file("out/reports/cmm.json")));
  CHECK(std::filesystem::exists(dir.file("out/reports/garch.json")));
  CHECK(std::filesystem::exists(dir.file("out/reports/forecasts.svg")));

  auto summary = test_support::read_file(dir.file("out/reports/summary.csv"));
  CHECK(summary.find("model,overshoot_pct,uc_p,ind_p,cc_p") == 0);
  CHECK(summary.find("hs,") != std::string::npos);
  CHECK(summary.find("cmm,") != std::string::npos);
  CHECK(summary.find("garch,") != std::string::npos);

  auto plotdata = test_support::read_file(dir.file("out/reports/plotdata.csv"));
  CHECK(plotdata.substr(0, plotdata.find('\n')) == "date,loss,hs,cmm,garch");

  // No stray temp files from atomic writes.
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir.file("out"))) {
    CHECK(entry.path().extension() != ".tmp");
  }

  // Removing one forecast makes backtest fail, naming the model.
  std::filesystem::remove(dir.file("out/forecasts/cmm.csv"));
  auto broken = run_cli(cli_path(), "backtest --config " + path);
  CHECK(broken.exit_code == 3);
  CHECK(broken.output.find("cmm") != std::string::npos);
}

TEST_CASE("backtest recovers the 11-of-505 isolated-breach statistics") {
  TempDir dir("bt_fixture");
  // 520 return days, the last 505 form the evaluation period; 11 isolated
  // breaches against a constant 0.02 forecast.
  const std::size_t n_returns = 520, eval = 505;
  series::ReturnSeries rs;
  for (std::size_t i = 0; i < n_returns; ++i) {
    rs.dates.push_back(iso_date(i + 1));
    rs.returns.push_back(-0.001);
    rs.losses.push_back(0.001);
  }
  const std::size_t first_eval = n_returns - eval;
  for (int b = 0; b < 11; ++b) {
    std::size_t at = first_eval + 40 * (b + 1);
    rs.returns[at] = -0.05;
    rs.losses[at] = 0.05;
  }

  nlohmann::json cfg{{"source", dir.file("unused.csv")},
                     {"eval_start", rs.dates[first_eval]},
                     {"eval_end", rs.dates.back()},
                     {"models", {"hs", "cmm"}},
                     {"output_dir", dir.file("out")}};
  auto path = write_config(dir, cfg);
  test_support::write_file(dir.file("out/returns.csv"),
                           harness::returns_to_csv(rs));

  backtest::DatedSeries fc;
  fc.dates.assign(rs.dates.begin() + first_eval, rs.dates.end());
  fc.values.assign(eval, 0.02);
  test_support::write_file(dir.file("out/forecasts/hs.csv"),
                           harness::forecasts_to_csv(fc, "hs", 0.99));
  // A second model that is never breached.
  backtest::DatedSeries conservative = fc;
  conservative.values.assign(eval, 10.0);
  test_support::write_file(
      dir.file("out/forecasts/cmm.csv"),
      harness::forecasts_to_csv(conservative, "cmm", 0.99));

  REQUIRE(run_cli(cli_path(), "backtest --config " + path).exit_code == 0);
  auto report = backtest::report_from_json(
      test_support::read_file(dir.file("out/reports/hs.json")));
  CHECK(report.breaches == 11);
  CHECK(std::fabs(report.p_pof - 0.021) < 0.0015);
  CHECK(report.lr_cc ==
        doctest::Approx(report.lr_pof + report.lr_independence));
  auto zero_breach = backtest::report_from_json(
      test_support::read_file(dir.file("out/reports/cmm.json")));
  CHECK(zero_breach.breaches == 0);
  CHECK(zero_breach.p_independence == 1.0);
  CHECK(std::fabs(zero_breach.p_pof - 0.001) < 0.0008);
  auto summary = test_support::read_file(dir.file("out/reports/summary.csv"));
  CHECK(summary.find("hs,2.17821") != std::string::npos);
  CHECK(summary.find("cmm,0,") != std::string::npos);  // 0% overshoots
  auto row_start = summary.find("cmm,");
  auto fields = summary.substr(row_start, summary.find('\n', row_start) -
                                              row_start);
  CHECK(fields.find(",1,") != std::string::npos);  // Ind column exactly 1
}

TEST_CASE("truncating the series after eval_end changes no forecast") {
  TempDir dir("no_lookahead");
  // Full series: 430 prices. Truncated: the same series cut right after the
  // evaluation window (drop the last 20 prices; eval ends at index 409).
  auto full_csv = synthetic_price_csv(430, 9);
  std::string truncated_csv;
  {
    std::istringstream in(full_csv);
    std::string line;
    std::size_t kept = 0;
    while (kept < 411 && std::getline(in, line)) {  // header + 410 prices
      truncated_csv += line + "\n";
      ++kept;
    }
  }
  test_support::write_file(dir.file("full.csv"), full_csv);
  test_support::write_file(dir.file("cut.csv"), truncated_csv);

  for (const char* variant : {"full", "cut"}) {
    nlohmann::json cfg{{"source", dir.file(std::string(variant) + ".csv")},
                       {"eval_start", iso_date(360)},
                       {"eval_end", iso_date(409)},
                       {"benchmark_window", 100},
                       {"models", {"hs", "cmm", "nnet1"}},
                       {"mc_samples", 2000},
                       {"seed", 42},
                       {"output_dir", dir.file(std::string("out_") + variant)}};
    auto path = write_config(dir, cfg, std::string(variant) + ".json");
    REQUIRE(run_cli(cli_path(), "ingest --config " + path).exit_code == 0);
    REQUIRE(run_cli(cli_path(), "fit --config " + path).exit_code == 0);
    REQUIRE(run_cli(cli_path(), "forecast --config " + path).exit_code == 0);
  }
  for (const char* model : {"hs", "cmm", "nnet1"}) {
    auto full = test_support::read_file(
        dir.file(std::string("out_full/forecasts/") + model + ".csv"));
    auto cut = test_support::read_file(
        dir.file(std::string("out_cut/forecasts/") + model + ".csv"));
    CHECK(full == cut);
  }
}

TEST_CASE("report renders once per model and is idempotent") {
  TempDir dir("report");
  test_support::write_file(dir.file("px.csv"), synthetic_price_csv(400, 8));
  auto path = write_config(dir, base_config(dir, "px.csv", 400, 50));
  REQUIRE(run_cli(cli_path(), "ingest --config " + path).exit_code == 0);
  REQUIRE(run_cli(cli_path(), "fit --config " + path).exit_code == 0);
  REQUIRE(run_cli(cli_path(), "forecast --config " + path).exit_code == 0);
  REQUIRE(run_cli(cli_path(), "backtest --config " + path).exit_code == 0);

  REQUIRE(run_cli(cli_path(), "report --config " + path).exit_code == 0);
  auto first = test_support::read_file(dir.file("out/report.md"));
  std::size_t hs_rows = 0, pos = 0;
  while ((pos = first.find("| hs |", pos)) != std::string::npos) {
    ++hs_rows;
    pos += 6;
  }
  CHECK(hs_rows == 1);
  CHECK(first.find("| cmm |") != std::string::npos);
  CHECK(first.find("- ingest:") != std::string::npos);
  CHECK(first.find("- forecast.hs:") != std::string::npos);

  // Pure function of the artifacts: regenerating changes nothing.
  REQUIRE(run_cli(cli_path(), "report --config " + path).exit_code == 0);
  CHECK(test_support::read_file(dir.file("out/report.md")) == first);

  // A manifest pointing at a deleted artifact fails validation.
  std::filesystem::remove(dir.file("out/forecasts/hs.csv"));
  auto broken = run_cli(cli_path(), "report --config " + path);
  CHECK(broken.exit_code == 3);
  CHECK(broken.output.find("missing artifact") != std::string::npos);

  // A corrupt manifest is rejected.
  test_support::write_file(dir.file("out/manifest.json"), "{broken");
  CHECK(run_cli(cli_path(), "report --config " + path).exit_code == 3);
}
