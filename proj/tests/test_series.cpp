#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "varcast/errors.hpp"
#include "varcast/series.hpp"

using namespace varcast;

namespace {

series::PriceSeries make_prices(const std::vector<double>& values,
                                const std::vector<bool>& missing = {}) {
  series::PriceSeries out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "2020-%02zu-%02zu", i / 28 + 1, i % 28 + 1);
    out.dates.emplace_back(buf);
    out.prices.push_back(values[i]);
    out.missing.push_back(missing.empty() ? false : bool(missing[i]));
  }
  return out;
}

series::ReturnSeries make_returns(const std::vector<double>& returns) {
  series::ReturnSeries out;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04zu-%02zu-%02zu", 2015 + i / 336,
                  (i / 28) % 12 + 1, i % 28 + 1);
    out.dates.emplace_back(buf);
    out.returns.push_back(returns[i]);
    out.losses.push_back(-returns[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("parse_price_csv happy path and missing markers") {
  auto s = series::parse_price_csv(
      "date,close\n2020-01-02,100.0\n2020-01-03,101.0\n");
  REQUIRE(s.size() == 2);
  CHECK(s.dates[0] == "2020-01-02");
  CHECK(s.prices[1] == doctest::Approx(101.0));
  CHECK_FALSE(s.missing[0]);

  auto with_gap = series::parse_price_csv(
      "date,close\n2020-01-02,100.0\n2020-01-03,\n2020-01-06,NA\n"
      "2020-01-07,102\n");
  CHECK(with_gap.missing == std::vector<bool>{false, true, true, false});
  CHECK(series::missing_fraction(with_gap) == doctest::Approx(0.5));

  // CRLF input parses identically.
  auto crlf = series::parse_price_csv(
      "date,close\r\n2020-01-02,100.0\r\n2020-01-03,101.0\r\n");
  CHECK(crlf.size() == 2);
}

TEST_CASE("parse_price_csv rejections") {
  CHECK_THROWS_WITH_AS(series::parse_price_csv(""),
                       doctest::Contains("empty input"), DataError);
  CHECK_THROWS_WITH_AS(series::parse_price_csv("date,close\n"),
                       doctest::Contains("empty input"), DataError);
  // duplicate date, with line number
  CHECK_THROWS_WITH_AS(
      series::parse_price_csv(
          "date,close\n2020-01-03,100\n2020-01-03,101\n"),
      doctest::Contains("line 3"), DataError);
  // decreasing dates
  CHECK_THROWS_WITH_AS(
      series::parse_price_csv(
          "date,close\n2020-01-05,100\n2020-01-03,101\n"),
      doctest::Contains("not increasing"), DataError);
  // malformed rows
  CHECK_THROWS_WITH_AS(series::parse_price_csv("date,close\ngarbage\n"),
                       doctest::Contains("line 2"), DataError);
  CHECK_THROWS_WITH_AS(
      series::parse_price_csv("date,close\n2020-01-03,12x\n"),
      doctest::Contains("invalid close"), DataError);
  CHECK_THROWS_WITH_AS(
      series::parse_price_csv("date,close\n2020-01-03,-5\n"),
      doctest::Contains("invalid close"), DataError);
  CHECK_THROWS_WITH_AS(
      series::parse_price_csv("date,close\n20-01-03,5\n"),
      doctest::Contains("invalid ISO-8601"), DataError);
}

TEST_CASE("ingest reads local files and errors on absent ones") {
  test_support::TempDir dir("series_ingest");
  test_support::write_file(dir.file("px.csv"),
                           "date,close\n2020-01-02,100\n2020-01-03,110\n");
  auto s = series::ingest(dir.file("px.csv"));
  CHECK(s.size() == 2);
  CHECK_THROWS_AS(series::ingest(dir.file("nope.csv")), IoError);
  CHECK_THROWS_AS(series::ingest("https://example.com/px.csv"), IoError);
}

TEST_CASE("interpolate_missing fills gaps linearly") {
  auto one_gap = series::interpolate_missing(
      make_prices({100, 0, 102}, {false, true, false}));
  CHECK(one_gap.prices == std::vector<double>{100, 101, 102});

  auto run_gap = series::interpolate_missing(
      make_prices({100, 0, 0, 106}, {false, true, true, false}));
  CHECK(run_gap.prices == std::vector<double>{100, 102, 104, 106});
  for (bool m : run_gap.missing) CHECK_FALSE(m);

  CHECK_THROWS_WITH_AS(
      series::interpolate_missing(
          make_prices({0, 100, 101}, {true, false, false})),
      doctest::Contains("boundary gap"), DataError);
  CHECK_THROWS_WITH_AS(
      series::interpolate_missing(
          make_prices({100, 101, 0}, {false, false, true})),
      doctest::Contains("boundary gap"), DataError);
}

TEST_CASE("interpolate_missing is idempotent on gap-free series") {
  auto s = make_prices({100, 101, 99, 104});
  auto once = series::interpolate_missing(s);
  auto twice = series::interpolate_missing(once);
  CHECK(once.prices == twice.prices);
  CHECK(once.prices == s.prices);
}

TEST_CASE("to_returns formula and errors") {
  auto up = series::to_returns(make_prices({100, 110}));
  CHECK(up.returns[0] == doctest::Approx(0.10).epsilon(1e-15));
  CHECK(up.losses[0] == doctest::Approx(-0.10).epsilon(1e-15));

  auto down = series::to_returns(make_prices({100, 95}));
  CHECK(down.returns[0] == doctest::Approx(-0.05).epsilon(1e-15));
  CHECK(down.losses[0] == doctest::Approx(0.05).epsilon(1e-15));

  auto flat = series::to_returns(make_prices({100, 100, 100}));
  CHECK(flat.returns == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(series::to_returns(make_prices({100})), DataError);
  CHECK_THROWS_AS(
      series::to_returns(make_prices({100, 0, 102}, {false, true, false})),
      DataError);
}

TEST_CASE("returns reconstruct prices within 1e-12 relative") {
  std::vector<double> prices;
  double p = 250.0;
  for (int i = 0; i < 300; ++i) {
    p *= 1.0 + 0.02 * std::sin(i * 0.7) - 0.001;
    prices.push_back(p);
  }
  auto ps = make_prices(prices);
  auto rs = series::to_returns(ps);
  double rebuilt = prices[0];
  for (std::size_t i = 0; i < rs.size(); ++i) {
    rebuilt *= 1.0 + rs.returns[i];
    CHECK(std::fabs(rebuilt - prices[i + 1]) <= 1e-12 * prices[i + 1]);
  }
}

TEST_CASE("split partitions train/validation/test") {
  // 1000 returns, last 100 dated inside the eval window.
  auto rs = make_returns(std::vector<double>(1000, 0.001));
  series::SplitSpec spec{rs.dates[900], rs.dates[999], 0.9};
  auto parts = series::split(rs, spec);
  CHECK(parts.train.size() == 810);
  CHECK(parts.validation.size() == 90);
  CHECK(parts.test.size() == 100);
  CHECK(parts.dropped_after_eval == 0);
  CHECK(parts.train.size() + parts.validation.size() + parts.test.size() +
            parts.dropped_after_eval ==
        rs.size());
  // Ordered, exact partition.
  CHECK(parts.train.dates.front() == rs.dates.front());
  CHECK(parts.validation.dates.front() == rs.dates[810]);
  CHECK(parts.test.dates.back() == rs.dates.back());
}

TEST_CASE("split drops and counts observations after eval_end") {
  auto rs = make_returns(std::vector<double>(500, 0.001));
  series::SplitSpec spec{rs.dates[400], rs.dates[449], 0.9};
  auto parts = series::split(rs, spec);
  CHECK(parts.test.size() == 50);
  CHECK(parts.dropped_after_eval == 50);
  CHECK(parts.train.size() + parts.validation.size() + parts.test.size() +
            parts.dropped_after_eval ==
        rs.size());
}

TEST_CASE("split error cases") {
  auto rs = make_returns(std::vector<double>(100, 0.001));
  // window over the whole series -> no training data
  CHECK_THROWS_AS(
      series::split(rs, {rs.dates.front(), rs.dates.back(), 0.9}), DataError);
  // window outside the series
  CHECK_THROWS_AS(series::split(rs, {"2030-01-01", "2030-12-31", 0.9}),
                  DataError);
  CHECK_THROWS_AS(series::split(rs, {"2020-02-01", "2020-01-01", 0.9}),
                  DataError);
  CHECK_THROWS_AS(series::split(rs, {rs.dates[50], rs.dates[60], 1.5}),
                  DataError);
}

TEST_CASE("rolling_windows counting and contiguity") {
  auto rs12 = make_returns({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  auto w = series::rolling_windows(rs12, 10);
  REQUIRE(w.size() == 2);
  CHECK(w.windows[0] == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(w.targets[0] == 11);
  CHECK(w.windows[1] == std::vector<double>{2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  CHECK(w.targets[1] == 12);
  CHECK(w.target_dates[1] == rs12.dates[11]);

  auto rs251 = make_returns(std::vector<double>(251, 0.5));
  CHECK(series::rolling_windows(rs251, 250).size() == 1);

  auto rs10 = make_returns(std::vector<double>(10, 0.5));
  CHECK_THROWS_AS(series::rolling_windows(rs10, 10), DataError);
}

TEST_CASE("window targets concatenate to the series tail") {
  std::vector<double> vals;
  for (int i = 0; i < 40; ++i) vals.push_back(std::cos(i * 1.3));
  auto rs = make_returns(vals);
  for (std::size_t d : {1u, 5u, 17u}) {
    auto w = series::rolling_windows(rs, d);
    REQUIRE(w.size() == rs.size() - d);
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(w.targets[i] == rs.returns[d + i]);
      CHECK(w.windows[i].back() == rs.returns[d + i - 1]);
    }
  }
}

TEST_CASE("sample_stats population convention") {
  auto s = series::sample_stats({1.0, 2.0, 3.0});
  CHECK(s.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.stddev == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));

  auto flat = series::sample_stats({5.0, 5.0, 5.0, 5.0});
  CHECK(flat.stddev == 0.0);

  auto sym = series::sample_stats({0.01, -0.01});
  CHECK(sym.mean == doctest::Approx(0.0));
  CHECK(sym.stddev == doctest::Approx(0.01).epsilon(1e-15));

  CHECK_THROWS_AS(series::sample_stats({}), DataError);
}
