#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace varcast::series {

/// Calendar label "YYYY-MM-DD". ISO-8601 strings order lexicographically,
/// so plain string comparison is the date comparison; no trading-calendar
/// arithmetic happens anywhere in the engine.
using Date = std::string;

/// Throws DataError unless d is a well-formed ISO date.
void validate_date(const Date& d);

/// Daily closing prices with per-entry missing flags.
/// Invariants: dates strictly increasing, prices positive where present.
struct PriceSeries {
  std::vector<Date> dates;
  std::vector<double> prices;
  std::vector<bool> missing;

  std::size_t size() const { return dates.size(); }
};

/// Daily discrete returns and their negatives (losses), one shorter than the
/// price series they came from. losses[i] == -returns[i] exactly.
struct ReturnSeries {
  std::vector<Date> dates;  // date of the later price of each return
  std::vector<double> returns;
  std::vector<double> losses;

  std::size_t size() const { return dates.size(); }
};

struct SplitSpec {
  Date eval_start;
  Date eval_end;
  double train_fraction = 0.9;
};

/// Ordered, exact partition of a return series around an evaluation window.
/// Observations after eval_end are dropped but counted so the partition
/// bookkeeping stays checkable.
struct SplitResult {
  ReturnSeries train;
  ReturnSeries validation;
  ReturnSeries test;
  std::size_t dropped_after_eval = 0;
};

/// Supervised pairs: each input window of `lookback` consecutive returns
/// immediately precedes its target return.
struct WindowedDataset {
  std::size_t lookback = 0;
  std::vector<std::vector<double>> windows;
  std::vector<double> targets;
  std::vector<Date> target_dates;

  std::size_t size() const { return targets.size(); }
};

/// Parses CSV text with header `date,close`; empty or "NA" close marks a
/// missing entry. Throws DataError on malformed rows (with line number),
/// duplicate or non-increasing dates, and empty input.
PriceSeries parse_price_csv(const std::string& text);

/// Reads `source` and parses it: an http:// URL is fetched with a plain GET,
/// anything else is treated as a local file path.
PriceSeries ingest(const std::string& source);

/// Fraction of entries flagged missing.
double missing_fraction(const PriceSeries& series);

/// Fills every missing run linearly between its nearest present neighbors.
/// Present values are untouched; a missing first or last entry is an error.
PriceSeries interpolate_missing(const PriceSeries& series);

/// returns[i] = (P[i+1] - P[i]) / P[i]; requires a gap-free series of
/// at least two prices.
ReturnSeries to_returns(const PriceSeries& series);

/// test = observations in [eval_start, eval_end]; everything before
/// eval_start splits train/validation by train_fraction (train first).
SplitResult split(const ReturnSeries& series, const SplitSpec& spec);

/// One (window, target) pair per feasible position; requires size > lookback.
WindowedDataset rolling_windows(const ReturnSeries& series,
                                std::size_t lookback);

/// Mean and population (1/T) standard deviation.
struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;
};
SampleStats sample_stats(const std::vector<double>& values);

}  // namespace varcast::series
