#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "varcast/series.hpp"

namespace varcast::backtest {

/// Generic dated value series used for ex-post losses and VaR forecasts.
struct DatedSeries {
  std::vector<series::Date> dates;
  std::vector<double> values;

  std::size_t size() const { return dates.size(); }
};

/// Breach indicators: 1 where the realized loss strictly exceeds the
/// forecast, 0 otherwise (ties are no breach).
struct IndicatorSeries {
  std::vector<series::Date> dates;
  std::vector<int> values;

  std::size_t size() const { return values.size(); }
  std::size_t breaches() const;
};

IndicatorSeries indicator_series(const DatedSeries& losses,
                                 const DatedSeries& forecasts);

/// Kupiec proportion-of-failures likelihood ratio:
///   LR = 2 [ (T-I) ln((1-ahat)/alpha) + I ln(ahat/(1-alpha)) ]
/// with 0 ln 0 := 0; asymptotically chi-square(1).
struct PofResult {
  double lr = 0.0;
  double p_value = 1.0;
};
PofResult pof_test(const IndicatorSeries& ind, double alpha);

/// Christoffersen interval-forecast independence test from consecutive-day
/// transition counts. Degenerate patterns (no breaches, or no pair starting
/// with a breach) return LR = 0, p = 1.
struct IndependenceResult {
  double lr = 0.0;
  double p_value = 1.0;
  long n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};
IndependenceResult independence_test(const IndicatorSeries& ind);

/// Joint conditional-coverage test: LR_CC = LR_POF + LR_I, chi-square(2),
/// so p = exp(-LR_CC / 2) exactly.
struct CcResult {
  double lr = 0.0;
  double p_value = 1.0;
};
CcResult cc_test(double lr_pof, double lr_independence);

/// Trailing-window sample standard deviation (1/(d-1)) of losses; defined
/// from index d-1 on, dated by window end.
struct RollingVolSeries {
  std::vector<series::Date> dates;
  std::size_t window = 0;
  std::vector<double> values;
};
RollingVolSeries rolling_volatility(const DatedSeries& losses,
                                    std::size_t window);

/// Pearson r; throws DataError for length < 2, length mismatch or a
/// constant input.
double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b);

struct BacktestReport {
  std::string model_id;
  std::size_t observations = 0;
  std::size_t breaches = 0;
  double overshoot = 0.0;  // breaches / T
  long n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  double lr_pof = 0.0, lr_independence = 0.0, lr_cc = 0.0;
  double p_pof = 1.0, p_independence = 1.0, p_cc = 1.0;
  double significance = 0.05;
  bool pass_pof = true, pass_independence = true, pass_cc = true;
  bool negative_forecasts = false;  // any VaR below zero, reported as-is
};

/// Composes the indicator series and the three tests; pass flags compare
/// p-values against `significance`.
BacktestReport run_backtest(const std::string& model_id,
                            const DatedSeries& losses,
                            const DatedSeries& forecasts, double alpha,
                            double significance = 0.05);

/// JSON document with every report field.
std::string report_to_json(const BacktestReport& report);
BacktestReport report_from_json(const std::string& text);

/// CSV row shaped like the result tables: model, overshoot %, UC/Ind/CC
/// p-values.
std::string report_csv_header();
std::string report_csv_row(const BacktestReport& report);

}  // namespace varcast::backtest
