#pragma once

#include <string>
#include <vector>

#include "varcast/backtest.hpp"
#include "varcast/series.hpp"

namespace varcast::harness {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

std::string read_text_file(const std::string& path);

/// Write-temp-then-rename so concurrent readers never see partial files.
void atomic_write_file(const std::string& path, const std::string& content);

/// returns.csv: header `date,return,loss`, one row per return.
std::string returns_to_csv(const series::ReturnSeries& series);
series::ReturnSeries returns_from_csv(const std::string& text);

/// Forecast CSV: header `date,var_forecast,model_id,alpha`.
std::string forecasts_to_csv(const backtest::DatedSeries& forecasts,
                             const std::string& model_id, double alpha);
backtest::DatedSeries forecasts_from_csv(const std::string& text);

}  // namespace varcast::harness
