#include "varcast/series.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "varcast/errors.hpp"

#include <httplib.h>

namespace varcast::series {

namespace {

bool all_digits(const std::string& s) {
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return !s.empty();
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string fetch_http(const std::string& url) {
  auto path_start = url.find('/', url.find("//") + 2);
  std::string host = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/"
                                                     : url.substr(path_start);
  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto res = client.Get(path);
  if (!res) {
    throw IoError("source not found: GET " + url + " failed (" +
                  httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw IoError("source not found: GET " + url + " returned status " +
                  std::to_string(res->status));
  }
  return res->body;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("source not found: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

void validate_date(const Date& d) {
  bool ok = d.size() == 10 && d[4] == '-' && d[7] == '-' &&
            all_digits(d.substr(0, 4)) && all_digits(d.substr(5, 2)) &&
            all_digits(d.substr(8, 2));
  if (ok) {
    int month = std::stoi(d.substr(5, 2));
    int day = std::stoi(d.substr(8, 2));
    ok = month >= 1 && month <= 12 && day >= 1 && day <= 31;
  }
  if (!ok) throw DataError("invalid ISO-8601 date: '" + d + "'");
}

PriceSeries parse_price_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: no CSV header");
  line = strip_cr(line);
  if (line != "date,close") {
    throw DataError("line 1: expected header 'date,close', got '" + line +
                    "'");
  }

  PriceSeries out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected 'date,close', got '" + line + "'");
    }
    Date date = line.substr(0, comma);
    std::string close = line.substr(comma + 1);
    try {
      validate_date(date);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!out.dates.empty()) {
      if (date == out.dates.back()) {
        throw DataError("line " + std::to_string(line_no) +
                        ": duplicate date " + date);
      }
      if (date < out.dates.back()) {
        throw DataError("line " + std::to_string(line_no) +
                        ": dates not increasing (" + date + " after " +
                        out.dates.back() + ")");
      }
    }

    bool missing = close.empty() || close == "NA";
    double price = 0.0;
    if (!missing) {
      std::size_t used = 0;
      try {
        price = std::stod(close, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != close.size() || !std::isfinite(price) || price <= 0.0) {
        throw DataError("line " + std::to_string(line_no) +
                        ": invalid close '" + close + "'");
      }
    }
    out.dates.push_back(std::move(date));
    out.prices.push_back(price);
    out.missing.push_back(missing);
  }
  if (out.dates.empty()) throw DataError("empty input: no data rows");
  return out;
}

PriceSeries ingest(const std::string& source) {
  if (source.rfind("http://", 0) == 0) {
    return parse_price_csv(fetch_http(source));
  }
  if (source.rfind("https://", 0) == 0) {
    throw IoError("https sources are not supported; use http or a local file");
  }
  return parse_price_csv(read_file(source));
}

double missing_fraction(const PriceSeries& series) {
  if (series.size() == 0) return 0.0;
  std::size_t n = 0;
  for (bool m : series.missing) n += m ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(series.size());
}

PriceSeries interpolate_missing(const PriceSeries& series) {
  if (series.size() == 0) throw DataError("empty price series");
  if (series.missing.front()) {
    throw DataError("boundary gap: first entry (" + series.dates.front() +
                    ") is missing");
  }
  if (series.missing.back()) {
    throw DataError("boundary gap: last entry (" + series.dates.back() +
                    ") is missing");
  }

  PriceSeries out = series;
  std::size_t i = 0;
  while (i < out.size()) {
    if (!out.missing[i]) {
      ++i;
      continue;
    }
    std::size_t run_start = i;
    while (out.missing[i]) ++i;  // last entry is present, so this terminates
    std::size_t left = run_start - 1;
    std::size_t right = i;
    double lo = out.prices[left];
    double hi = out.prices[right];
    double span = static_cast<double>(right - left);
    for (std::size_t j = run_start; j < right; ++j) {
      double w = static_cast<double>(j - left) / span;
      out.prices[j] = lo + (hi - lo) * w;
      out.missing[j] = false;
    }
  }
  return out;
}

ReturnSeries to_returns(const PriceSeries& series) {
  if (series.size() < 2) {
    throw DataError("insufficient data: need at least 2 prices, have " +
                    std::to_string(series.size()));
  }
  for (bool m : series.missing) {
    if (m) throw DataError("price series still has gaps; interpolate first");
  }
  ReturnSeries out;
  out.dates.assign(series.dates.begin() + 1, series.dates.end());
  out.returns.resize(series.size() - 1);
  out.losses.resize(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    out.returns[i] = (series.prices[i + 1] - series.prices[i]) /
                     series.prices[i];
    out.losses[i] = -out.returns[i];
  }
  return out;
}

namespace {

ReturnSeries slice(const ReturnSeries& s, std::size_t begin, std::size_t end) {
  ReturnSeries out;
  out.dates.assign(s.dates.begin() + begin, s.dates.begin() + end);
  out.returns.assign(s.returns.begin() + begin, s.returns.begin() + end);
  out.losses.assign(s.losses.begin() + begin, s.losses.begin() + end);
  return out;
}

}  // namespace

SplitResult split(const ReturnSeries& series, const SplitSpec& spec) {
  validate_date(spec.eval_start);
  validate_date(spec.eval_end);
  if (!(spec.eval_start < spec.eval_end)) {
    throw DataError("eval_start must precede eval_end");
  }
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw DataError("train_fraction must lie in (0,1)");
  }

  std::size_t eval_begin = 0;
  while (eval_begin < series.size() && series.dates[eval_begin] < spec.eval_start) {
    ++eval_begin;
  }
  std::size_t eval_end = eval_begin;
  while (eval_end < series.size() && series.dates[eval_end] <= spec.eval_end) {
    ++eval_end;
  }
  if (eval_begin == eval_end) {
    throw DataError("evaluation window [" + spec.eval_start + ", " +
                    spec.eval_end + "] contains no observations");
  }

  std::size_t pre = eval_begin;
  std::size_t train_len =
      static_cast<std::size_t>(spec.train_fraction * static_cast<double>(pre) +
                               1e-9);
  if (train_len == 0) {
    throw DataError("evaluation window leaves no training data");
  }

  SplitResult out;
  out.train = slice(series, 0, train_len);
  out.validation = slice(series, train_len, pre);
  out.test = slice(series, eval_begin, eval_end);
  out.dropped_after_eval = series.size() - eval_end;
  return out;
}

WindowedDataset rolling_windows(const ReturnSeries& series,
                                std::size_t lookback) {
  if (lookback == 0) throw DataError("lookback must be positive");
  if (series.size() <= lookback) {
    throw DataError("insufficient data: need more than " +
                    std::to_string(lookback) + " returns, have " +
                    std::to_string(series.size()));
  }
  WindowedDataset out;
  out.lookback = lookback;
  const std::size_t pairs = series.size() - lookback;
  out.windows.reserve(pairs);
  out.targets.reserve(pairs);
  out.target_dates.reserve(pairs);
  for (std::size_t t = 0; t < pairs; ++t) {
    out.windows.emplace_back(series.returns.begin() + t,
                             series.returns.begin() + t + lookback);
    out.targets.push_back(series.returns[t + lookback]);
    out.target_dates.push_back(series.dates[t + lookback]);
  }
  return out;
}

SampleStats sample_stats(const std::vector<double>& values) {
  if (values.empty()) throw DataError("sample_stats: empty input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

}  // namespace varcast::series
