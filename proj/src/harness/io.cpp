#include "varcast/harness/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "varcast/errors.hpp"

namespace varcast::harness {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what,
                    std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError(std::string(what) + " csv line " +
                    std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string returns_to_csv(const series::ReturnSeries& series) {
  std::string out = "date,return,loss\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += series.dates[i];
    out += ',';
    out += format_double(series.returns[i]);
    out += ',';
    out += format_double(series.losses[i]);
    out += '\n';
  }
  return out;
}

series::ReturnSeries returns_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_fields(line) !=
      std::vector<std::string>{"date", "return", "loss"}) {
    throw DataError("returns csv: expected header 'date,return,loss'");
  }
  series::ReturnSeries out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw DataError("returns csv line " + std::to_string(line_no) +
                      ": expected 3 fields");
    }
    series::validate_date(fields[0]);
    out.dates.push_back(fields[0]);
    out.returns.push_back(parse_double(fields[1], "returns", line_no));
    out.losses.push_back(parse_double(fields[2], "returns", line_no));
  }
  if (out.size() == 0) throw DataError("returns csv: no rows");
  return out;
}

std::string forecasts_to_csv(const backtest::DatedSeries& forecasts,
                             const std::string& model_id, double alpha) {
  std::string alpha_str = format_double(alpha);
  std::string out = "date,var_forecast,model_id,alpha\n";
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    out += forecasts.dates[i];
    out += ',';
    out += format_double(forecasts.values[i]);
    out += ',';
    out += model_id;
    out += ',';
    out += alpha_str;
    out += '\n';
  }
  return out;
}

backtest::DatedSeries forecasts_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      split_fields(line) != std::vector<std::string>{"date", "var_forecast",
                                                     "model_id", "alpha"}) {
    throw DataError("forecast csv: expected header "
                    "'date,var_forecast,model_id,alpha'");
  }
  backtest::DatedSeries out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw DataError("forecast csv line " + std::to_string(line_no) +
                      ": expected 4 fields");
    }
    series::validate_date(fields[0]);
    out.dates.push_back(fields[0]);
    out.values.push_back(parse_double(fields[1], "forecast", line_no));
  }
  if (out.size() == 0) throw DataError("forecast csv: no rows");
  return out;
}

}  // namespace varcast::harness
