#include "varcast/backtest.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "varcast/distributions.hpp"
#include "varcast/errors.hpp"

namespace varcast::backtest {

namespace {

// count * ln(x), with the 0 * ln(0) := 0 convention.
double xlog(double count, double x) {
  return count == 0.0 ? 0.0 : count * std::log(x);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::size_t IndicatorSeries::breaches() const {
  std::size_t n = 0;
  for (int v : values) n += static_cast<std::size_t>(v);
  return n;
}

IndicatorSeries indicator_series(const DatedSeries& losses,
                                 const DatedSeries& forecasts) {
  if (losses.size() != forecasts.size() || losses.size() == 0) {
    throw DataError("indicator_series: losses and forecasts must be "
                    "non-empty and equally long");
  }
  if (losses.dates != forecasts.dates) {
    throw DataError("indicator_series: date axes are not aligned");
  }
  IndicatorSeries out;
  out.dates = losses.dates;
  out.values.resize(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out.values[i] = losses.values[i] > forecasts.values[i] ? 1 : 0;
  }
  return out;
}

PofResult pof_test(const IndicatorSeries& ind, double alpha) {
  if (ind.size() == 0) throw DataError("pof_test: empty indicator series");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("pof_test: alpha must lie in (0,1)");
  }
  const double t = static_cast<double>(ind.size());
  const double breaches = static_cast<double>(ind.breaches());
  const double a_hat = breaches / t;

  PofResult out;
  out.lr = 2.0 * (xlog(t - breaches, (1.0 - a_hat) / alpha) +
                  xlog(breaches, a_hat / (1.0 - alpha)));
  out.lr = std::max(out.lr, 0.0);
  out.p_value = stats::chi2_sf(out.lr, 1);
  return out;
}

IndependenceResult independence_test(const IndicatorSeries& ind) {
  if (ind.size() < 2) {
    throw DataError("independence_test: need at least 2 observations");
  }
  IndependenceResult out;
  for (std::size_t i = 0; i + 1 < ind.size(); ++i) {
    int a = ind.values[i], b = ind.values[i + 1];
    if (a == 0 && b == 0) ++out.n00;
    if (a == 0 && b == 1) ++out.n01;
    if (a == 1 && b == 0) ++out.n10;
    if (a == 1 && b == 1) ++out.n11;
  }
  // Degenerate patterns where the alternative model is not identified.
  if (ind.breaches() == 0 || out.n10 + out.n11 == 0) {
    out.lr = 0.0;
    out.p_value = 1.0;
    return out;
  }
  const double pairs = static_cast<double>(ind.size() - 1);
  const double pi = static_cast<double>(out.n01 + out.n11) / pairs;
  const double pi0 =
      out.n00 + out.n01 > 0
          ? static_cast<double>(out.n01) / static_cast<double>(out.n00 + out.n01)
          : 0.0;
  const double pi1 =
      static_cast<double>(out.n11) / static_cast<double>(out.n10 + out.n11);

  // -2 ln(constrained / unconstrained); zero-count terms drop out (0^0 = 1).
  double log_num = xlog(out.n00 + out.n10, 1.0 - pi) +
                   xlog(out.n01 + out.n11, pi);
  double log_den = xlog(out.n00, 1.0 - pi0) + xlog(out.n01, pi0) +
                   xlog(out.n10, 1.0 - pi1) + xlog(out.n11, pi1);
  out.lr = std::max(-2.0 * (log_num - log_den), 0.0);
  out.p_value = stats::chi2_sf(out.lr, 1);
  return out;
}

CcResult cc_test(double lr_pof, double lr_independence) {
  if (lr_pof < 0.0 || lr_independence < 0.0) {
    throw DataError("cc_test: LR statistics must be nonnegative");
  }
  CcResult out;
  out.lr = lr_pof + lr_independence;
  out.p_value = stats::chi2_sf(out.lr, 2);
  return out;
}

RollingVolSeries rolling_volatility(const DatedSeries& losses,
                                    std::size_t window) {
  if (window < 2) throw DataError("rolling_volatility: window must be >= 2");
  if (losses.size() < window) {
    throw DataError("rolling_volatility: window exceeds series length");
  }
  RollingVolSeries out;
  out.window = window;
  for (std::size_t end = window - 1; end < losses.size(); ++end) {
    double mean = 0.0;
    for (std::size_t i = end + 1 - window; i <= end; ++i) {
      mean += losses.values[i];
    }
    mean /= static_cast<double>(window);
    double ss = 0.0;
    for (std::size_t i = end + 1 - window; i <= end; ++i) {
      double d = losses.values[i] - mean;
      ss += d * d;
    }
    out.dates.push_back(losses.dates[end]);
    out.values.push_back(std::sqrt(ss / static_cast<double>(window - 1)));
  }
  return out;
}

double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw DataError("pearson_correlation: need equal lengths >= 2");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw DataError("pearson_correlation: undefined for constant input");
  }
  return sab / std::sqrt(saa * sbb);
}

BacktestReport run_backtest(const std::string& model_id,
                            const DatedSeries& losses,
                            const DatedSeries& forecasts, double alpha,
                            double significance) {
  BacktestReport rep;
  rep.model_id = model_id;
  rep.significance = significance;

  IndicatorSeries ind = indicator_series(losses, forecasts);
  rep.observations = ind.size();
  rep.breaches = ind.breaches();
  rep.overshoot = static_cast<double>(rep.breaches) /
                  static_cast<double>(rep.observations);

  PofResult pof = pof_test(ind, alpha);
  IndependenceResult indep = independence_test(ind);
  CcResult cc = cc_test(pof.lr, indep.lr);

  rep.n00 = indep.n00;
  rep.n01 = indep.n01;
  rep.n10 = indep.n10;
  rep.n11 = indep.n11;
  rep.lr_pof = pof.lr;
  rep.p_pof = pof.p_value;
  rep.lr_independence = indep.lr;
  rep.p_independence = indep.p_value;
  rep.lr_cc = cc.lr;
  rep.p_cc = cc.p_value;
  rep.pass_pof = pof.p_value >= significance;
  rep.pass_independence = indep.p_value >= significance;
  rep.pass_cc = cc.p_value >= significance;
  rep.negative_forecasts =
      std::any_of(forecasts.values.begin(), forecasts.values.end(),
                  [](double v) { return v < 0.0; });
  return rep;
}

std::string report_to_json(const BacktestReport& r) {
  nlohmann::json doc{{"model_id", r.model_id},
                     {"observations", r.observations},
                     {"breaches", r.breaches},
                     {"overshoot", r.overshoot},
                     {"transitions",
                      {{"n00", r.n00}, {"n01", r.n01}, {"n10", r.n10},
                       {"n11", r.n11}}},
                     {"lr_pof", r.lr_pof},
                     {"lr_independence", r.lr_independence},
                     {"lr_cc", r.lr_cc},
                     {"p_pof", r.p_pof},
                     {"p_independence", r.p_independence},
                     {"p_cc", r.p_cc},
                     {"significance", r.significance},
                     {"pass_pof", r.pass_pof},
                     {"pass_independence", r.pass_independence},
                     {"pass_cc", r.pass_cc},
                     {"negative_forecasts", r.negative_forecasts}};
  return doc.dump(2) + "\n";
}

BacktestReport report_from_json(const std::string& text) {
  BacktestReport r;
  try {
    auto doc = nlohmann::json::parse(text);
    r.model_id = doc.at("model_id").get<std::string>();
    r.observations = doc.at("observations").get<std::size_t>();
    r.breaches = doc.at("breaches").get<std::size_t>();
    r.overshoot = doc.at("overshoot").get<double>();
    const auto& tr = doc.at("transitions");
    r.n00 = tr.at("n00").get<long>();
    r.n01 = tr.at("n01").get<long>();
    r.n10 = tr.at("n10").get<long>();
    r.n11 = tr.at("n11").get<long>();
    r.lr_pof = doc.at("lr_pof").get<double>();
    r.lr_independence = doc.at("lr_independence").get<double>();
    r.lr_cc = doc.at("lr_cc").get<double>();
    r.p_pof = doc.at("p_pof").get<double>();
    r.p_independence = doc.at("p_independence").get<double>();
    r.p_cc = doc.at("p_cc").get<double>();
    r.significance = doc.at("significance").get<double>();
    r.pass_pof = doc.at("pass_pof").get<bool>();
    r.pass_independence = doc.at("pass_independence").get<bool>();
    r.pass_cc = doc.at("pass_cc").get<bool>();
    r.negative_forecasts = doc.at("negative_forecasts").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report json: ") + e.what());
  }
  return r;
}

std::string report_csv_header() {
  return "model,overshoot_pct,uc_p,ind_p,cc_p";
}

std::string report_csv_row(const BacktestReport& r) {
  return r.model_id + "," + format_double(r.overshoot * 100.0) + "," +
         format_double(r.p_pof) + "," + format_double(r.p_independence) +
         "," + format_double(r.p_cc);
}

}  // namespace varcast::backtest
