#include "smilelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "smilelab/error.hpp"
#include "smilelab/parallel.hpp"

namespace smilelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string date_string(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

void ReturnSeries::validate() const {
  if (returns.size() < 2) fail(ErrorCode::kInsufficientData, "need at least 2 returns");
  if (dates.size() != returns.size()) {
    fail(ErrorCode::kValidation, "dates and returns differ in length");
  }
  if (!closes.empty() && closes.size() != returns.size() + 1) {
    fail(ErrorCode::kValidation, "closes must hold one more value than returns");
  }
  for (std::size_t i = 0; i < returns.size(); ++i) {
    if (!std::isfinite(returns[i])) {
      fail(ErrorCode::kValidation, "non-finite return", "date=" + date_string(dates[i]));
    }
    if (i > 0 && !(dates[i - 1] < dates[i])) {
      fail(ErrorCode::kValidation, "dates must be strictly increasing",
           "date=" + date_string(dates[i]));
    }
  }
}

void SmileSurface::validate() const {
  int previous = 0;
  for (const auto& s : slices) {
    if (s.maturity_days < 1) fail(ErrorCode::kValidation, "maturity must be positive");
    if (s.maturity_days <= previous) fail(ErrorCode::kValidation, "maturities must be sorted and distinct");
    previous = s.maturity_days;
    for (const auto& q : s.quotes) {
      if (!std::isfinite(q.moneyness)) fail(ErrorCode::kValidation, "non-finite moneyness");
      if (!(q.implied_vol > 0.0) || !std::isfinite(q.implied_vol)) {
        fail(ErrorCode::kValidation, "implied vols must be positive",
             "date=" + date_string(date) + " T=" + std::to_string(s.maturity_days));
      }
    }
  }
}

const SmileSlice* SmileSurface::slice(int maturity_days) const {
  for (const auto& s : slices) {
    if (s.maturity_days == maturity_days) return &s;
  }
  return nullptr;
}

void EstimatorConfig::validate() const {
  if (ema_vol_span < 1 || detrend_span < 1) fail(ErrorCode::kConfig, "spans must be at least 1");
  if (ssr_window < 2) fail(ErrorCode::kConfig, "SSR window must be at least 2");
  if (!(skew_fit_window > 0.0)) fail(ErrorCode::kConfig, "skew fit window must be positive");
  if (!(days_per_year > 0.0)) fail(ErrorCode::kConfig, "days per year must be positive");
}

std::vector<double> ema_vol(std::span<const double> returns, int span) {
  if (span < 1) fail(ErrorCode::kDomain, "EMA span must be at least 1");
  if (returns.size() < static_cast<std::size_t>(span)) {
    fail(ErrorCode::kInsufficientData, "series shorter than the EMA span",
         "n=" + std::to_string(returns.size()) + " span=" + std::to_string(span));
  }
  const double alpha = 1.0 / span;
  std::vector<double> sigma(returns.size(), kNaN);
  double var = 0.0;
  for (int i = 0; i < span; ++i) var += returns[i] * returns[i];
  var /= span;
  for (std::size_t i = span; i < returns.size(); ++i) {
    if (i > static_cast<std::size_t>(span)) {
      var = (1.0 - alpha) * var + alpha * returns[i - 1] * returns[i - 1];
    }
    sigma[i] = std::sqrt(var);
  }
  return sigma;
}

LeverageCurve leverage_corr_normalized(std::span<const double> returns,
                                       std::span<const double> sigma, int max_lag,
                                       std::size_t first) {
  if (max_lag < 1) fail(ErrorCode::kDomain, "max lag must be at least 1");
  if (sigma.size() != returns.size()) fail(ErrorCode::kValidation, "sigma and returns differ in length");
  const std::size_t n = returns.size();
  if (n <= first + static_cast<std::size_t>(max_lag) + 1) {
    fail(ErrorCode::kInsufficientData, "series too short for the requested lags",
         "n=" + std::to_string(n) + " max_lag=" + std::to_string(max_lag));
  }
  for (std::size_t i = first; i < n; ++i) {
    if (!(sigma[i] > 0.0)) {
      fail(ErrorCode::kDegenerate, "zero volatility in the normalisation", "i=" + std::to_string(i));
    }
  }

  constexpr int kBatches = 50;
  LeverageCurve out;
  out.g.assign(max_lag, 0.0);
  out.se.assign(max_lag, 0.0);
  out.count.assign(max_lag, 0);
  parallel_blocks(max_lag, [&](int k) {
    const int lag = k + 1;
    const std::size_t last = n - lag;  // exclusive
    const std::size_t m = last - first;
    std::vector<double> batch_sum(kBatches, 0.0);
    std::vector<std::size_t> batch_n(kBatches, 0);
    double total = 0.0;
    for (std::size_t i = first; i < last; ++i) {
      const double s = sigma[i];
      const double x = returns[i] * returns[i + lag] * returns[i + lag] / (s * s * s);
      total += x;
      const std::size_t b = (i - first) * kBatches / m;
      batch_sum[b] += x;
      ++batch_n[b];
    }
    const double g = total / static_cast<double>(m);
    double ss = 0.0;
    int nb = 0;
    for (int b = 0; b < kBatches; ++b) {
      if (batch_n[b] == 0) continue;
      const double d = batch_sum[b] / static_cast<double>(batch_n[b]) - g;
      ss += d * d;
      ++nb;
    }
    out.g[k] = g;
    out.se[k] = nb > 1 ? std::sqrt(ss / (nb - 1) / nb) : 0.0;
    out.count[k] = m;
  });
  return out;
}

LeverageCurve leverage_corr(std::span<const double> returns, int max_lag, int ema_span) {
  if (returns.size() <= static_cast<std::size_t>(max_lag + ema_span)) {
    fail(ErrorCode::kInsufficientData, "series must be longer than max_lag + EMA span",
         "n=" + std::to_string(returns.size()));
  }
  const auto sigma = ema_vol(returns, ema_span);
  return leverage_corr_normalized(returns, sigma, max_lag, ema_span);
}

BetaEstimate low_moment_skewness(std::span<const double> returns, int maturity, int detrend_span) {
  if (maturity < 1) fail(ErrorCode::kDomain, "maturity must be at least one day");
  if (detrend_span < 1) fail(ErrorCode::kDomain, "detrend span must be at least 1");
  const std::size_t n = returns.size();
  const std::size_t start = detrend_span;
  const std::size_t min_windows = std::max<std::size_t>(30, 2 * static_cast<std::size_t>(maturity));
  if (n < start + maturity + min_windows - 1) {
    fail(ErrorCode::kInsufficientData, "too few T-day windows after detrending",
         "n=" + std::to_string(n) + " T=" + std::to_string(maturity));
  }

  // Causal drift: mu_i uses returns before i only.
  const double alpha = 1.0 / detrend_span;
  std::vector<double> prefix(n - start + 1, 0.0);
  double mu = 0.0;
  for (std::size_t i = 0; i < start; ++i) mu += returns[i];
  mu /= static_cast<double>(start);
  for (std::size_t i = start; i < n; ++i) {
    if (i > start) mu = (1.0 - alpha) * mu + alpha * returns[i - 1];
    prefix[i - start + 1] = prefix[i - start] + (returns[i] - mu);
  }

  const std::size_t n_windows = n - start - maturity + 1;
  std::vector<double> ind(n_windows);
  for (std::size_t t = 0; t < n_windows; ++t) {
    ind[t] = (prefix[t + maturity] - prefix[t]) > 0.0 ? 1.0 : 0.0;
  }
  const double p = mean_of(ind);

  // Newey-West long-run variance of the indicator, Bartlett kernel with T lags.
  const std::size_t lags = std::min<std::size_t>(maturity, n_windows - 1);
  auto autocov = [&](std::size_t h) {
    double acc = 0.0;
    for (std::size_t t = h; t < n_windows; ++t) acc += (ind[t] - p) * (ind[t - h] - p);
    return acc / static_cast<double>(n_windows);
  };
  double lrv = autocov(0);
  for (std::size_t h = 1; h <= lags; ++h) {
    lrv += 2.0 * (1.0 - static_cast<double>(h) / (lags + 1)) * autocov(h);
  }
  lrv = std::max(lrv, 0.0);

  const double scale = std::sqrt(std::numbers::pi / 2.0);
  BetaEstimate out;
  out.prob_positive = p;
  out.beta = scale * (1.0 - 2.0 * p);
  out.se = 2.0 * scale * std::sqrt(lrv / static_cast<double>(n_windows));
  out.n_windows = n_windows;
  return out;
}

double daily_skewness(std::span<const double> returns) {
  if (returns.size() < 3) fail(ErrorCode::kInsufficientData, "skewness needs at least 3 returns");
  const double m = mean_of(returns);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double r : returns) {
    const double d = r - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(returns.size());
  m3 /= static_cast<double>(returns.size());
  if (m2 == 0.0) fail(ErrorCode::kDegenerate, "constant returns have no skewness");
  return m3 / std::pow(m2, 1.5);
}

double skewness_from_leverage(std::span<const double> g_l, double zeta1, int maturity) {
  if (maturity < 1) fail(ErrorCode::kDomain, "maturity must be at least one day");
  if (g_l.size() < static_cast<std::size_t>(maturity)) {
    fail(ErrorCode::kRange, "leverage curve shorter than the maturity",
         "lags=" + std::to_string(g_l.size()) + " T=" + std::to_string(maturity));
  }
  const double t = maturity;
  double acc = 0.0;
  for (int l = 1; l <= maturity; ++l) acc += (1.0 - l / t) * g_l[l - 1];
  return zeta1 / std::sqrt(t) + 3.0 / std::sqrt(t) * acc;
}

double gamma_theoretical(std::span<const double> g_l, int maturity) {
  if (maturity < 1) fail(ErrorCode::kDomain, "maturity must be at least one day");
  if (g_l.size() < static_cast<std::size_t>(maturity)) {
    fail(ErrorCode::kRange, "leverage curve shorter than the maturity");
  }
  double acc = 0.0;
  for (int l = 0; l < maturity; ++l) acc += g_l[l];
  return acc / (2.0 * maturity);
}

SkewFit fit_smile_skew(std::span<const SmileQuote> quotes, double total_vol, double window) {
  if (!(window > 0.0)) fail(ErrorCode::kDomain, "fit window must be positive");
  if (!(total_vol >= 0.0)) fail(ErrorCode::kDomain, "total vol must be non-negative");
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const auto& q : quotes) {
    if (std::abs(q.moneyness) > window) continue;
    const double d = -q.moneyness + 0.5 * total_vol;
    const double w = std::exp(-0.5 * d * d);
    sw += w;
    sx += w * q.moneyness;
    sy += w * q.implied_vol;
    sxx += w * q.moneyness * q.moneyness;
    sxy += w * q.moneyness * q.implied_vol;
    ++count;
  }
  if (count < 3) {
    fail(ErrorCode::kInsufficientData, "need at least 3 quotes inside the fit window",
         "count=" + std::to_string(count));
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 1e-14 * sw * sxx)) fail(ErrorCode::kDegenerate, "moneyness values are not distinct");
  const double slope = (sw * sxy - sx * sy) / det;
  const double level = (sy - slope * sx) / sw;
  if (!(level > 0.0)) fail(ErrorCode::kDegenerate, "fitted ATM vol is not positive");

  double ss = 0.0;
  for (const auto& q : quotes) {
    if (std::abs(q.moneyness) > window) continue;
    const double e = q.implied_vol - (level + slope * q.moneyness);
    ss += e * e;
  }
  return {level, slope / level, std::sqrt(ss / static_cast<double>(count)), count};
}

SkewFit fit_smile_skew(const SmileSurface& surface, int maturity_days, double window) {
  const auto* s = surface.slice(maturity_days);
  if (s == nullptr) fail(ErrorCode::kRange, "no slice at maturity", "T=" + std::to_string(maturity_days));
  // Unweighted pass for the ATM level, then the vega-weighted fit.
  const auto first = fit_smile_skew(s->quotes, 0.0, window);
  const double total_vol = first.atm_vol * std::sqrt(static_cast<double>(maturity_days));
  return fit_smile_skew(s->quotes, total_vol, window);
}

SkewFit fit_at_maturity(const SmileSurface& surface, double maturity_days, double window) {
  const auto& slices = surface.slices;
  if (slices.empty()) fail(ErrorCode::kInsufficientData, "empty surface");
  if (maturity_days < slices.front().maturity_days || maturity_days > slices.back().maturity_days) {
    fail(ErrorCode::kRange, "maturity outside the listed expiries",
         "T=" + std::to_string(maturity_days));
  }
  for (std::size_t k = 0; k < slices.size(); ++k) {
    if (slices[k].maturity_days == maturity_days) return fit_smile_skew(surface, slices[k].maturity_days, window);
    if (k + 1 < slices.size() && maturity_days < slices[k + 1].maturity_days) {
      const auto lo = fit_smile_skew(surface, slices[k].maturity_days, window);
      const auto hi = fit_smile_skew(surface, slices[k + 1].maturity_days, window);
      const double w = (maturity_days - slices[k].maturity_days) /
                       static_cast<double>(slices[k + 1].maturity_days - slices[k].maturity_days);
      SkewFit out;
      out.atm_vol = (1.0 - w) * lo.atm_vol + w * hi.atm_vol;
      out.skew = (1.0 - w) * lo.skew + w * hi.skew;
      out.rms_residual = std::max(lo.rms_residual, hi.rms_residual);
      out.count = std::min(lo.count, hi.count);
      return out;
    }
  }
  fail(ErrorCode::kRange, "maturity outside the listed expiries");
}

RegressionSlope slope_through_origin(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::kValidation, "regression inputs differ in length");
  if (x.size() < 2) fail(ErrorCode::kInsufficientData, "regression needs at least 2 points");
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (sxx == 0.0) fail(ErrorCode::kDegenerate, "regressor has zero variance");
  const double b = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - b * x[i];
    ss += e * e;
  }
  return {b, std::sqrt(ss / static_cast<double>(x.size() - 1) / sxx), x.size()};
}

RegressionSlope fit_implied_leverage(std::span<const double> atm, std::span<const double> returns) {
  if (atm.size() != returns.size()) {
    fail(ErrorCode::kValidation, "ATM vol and return series are misaligned",
         "atm=" + std::to_string(atm.size()) + " returns=" + std::to_string(returns.size()));
  }
  if (atm.size() < 30) fail(ErrorCode::kInsufficientData, "need at least 30 dates");
  std::vector<double> dsigma(atm.size() - 1);
  for (std::size_t i = 0; i + 1 < atm.size(); ++i) dsigma[i] = atm[i + 1] - atm[i];
  return slope_through_origin(returns.first(dsigma.size()), dsigma);
}

LocalSsr local_ssr(std::span<const double> atm, std::span<const double> skew,
                   std::span<const double> returns, int window) {
  if (atm.size() != returns.size() || skew.size() != returns.size()) {
    fail(ErrorCode::kValidation, "ATM, skew and return series are misaligned");
  }
  if (window < 2) fail(ErrorCode::kDomain, "window must be at least 2");
  const std::size_t m = window;
  if (returns.size() < m + 2) fail(ErrorCode::kInsufficientData, "series shorter than the window");

  LocalSsr out;
  double acc = 0.0;
  for (std::size_t t = m; t + 1 < returns.size(); ++t) {
    double num = 0.0, sk = 0.0, rr = 0.0;
    for (std::size_t i = t - m; i <= t; ++i) {
      num += (atm[i + 1] - atm[i]) * returns[i];
      sk += skew[i];
      rr += returns[i] * returns[i];
    }
    const double den = sk * rr;
    if (den == 0.0 || !std::isfinite(den)) {
      out.values.push_back(kNaN);
      ++out.skipped;
      continue;
    }
    const double value = window * num / den;
    out.values.push_back(value);
    acc += value;
    ++out.used;
  }
  if (out.used == 0) fail(ErrorCode::kDegenerate, "every window has a zero denominator");
  out.mean = acc / static_cast<double>(out.used);
  return out;
}

double local_ssr_to_ratio(double local_value, int maturity, int window) {
  if (maturity < 1 || window < 2) fail(ErrorCode::kDomain, "need T >= 1 and M >= 2");
  return local_value * std::sqrt(static_cast<double>(maturity)) * (window + 1.0) / window;
}

std::vector<double> garch_filter(std::span<const double> returns, const GarchParams& p) {
  p.validate();
  const double v02 = p.v0 * p.v0;
  const double floor = kVarianceFloor * v02;
  std::vector<double> sigma(returns.size());
  double s2 = v02 * (1.0 + p.x1);
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const double s = std::sqrt(s2);
    sigma[i] = s;
    const double e = returns[i] / s;
    s2 = v02 + p.rho * (s2 - v02) + p.nu * s2 * ((e < 0.0 ? e * e : 0.0) - 0.5);
    s2 = std::max(s2, floor);
  }
  return sigma;
}

namespace {

struct ExponentialFit {
  double rho = 0.0;
  double nu = 0.0;
  double objective = 0.0;
};

// Weighted fit of g(l) = -nu sqrt(2/pi) rho^{l-1}; nu profiled out in closed form.
ExponentialFit fit_exponential_leverage(std::span<const double> g, std::span<const double> w) {
  const double c = std::sqrt(2.0 / std::numbers::pi);
  auto profile = [&](double rho) {
    double num = 0.0, den = 0.0, pw = 1.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      num -= w[k] * g[k] * pw;
      den += w[k] * pw * pw;
      pw *= rho;
    }
    const double nu = std::clamp(num / (c * den), 0.0, 2.0 * rho);
    double obj = 0.0;
    pw = 1.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double e = g[k] + c * nu * pw;
      obj += w[k] * e * e;
      pw *= rho;
    }
    return ExponentialFit{rho, nu, obj};
  };
  // rho = 1 - exp(u); scan, then refine around the best grid point.
  const double u_lo = std::log(1e-4);
  const double u_hi = std::log(0.99);
  constexpr int kGrid = 200;
  auto at = [&](int k) { return u_lo + (u_hi - u_lo) * k / kGrid; };
  int best = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double obj = profile(1.0 - std::exp(at(k))).objective;
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
  }
  const double a = at(std::max(best - 1, 0));
  const double b = at(std::min(best + 1, kGrid));
  const auto r = boost::math::tools::brent_find_minima(
      [&](double u) { return profile(1.0 - std::exp(u)).objective; }, a, b, 52);
  return profile(1.0 - std::exp(r.first));
}

}  // namespace

CalibrationResult calibrate_garch(std::span<const double> returns_in,
                                  const CalibrationOptions& options) {
  const std::size_t n = returns_in.size();
  if (n < 2000) fail(ErrorCode::kInsufficientData, "calibration needs at least 2000 days",
                     "n=" + std::to_string(n));
  if (options.max_lag < 2) fail(ErrorCode::kConfig, "max_lag must be at least 2");
  if (options.burn_in < 0 || options.block_length < 1 || options.max_iterations < 1 ||
      options.bootstrap_replicates < 0) {
    fail(ErrorCode::kConfig, "invalid calibration options");
  }
  if (n <= static_cast<std::size_t>(options.burn_in + options.max_lag) * 2) {
    fail(ErrorCode::kInsufficientData, "series too short for burn-in and lags");
  }

  const double mean = mean_of(returns_in);
  std::vector<double> r(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = returns_in[i] - mean;
    ss += r[i] * r[i];
  }
  const double v0 = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(v0 > 0.0)) fail(ErrorCode::kDegenerate, "returns have zero variance");

  GarchParams p{v0, 0.97, 0.1, 0.0};
  std::vector<double> sigma;
  LeverageCurve lev;
  std::vector<double> weights(options.max_lag);
  ExponentialFit fit;
  auto reweight = [&] {
    for (int k = 0; k < options.max_lag; ++k) {
      const double se = lev.se[k];
      weights[k] = 1.0 / std::max(se * se, 1e-300);
    }
  };

  int it = 0;
  bool converged = false;
  for (; it < options.max_iterations && !converged; ++it) {
    sigma = garch_filter(r, p);
    lev = leverage_corr_normalized(r, sigma, options.max_lag, options.burn_in);
    reweight();
    fit = fit_exponential_leverage(lev.g, weights);
    converged = std::abs(fit.rho - p.rho) < 1e-7 && std::abs(fit.nu - p.nu) < 1e-7;
    p.rho = fit.rho;
    p.nu = fit.nu;
  }
  if (!converged) {
    fail(ErrorCode::kNumerical, "calibration fixed point did not converge",
         "iterations=" + std::to_string(it) + " rho=" + std::to_string(p.rho) +
             " nu=" + std::to_string(p.nu));
  }

  CalibrationResult out;
  out.params = p;
  out.objective = fit.objective;
  out.iterations = it;
  out.leverage = lev;

  // Block bootstrap on per-block sums, normalisation held at the fitted filter.
  const std::size_t first = options.burn_in;
  const std::size_t span = n - first;
  const std::size_t n_blocks = std::max<std::size_t>(10, span / options.block_length);
  const int lags = options.max_lag;
  std::vector<double> block_sum(n_blocks * lags, 0.0);
  std::vector<double> block_cnt(n_blocks * lags, 0.0);
  std::vector<double> block_rr(n_blocks, 0.0);
  std::vector<double> block_n(n_blocks, 0.0);
  for (std::size_t i = first; i < n; ++i) {
    const std::size_t b = (i - first) * n_blocks / span;
    block_rr[b] += r[i] * r[i];
    block_n[b] += 1.0;
    const double s = sigma[i];
    const double base = r[i] / (s * s * s);
    for (int l = 1; l <= lags && i + l < n; ++l) {
      block_sum[b * lags + l - 1] += base * r[i + l] * r[i + l];
      block_cnt[b * lags + l - 1] += 1.0;
    }
  }

  const int reps = options.bootstrap_replicates;
  std::vector<double> rep_v0(reps), rep_rho(reps), rep_nu(reps);
  parallel_blocks(reps, [&](int rep) {
    auto engine = stream_engine(options.seed, static_cast<std::uint64_t>(rep));
    std::uniform_int_distribution<std::size_t> pick(0, n_blocks - 1);
    std::vector<double> sum(lags, 0.0), cnt(lags, 0.0);
    double rr = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < n_blocks; ++k) {
      const std::size_t b = pick(engine);
      for (int l = 0; l < lags; ++l) {
        sum[l] += block_sum[b * lags + l];
        cnt[l] += block_cnt[b * lags + l];
      }
      rr += block_rr[b];
      nn += block_n[b];
    }
    std::vector<double> g(lags);
    for (int l = 0; l < lags; ++l) g[l] = cnt[l] > 0.0 ? sum[l] / cnt[l] : 0.0;
    const auto f = fit_exponential_leverage(g, weights);
    rep_v0[rep] = std::sqrt(rr / nn);
    rep_rho[rep] = f.rho;
    rep_nu[rep] = f.nu;
  });
  auto sd = [](const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
  };
  out.se_v0 = sd(rep_v0);
  out.se_rho = sd(rep_rho);
  out.se_nu = sd(rep_nu);
  out.bootstrap_replicates = reps;
  return out;
}

}  // namespace smilelab
