#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smilelab/garch.hpp"

namespace smilelab {

using Date = std::chrono::year_month_day;

/// Daily log-returns. returns[i] is the return ending on dates[i]; closes, when
/// present, hold one more level than returns (closes[i] -> closes[i+1]).
struct ReturnSeries {
  std::vector<Date> dates;
  std::vector<double> returns;
  std::vector<double> closes;

  std::size_t size() const noexcept { return returns.size(); }
  /// Strictly increasing dates, finite returns, at least 2 of them.
  void validate() const;
};

struct SmileQuote {
  double moneyness = 0.0;
  double implied_vol = 0.0;
};

struct SmileSlice {
  int maturity_days = 0;
  std::vector<SmileQuote> quotes;
};

/// One snapshot date; slices sorted by maturity.
struct SmileSurface {
  Date date{};
  std::vector<SmileSlice> slices;

  void validate() const;
  const SmileSlice* slice(int maturity_days) const;
};

struct EstimatorConfig {
  int ema_vol_span = 20;
  int detrend_span = 1000;
  int ssr_window = 50;
  double skew_fit_window = 0.5;
  double days_per_year = kTradingDaysPerYear;

  void validate() const;
};

/// Causal EMA variance sigma_i^2 = (1 - a) sigma_{i-1}^2 + a r_{i-1}^2, a = 1/span,
/// seeded at i = span with the mean of the first span squared returns. Returns
/// sigma_i for every i; entries before `span` are NaN.
std::vector<double> ema_vol(std::span<const double> returns, int span);

struct LeverageCurve {
  std::vector<double> g;   // g[l-1] = g_L(l)
  std::vector<double> se;  // batch-means standard error
  std::vector<std::size_t> count;
};

/// Time average of r_i r_{i+l}^2 / sigma_i^3 with EMA sigma, l = 1..max_lag.
LeverageCurve leverage_corr(std::span<const double> returns, int max_lag, int ema_span = 20);
/// Same average with a caller-supplied sigma_i, starting at index `first`.
LeverageCurve leverage_corr_normalized(std::span<const double> returns,
                                       std::span<const double> sigma, int max_lag,
                                       std::size_t first);

struct BetaEstimate {
  double beta = 0.0;
  double se = 0.0;
  double prob_positive = 0.0;
  std::size_t n_windows = 0;
  bool overlapping = true;  // daily-rolling windows, in-sample
};

/// sqrt(pi/2) (1 - 2 P(r~_T > 0)) over overlapping T-day windows of returns
/// detrended by a causal EMA drift; Newey-West (Bartlett, T lags) error.
BetaEstimate low_moment_skewness(std::span<const double> returns, int maturity,
                                 int detrend_span = 1000);

/// Sample skewness of daily returns.
double daily_skewness(std::span<const double> returns);
/// zeta_1/sqrt(T) + 3/sqrt(T) sum_{l<=T} (1 - l/T) g_L(l).
double skewness_from_leverage(std::span<const double> g_l, double zeta1, int maturity);
/// (1/2T) sum_{l<=T} g_L(l).
double gamma_theoretical(std::span<const double> g_l, int maturity);

struct SkewFit {
  double atm_vol = 0.0;
  double skew = 0.0;
  double rms_residual = 0.0;
  std::size_t count = 0;
};

/// Vega-weighted least squares of vol = atm (1 + skew * m) over |m| <= window.
/// `total_vol` = sigma_ATM sqrt(T) sets the vega weights exp(-d+^2/2), d+ = -m + total_vol/2.
SkewFit fit_smile_skew(std::span<const SmileQuote> quotes, double total_vol, double window = 0.5);
/// Fit on the slice of `surface` at `maturity_days`; vols are taken as daily.
SkewFit fit_smile_skew(const SmileSurface& surface, int maturity_days, double window = 0.5);

/// Constant-maturity ATM vol and skew by linear interpolation between fitted slices.
SkewFit fit_at_maturity(const SmileSurface& surface, double maturity_days, double window = 0.5);

struct RegressionSlope {
  double slope = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

/// Slope of y on x through the origin, E[x y]/E[x^2].
RegressionSlope slope_through_origin(std::span<const double> x, std::span<const double> y);
/// gamma_T: slope of atm[i+1] - atm[i] on returns[i]; both series share dates.
RegressionSlope fit_implied_leverage(std::span<const double> atm, std::span<const double> returns);

struct LocalSsr {
  std::vector<double> values;  // one per evaluated window, NaN where skipped
  double mean = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// R(t;M) = M sum_{i=t-M}^{t} (atm[i+1] - atm[i]) r_i / (sum skew_i * sum r_i^2), taken
/// literally; windows with a zero denominator are skipped and counted.
LocalSsr local_ssr(std::span<const double> atm, std::span<const double> skew,
                   std::span<const double> returns, int window);
/// Converts the local display to gamma sqrt(T)/Skew: multiplies by sqrt(T) (M+1)/M.
double local_ssr_to_ratio(double local_value, int maturity, int window);

struct CalibrationOptions {
  int max_lag = 100;
  int bootstrap_replicates = 200;
  int block_length = 5000;
  int burn_in = 250;
  int max_iterations = 50;
  std::uint64_t seed = 1;
};

struct CalibrationResult {
  GarchParams params;
  double se_v0 = 0.0;
  double se_rho = 0.0;
  double se_nu = 0.0;
  double objective = 0.0;
  int iterations = 0;
  int bootstrap_replicates = 0;
  LeverageCurve leverage;  // normalized by the fitted GARCH filter
};

/// GARCH sigma_i filtered from returns under params, sigma_1 = v0.
std::vector<double> garch_filter(std::span<const double> returns, const GarchParams& p);

/// Fixed-point leverage-curve fit: v0^2 is the sample variance; (rho, nu) minimise
/// the weighted distance between g_L (normalised by the GARCH filter at the current
/// params) and -nu sqrt(2/pi) rho^{l-1}. Standard errors from a block bootstrap.
CalibrationResult calibrate_garch(std::span<const double> returns,
                                  const CalibrationOptions& options = {});

}  // namespace smilelab
