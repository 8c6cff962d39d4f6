#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smilelab/shock.hpp"

namespace smilelab {

/// Coupling lambda_i^j (1 <= i < j) of the day-j forward variance to the day-i
/// shock, evaluated on the initial curve (1-based days; curve[0] is v_1^1).
using CouplingKernel = std::function<double(int i, int j, std::span<const double> initial_curve)>;

/// Discrete forward-variance model: r_i = sigma_i eps_i and
/// v_{i+1}^j - v_i^j = nu * lambda_i^j * f(eps_i), expanded to first order in nu.
/// Immutable once built.
class ForwardVarianceModel {
 public:
  ForwardVarianceModel(std::vector<double> initial_curve, CouplingKernel kernel, double vol_of_vol,
                       ShockFunction shock);

  int horizon() const noexcept { return static_cast<int>(curve_.size()); }
  std::span<const double> initial_curve() const noexcept { return curve_; }
  /// v_1^j, 1 <= j <= horizon.
  double forward_variance(int j) const;
  /// V_T = sum_{j <= T} v_1^j.
  double total_variance(int maturity) const;
  /// lambda_i^j, 1 <= i < j <= horizon.
  double coupling(int i, int j) const;
  double vol_of_vol() const noexcept { return vol_of_vol_; }
  const ShockFunction& shock() const noexcept { return shock_; }

  ForwardVarianceModel with_shock(ShockFunction shock) const;
  ForwardVarianceModel with_vol_of_vol(double vol_of_vol) const;

 private:
  std::vector<double> curve_;
  std::vector<double> cumulative_;
  CouplingKernel kernel_;
  double vol_of_vol_;
  ShockFunction shock_;
};

/// lambda_i^j = g(j - i) for a time-translation invariant model.
CouplingKernel stationary_kernel(std::function<double(int lag)> by_lag);
/// lambda_i^j = amplitude * exp(-(j - i) / tau).
CouplingKernel exponential_kernel(double amplitude, double tau);

/// Per-maturity summary of the order-1 smile.
struct SmileReport {
  int maturity = 0;
  double atm_vol = 0.0;           // sqrt(V_T / T), per sqrt(day)
  double skew = 0.0;
  double skewness_over_6 = 0.0;
  double implied_leverage = 0.0;
  std::optional<double> ssr;                 // implied_leverage * sqrt(T) / skew
  std::optional<double> correction_factor;   // skewness_over_6 / skew
  std::vector<std::string> warnings;
};

double total_variance(const ForwardVarianceModel& model, int maturity);

/// Order-1 implied vols on a grid of shifted moneyness
/// M = (ln(K/S) + V_T/2) / sqrt(V_T). Throws kVolOfVolTooLarge if a vol is not positive.
std::vector<double> smile_curve(const ForwardVarianceModel& model, int maturity,
                                std::span<const double> moneyness);

/// Relative smile slope at the money. Returns 0 for T = 1 (empty double sum).
double skew(const ForwardVarianceModel& model, int maturity);
/// Skewness of ln(S_T/S_1) divided by 6. Returns 0 for T = 1.
double skewness_over_6(const ForwardVarianceModel& model, int maturity);
/// Regression slope of day-1 ATM vol changes on r_1. Needs the curve up to T + 1.
double implied_leverage(const ForwardVarianceModel& model, int maturity);
/// E[r_i r_{i+lag}^2] = nu sqrt(v_1^i) lambda_i^{i+lag} E[f'(eps)].
double leverage_from_lambda(const ForwardVarianceModel& model, int day, int lag);
/// Model-free implied leverage from E[r_1 r_j^2], j = 2..T+1.
double gamma_from_leverage(std::span<const double> leverage, double sigma1, double total_var,
                           int maturity);
/// Linear-model SSR (V_T/sigma_1) sum_j lambda_1^j / sum_{i,j} sqrt(v_1^j) lambda_j^i.
double ssr_linear(const ForwardVarianceModel& model, int maturity);
/// ssr_linear corrected by (S_T/6)/Skew_T.
double ssr(const ForwardVarianceModel& model, int maturity);

struct FlatExponentialSsr {
  double discrete = 0.0;     // sum g_L / sum (1 - l/T) g_L
  double closed_form = 0.0;  // T(1 - e^{-T/tau}) / (T - tau(1 - e^{-T/tau}))
};
/// SSR for a flat curve with g_L(l) = -amplitude exp(-l/tau). Independent of amplitude.
FlatExponentialSsr ssr_flat_exponential(double amplitude, double tau, int maturity);

SmileReport smile_report(const ForwardVarianceModel& model, int maturity);

/// Shifted moneyness (ln(K/S) + V_T/2)/sqrt(V_T) from ln(K/S).
double shifted_moneyness(double log_moneyness, double total_var);
/// ln(K/S) for a shifted moneyness.
double log_moneyness_from_shifted(double moneyness, double total_var);
/// Market convention ln(K/S)/(sigma_ATM sqrt(T)).
double unshifted_moneyness(double log_moneyness, double atm_vol, int maturity);

}  // namespace smilelab
