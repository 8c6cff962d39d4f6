#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smilelab/forward_variance.hpp"
#include "smilelab/shock.hpp"

namespace smilelab {

inline constexpr double kTradingDaysPerYear = 252.0;

/// Fully asymmetric GARCH:
///   sigma_{i+1}^2 = v0^2 + rho (sigma_i^2 - v0^2) + nu sigma_i^2 (eps_i^2 1{eps_i<0} - 1/2)
/// with sigma_1^2 = v0^2 (1 + x1). All quantities are daily.
struct GarchParams {
  double v0 = 0.0;   // per sqrt(day)
  double rho = 0.0;
  double nu = 0.0;
  double x1 = 0.0;

  /// Throws kDomain unless v0 > 0, 0 < rho < 1, nu >= 0, x1 > -1 and rho >= nu/2.
  void validate() const;
  /// -1/ln(rho), in days.
  double relaxation_time() const;

  static GarchParams from_annualized(double v0_annual, double rho, double nu, double x1 = 0.0,
                                     double days_per_year = kTradingDaysPerYear);
};

/// Reference S&P 500 and DAX parameter sets (v0 converted to daily).
GarchParams sp500_reference();
GarchParams dax_reference();

/// f(x) = x^2 1{x<0} - 1/2 with closed-form Gaussian expectations.
ShockFunction garch_shock();
double garch_conditional_mean(double a, double s2);
double garch_deriv_mean(double s2);

/// v_1^j = v0^2 (1 + rho^{j-1} x1), j = 1..horizon.
std::vector<double> forward_curve(const GarchParams& p, int horizon);
/// lambda_i^j = (v0^2 (rho^{j-i} - 1) + v_i^j) / rho with v_i^j read off the initial curve.
CouplingKernel lambda_kernel(const GarchParams& p);
/// lambda_i^j = v0^2 rho^{j-i-1} (1 + rho^{i-1} x1), the same kernel written out.
double garch_lambda(const GarchParams& p, int i, int j);
/// Generic model over (forward_curve, lambda_kernel, garch_shock).
ForwardVarianceModel make_model(const GarchParams& p, int horizon);

double garch_total_variance(const GarchParams& p, int maturity);
double garch_skew(const GarchParams& p, int maturity);
/// S_T / 6.
double garch_skewness(const GarchParams& p, int maturity);
double skewness_skew_ratio(const GarchParams& p, int maturity);
double garch_gamma(const GarchParams& p, int maturity);

/// Variance floor as a fraction of v0^2.
inline constexpr double kVarianceFloor = 1e-12;

/// Runs the recursion on given innovations: variances[i] = sigma_{i+1}^2 for
/// i = 0..eps.size()-1. Returns the number of floor hits.
std::uint64_t garch_variance_path(const GarchParams& p, std::span<const double> eps,
                                  std::span<double> variances);

/// Simulated paths stored path-major (path * n_days + day).
struct GarchPaths {
  int n_paths = 0;
  int n_days = 0;
  std::vector<double> variances;         // sigma_i^2
  std::vector<double> raw_returns;       // sigma_i eps_i
  std::vector<double> adjusted_returns;  // -sigma_i^2/2 + sigma_i eps_i
  std::uint64_t floor_hits = 0;

  std::span<const double> path_variances(int path) const;
  std::span<const double> path_raw_returns(int path) const;
  std::span<const double> path_adjusted_returns(int path) const;
};

/// Path p draws its innovations from stream_engine(seed, p), so the output is
/// the same for any thread count.
GarchPaths simulate(const GarchParams& p, int n_days, int n_paths, std::uint64_t seed);

}  // namespace smilelab
