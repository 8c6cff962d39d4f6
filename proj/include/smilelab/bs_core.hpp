#pragma once

namespace smilelab {

/// Black-Scholes call inputs in total-variance form. Rates and dividends are
/// zero: `spot` is the forward.
struct BsInputs {
  double spot = 1.0;
  double strike = 1.0;
  double total_variance = 0.0;

  void validate() const;
};

/// Partial derivatives of the call price with respect to spot and total variance.
struct BsGreeks {
  double d_spot = 0.0;         // dBS/dS
  double d_var = 0.0;          // dBS/dv
  double d2_var = 0.0;         // d2BS/dv2
  double d2_spot_var = 0.0;    // d2BS/dSdv
};

/// S N(d+) - K N(d-), d+- = (ln(S/K) +- v/2)/sqrt(v). Zero variance gives the
/// intrinsic value exactly.
double bs_call_price(const BsInputs& in);

/// Inverts bs_call_price in v. Requires (S-K)+ < price < S.
///
/// Safeguarded Newton on v bracketed in [1e-12, 16]: a Newton step that leaves
/// the bracket, or fails to shrink the residual, is replaced by bisection.
/// Throws kNoArbitrage for out-of-bounds prices and kNumerical if the price
/// needs more than 16 units of total variance or the iteration stalls.
double implied_total_variance(double price, double spot, double strike);

/// Closed-form Greeks; v must be strictly positive.
BsGreeks greeks(const BsInputs& in);

inline constexpr double kMinTotalVariance = 1e-12;
inline constexpr double kMaxTotalVariance = 16.0;

}  // namespace smilelab
