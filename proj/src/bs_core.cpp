#include "smilelab/bs_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "smilelab/error.hpp"
#include "smilelab/quadrature.hpp"

namespace smilelab {

void BsInputs::validate() const {
  if (!std::isfinite(spot) || !std::isfinite(strike) || !std::isfinite(total_variance)) {
    fail(ErrorCode::kDomain, "Black-Scholes inputs must be finite");
  }
  if (spot <= 0.0) fail(ErrorCode::kDomain, "spot must be positive", "spot=" + std::to_string(spot));
  if (strike <= 0.0) fail(ErrorCode::kDomain, "strike must be positive", "strike=" + std::to_string(strike));
  if (total_variance < 0.0) fail(ErrorCode::kDomain, "total variance must be non-negative");
}

double bs_call_price(const BsInputs& in) {
  in.validate();
  const double intrinsic = std::max(in.spot - in.strike, 0.0);
  if (in.total_variance == 0.0) return intrinsic;
  const double sd = std::sqrt(in.total_variance);
  const double d_plus = (std::log(in.spot / in.strike) + 0.5 * in.total_variance) / sd;
  const double d_minus = d_plus - sd;
  const double price = in.spot * norm_cdf(d_plus) - in.strike * norm_cdf(d_minus);
  // Rounding can push a deep in/out-of-the-money value just outside the bounds.
  return std::clamp(price, intrinsic, in.spot);
}

double implied_total_variance(double price, double spot, double strike) {
  BsInputs probe{spot, strike, 0.0};
  probe.validate();
  if (!std::isfinite(price)) fail(ErrorCode::kDomain, "price must be finite");
  const double intrinsic = std::max(spot - strike, 0.0);
  if (!(price > intrinsic) || !(price < spot)) {
    fail(ErrorCode::kNoArbitrage, "call price outside the no-arbitrage band (S-K)+ < C < S",
         "price=" + std::to_string(price) + " spot=" + std::to_string(spot) +
             " strike=" + std::to_string(strike));
  }

  auto residual = [&](double v) { return bs_call_price({spot, strike, v}) - price; };

  double lo = kMinTotalVariance;
  double hi = kMaxTotalVariance;
  // The solution lies below the bracket's resolution: the intrinsic-value limit.
  if (residual(lo) >= 0.0) return lo;
  if (residual(hi) < 0.0) {
    fail(ErrorCode::kNumerical, "implied total variance exceeds the solver bracket",
         "price=" + std::to_string(price));
  }

  // Start from the at-the-money approximation C ~ S * sqrt(v / 2pi).
  double v = std::clamp(2.0 * std::numbers::pi * std::pow((price - intrinsic) / spot, 2.0), lo, hi);
  constexpr int kMaxIterations = 200;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double f = residual(v);
    if (f == 0.0) return v;
    if (f > 0.0) hi = v; else lo = v;
    if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi);

    const double vega = greeks({spot, strike, v}).d_var;
    double next = (vega > 0.0) ? v - f / vega : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - v) <= 1e-15 * next) return next;
    v = next;
  }
  fail(ErrorCode::kNumerical, "implied total variance did not converge",
       "price=" + std::to_string(price) + " spot=" + std::to_string(spot) +
           " strike=" + std::to_string(strike));
}

BsGreeks greeks(const BsInputs& in) {
  in.validate();
  if (in.total_variance == 0.0) {
    fail(ErrorCode::kDomain, "Greeks are singular at zero total variance");
  }
  const double v = in.total_variance;
  const double sv = std::sqrt(v);
  const double log_sk = std::log(in.spot / in.strike);
  const double d_plus = (log_sk + 0.5 * v) / sv;
  const double kernel = std::exp(-(log_sk + 0.5 * v) * (log_sk + 0.5 * v) / (2.0 * v));
  const double root_two_pi = std::sqrt(2.0 * std::numbers::pi);

  BsGreeks g;
  g.d_spot = norm_cdf(d_plus);
  g.d_var = in.spot / (2.0 * root_two_pi * sv) * kernel;
  g.d2_var = -in.spot / (4.0 * root_two_pi * v * sv) * kernel +
             in.spot / (4.0 * root_two_pi * v * v * sv) * (log_sk * log_sk - v * v / 4.0) * kernel;
  g.d2_spot_var = (1.0 / (4.0 * sv) - log_sk / (2.0 * v * sv)) / root_two_pi * kernel;
  return g;
}

}  // namespace smilelab
