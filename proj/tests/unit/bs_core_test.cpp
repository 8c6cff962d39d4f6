#include "smilelab/bs_core.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "smilelab/error.hpp"
#include "smilelab/parallel.hpp"
#include "smilelab/quadrature.hpp"

namespace smilelab {
namespace {

TEST(BsCallPrice, ZeroVarianceIsIntrinsic) {
  EXPECT_EQ(bs_call_price({100.0, 90.0, 0.0}), 10.0);
  EXPECT_EQ(bs_call_price({90.0, 100.0, 0.0}), 0.0);
}

TEST(BsCallPrice, AtTheMoneyOracle) {
  // 2 N(0.1) - 1 from 40-digit evaluation.
  EXPECT_NEAR(bs_call_price({1.0, 1.0, 0.04}), 0.07965567455405796293, 1e-16);
  EXPECT_NEAR(bs_call_price({100.0, 120.0, 0.2}), 11.026620377423823007, 1e-12);
}

TEST(BsCallPrice, MatchesMonteCarlo) {
  constexpr int kSamples = 10'000'000;
  const double v = 0.04;
  auto rng = stream_engine(2024, 0);
  std::normal_distribution<double> z;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double payoff = std::max(std::exp(std::sqrt(v) * z(rng) - v / 2) - 1.0, 0.0);
    sum += payoff;
    sum2 += payoff * payoff;
  }
  const double mean = sum / kSamples;
  const double se = std::sqrt((sum2 / kSamples - mean * mean) / kSamples);
  EXPECT_LT(std::abs(mean - bs_call_price({1.0, 1.0, v})), 3 * se);
}

TEST(BsCallPrice, BoundsAndMonotonicity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double S = 1.0 + 200.0 * u(rng);
    const double K = S * std::exp(3.0 * (u(rng) - 0.5));
    const double v = 1e-4 + 4.0 * u(rng);
    const double c = bs_call_price({S, K, v});
    EXPECT_GE(c, std::max(S - K, 0.0));
    EXPECT_LE(c, S);
    EXPECT_GE(bs_call_price({S, K, v * 1.01}), c);
    EXPECT_LE(bs_call_price({S, K * 1.01, v}), c);
  }
}

TEST(BsCallPrice, RejectsBadInputs) {
  EXPECT_THROW(bs_call_price({-1.0, 1.0, 0.04}), Error);
  EXPECT_THROW(bs_call_price({1.0, 0.0, 0.04}), Error);
  EXPECT_THROW(bs_call_price({1.0, 1.0, -0.1}), Error);
}

TEST(ImpliedTotalVariance, RoundTrips) {
  EXPECT_NEAR(implied_total_variance(bs_call_price({1.0, 1.0, 0.09}), 1.0, 1.0), 0.09, 1e-13);
  EXPECT_NEAR(implied_total_variance(bs_call_price({100.0, 120.0, 0.2}), 100.0, 120.0), 0.2, 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = 1e-3 + 2.0 * u(rng);
    const double K = std::exp(std::sqrt(v) * (4.0 * u(rng) - 2.0));
    EXPECT_NEAR(implied_total_variance(bs_call_price({1.0, K, v}), 1.0, K), v, 1e-9 * std::max(1.0, v));
  }
}

TEST(ImpliedTotalVariance, IntrinsicLimit) {
  const double v = implied_total_variance(0.2 + 1e-14, 1.0, 0.8);
  EXPECT_LT(v, 1e-2);
}

TEST(ImpliedTotalVariance, RejectsArbitrage) {
  try {
    implied_total_variance(0.1, 1.0, 0.8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoArbitrage);
  }
  EXPECT_THROW(implied_total_variance(1.0, 1.0, 0.8), Error);
}

TEST(Greeks, LemmaValues) {
  const auto g = greeks({1.0, 1.0, 0.04});
  EXPECT_NEAR(g.d_spot, norm_cdf(0.1), 1e-15);
  EXPECT_NEAR(g.d_var, std::exp(-0.005) / (2 * std::sqrt(2 * std::numbers::pi) * 0.2), 1e-15);
  EXPECT_NEAR(g.d_var, 0.99238136869252941378, 1e-15);
}

TEST(Greeks, ZeroVarianceIsDomainError) {
  try {
    greeks({1.0, 1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
}

double central(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

TEST(Greeks, MatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::exp(std::log(1e-4) + u(rng) * std::log(4e4));
    const double S = 10.0 + 100.0 * u(rng);
    const double K = S * std::exp(std::sqrt(v) * (4.0 * u(rng) - 2.0));
    const auto g = greeks({S, K, v});
    const double hs = 1e-3 * S * std::sqrt(v);
    const double hv = 1e-3 * v;
    const double fd_s = central([&](double s) { return bs_call_price({s, K, v}); }, S, hs);
    const double fd_v = central([&](double x) { return bs_call_price({S, K, x}); }, v, hv);
    const double fd_vv = central([&](double x) { return greeks({S, K, x}).d_var; }, v, hv);
    const double fd_sv = central([&](double s) { return greeks({s, K, v}).d_var; }, S, hs);
    EXPECT_LT(std::abs(fd_s - g.d_spot), 1e-6 * std::max(std::abs(g.d_spot), 1e-4));
    EXPECT_LT(std::abs(fd_v - g.d_var), 1e-6 * std::max(std::abs(g.d_var), 1e-4 * S));
    EXPECT_LT(std::abs(fd_vv - g.d2_var), 1e-6 * std::max(std::abs(g.d2_var), 1e-4 * S / v));
    EXPECT_LT(std::abs(fd_sv - g.d2_spot_var), 1e-6 * std::max(std::abs(g.d2_spot_var), 1e-4));
  }
}

TEST(NormCdf, MatchesHighPrecisionValues) {
  EXPECT_NEAR(norm_cdf(0.1), 0.53982783727702898147, 1e-16);
  EXPECT_NEAR(norm_cdf(-8.0) / 6.2209605742717841235e-16, 1.0, 1e-14);
  EXPECT_NEAR(norm_cdf(3.0), 0.99865010196837000043, 2e-16);
}

}  // namespace
}  // namespace smilelab
