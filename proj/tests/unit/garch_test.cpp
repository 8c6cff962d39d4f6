#include "smilelab/garch.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "smilelab/error.hpp"
#include "smilelab/forward_variance.hpp"

namespace smilelab {
namespace {

const double kV0 = 0.179 / std::sqrt(252.0);

TEST(GarchParams, Validation) {
  EXPECT_NO_THROW((GarchParams{kV0, 0.988, 0.123, 0.0}.validate()));
  EXPECT_THROW((GarchParams{0.0, 0.988, 0.1, 0.0}.validate()), Error);
  EXPECT_THROW((GarchParams{kV0, 1.0, 0.1, 0.0}.validate()), Error);
  EXPECT_THROW((GarchParams{kV0, 0.988, -0.1, 0.0}.validate()), Error);
  EXPECT_THROW((GarchParams{kV0, 0.988, 0.1, -1.0}.validate()), Error);
  EXPECT_THROW((GarchParams{kV0, 0.3, 0.7, 0.0}.validate()), Error);
}

TEST(GarchParams, Conversions) {
  const auto p = GarchParams::from_annualized(0.179, 0.988, 0.123);
  EXPECT_NEAR(p.v0, kV0, 1e-18);
  EXPECT_NEAR(p.relaxation_time(), -1.0 / std::log(0.988), 1e-12);
  EXPECT_NEAR(sp500_reference().v0 * std::sqrt(252.0), 0.179, 1e-15);
  EXPECT_EQ(dax_reference().rho, 0.9856);
}

TEST(ForwardCurve, Values) {
  const GarchParams p{kV0, 0.988, 0.1, 0.1};
  const auto c = forward_curve(p, 2000);
  EXPECT_NEAR(c[1], 0.179 * 0.179 * (1 + 0.0988) / 252.0, 1e-19);
  EXPECT_NEAR(c[1999] / (kV0 * kV0), 1.0, 1e-10);
  for (double v : forward_curve({kV0, 0.988, 0.1, 0.0}, 50)) EXPECT_EQ(v, kV0 * kV0);
}

TEST(LambdaKernel, MatchesExplicitForm) {
  const GarchParams p{kV0, 0.97, 0.1, 0.4};
  const auto m = make_model(p, 200);
  // The curve form loses digits of v_1^j - v0^2, so precision is absolute in v0^2.
  for (int j = 2; j <= 200; j += 7) {
    for (int i = 1; i < j; i += 3) {
      EXPECT_NEAR(m.coupling(i, j), garch_lambda(p, i, j), 1e-14 * kV0 * kV0);
    }
  }
  const GarchParams flat{kV0, 0.988, 0.1, 0.0};
  EXPECT_NEAR(garch_lambda(flat, 3, 10), kV0 * kV0 * std::pow(0.988, 6), 1e-20);
  const GarchParams persistent{kV0, 1.0 - 1e-12, 0.1, 0.0};
  EXPECT_NEAR(garch_lambda(persistent, 1, 100) / (kV0 * kV0), 1.0, 1e-9);
}

TEST(GarchSkew, FrozenValues) {
  const GarchParams p{kV0, 0.988, 0.123, 0.0};
  // Brute-force double sums at 40 digits.
  EXPECT_NEAR(garch_skew(p, 20), -0.094642199109480821825, 1e-15);
  EXPECT_NEAR(garch_skewness(p, 20), -0.097100847480060172008, 1e-15);
  EXPECT_NEAR(garch_skew({kV0, 0.988, 0.123, 0.5}, 60), -0.15522630973583242754, 1e-15);
  EXPECT_NEAR(skewness_skew_ratio({kV0, 0.988, 0.123, 0.2}, 30), 1.0172481401850570620, 1e-14);
}

TEST(GarchSkew, ZeroVolOfVol) {
  const GarchParams p{kV0, 0.988, 0.0, 0.3};
  EXPECT_EQ(garch_skew(p, 10), 0.0);
  EXPECT_EQ(garch_skewness(p, 10), 0.0);
  EXPECT_EQ(garch_gamma(p, 10), 0.0);
}

TEST(GarchSkew, RatioLaw) {
  const GarchParams p{kV0, 0.988, 0.123, 0.0};
  EXPECT_NEAR(skewness_skew_ratio(p, 2), std::sqrt(2.0), 1e-14);
  for (int T = 2; T <= 500; ++T) {
    EXPECT_NEAR(skewness_skew_ratio(p, T), std::sqrt(T / (T - 1.0)), 1e-12);
    EXPECT_NEAR(garch_skewness(p, T), garch_skew(p, T) * std::sqrt(T / (T - 1.0)), 1e-13);
  }
  EXPECT_NEAR(skewness_skew_ratio(p, 100000), 1.0, 1e-5);
  EXPECT_THROW(skewness_skew_ratio(p, 1), Error);
}

TEST(GarchGamma, ClosedForm) {
  const GarchParams p{kV0, 0.988, 0.123, 0.0};
  EXPECT_NEAR(garch_gamma(p, 20), -0.043858922194058130593, 1e-15);
}

TEST(GarchGamma, CrossModuleIdentities) {
  for (double rho : {0.9, 0.988, 0.995}) {
    for (double nu : {0.01, 0.123}) {
      for (double x1 : {-0.5, 0.0, 2.0}) {
        const GarchParams p{kV0, rho, nu, x1};
        const auto m = make_model(p, 251);
        for (int T : {2, 5, 20, 60, 120, 250}) {
          EXPECT_NEAR(garch_total_variance(p, T) / total_variance(m, T), 1.0, 1e-12);
          EXPECT_NEAR(garch_skew(p, T) / skew(m, T), 1.0, 1e-12);
          EXPECT_NEAR(garch_skewness(p, T) / skewness_over_6(m, T), 1.0, 1e-12);
          EXPECT_NEAR(garch_gamma(p, T) / implied_leverage(m, T), 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(VariancePath, FloorAndRecursion) {
  const GarchParams p{kV0, 0.988, 0.123, 0.0};
  const std::vector<double> eps{-1.0, 0.5, 2.0};
  std::vector<double> var(3);
  EXPECT_EQ(garch_variance_path(p, eps, var), 0u);
  const double v2 = kV0 * kV0;
  EXPECT_EQ(var[0], v2);
  const double x2 = 0.988 * 0.0 + 0.123 * (1.0 - 0.5);
  EXPECT_NEAR(var[1], v2 * (1 + x2), 1e-18);
}

TEST(Simulate, DegenerateAndDeterministic) {
  const GarchParams flat{kV0, 0.988, 0.0, 0.0};
  const auto a = simulate(flat, 50, 20, 1);
  for (double v : a.variances) EXPECT_EQ(v, kV0 * kV0);

  const GarchParams p{kV0, 0.988, 0.123, 0.0};
  const auto b = simulate(p, 300, 600, 9);
  const auto c = simulate(p, 300, 600, 9);
  EXPECT_EQ(b.variances, c.variances);
  EXPECT_EQ(b.raw_returns, c.raw_returns);
  EXPECT_EQ(b.floor_hits, 0u);
  EXPECT_NE(simulate(p, 300, 600, 10).raw_returns, b.raw_returns);
  for (std::size_t k = 0; k < b.raw_returns.size(); ++k) {
    EXPECT_NEAR(b.adjusted_returns[k], b.raw_returns[k] - 0.5 * b.variances[k], 1e-18);
  }
  // Paths depend only on their index.
  const auto d = simulate(p, 300, 3, 9);
  for (int path = 0; path < 3; ++path) {
    const auto x = b.path_raw_returns(path);
    const auto y = d.path_raw_returns(path);
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
  }
}

TEST(Simulate, PositivityOnReferenceParameters) {
  for (const auto& p : {sp500_reference(), dax_reference()}) {
    const auto s = simulate(p, 2000, 200, 3);
    EXPECT_EQ(s.floor_hits, 0u);
    const double floor = p.v0 * p.v0 * (1.0 - p.rho);
    for (double v : s.variances) EXPECT_GE(v, floor * (1 - 1e-12));
  }
}

TEST(Simulate, StationaryMeanVariance) {
  const GarchParams p{kV0, 0.988, 0.05, 0.0};
  const int n = 100000;
  const auto s = simulate(p, 200, n, 4);
  double sum = 0.0;
  double sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = s.path_variances(k)[199] / (kV0 * kV0);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - 1.0), 3 * se);
}

TEST(Simulate, LeverageMatchesLambda) {
  const GarchParams p{kV0, 0.988, 0.05, 0.0};
  const auto m = make_model(p, 40);
  const int n = 400000;
  const auto s = simulate(p, 31, n, 12);
  for (int lag : {1, 10, 30}) {
    double sum = 0.0;
    double sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto r = s.path_raw_returns(k);
      const double x = r[0] * r[lag] * r[lag] / (kV0 * kV0 * kV0);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double expected = leverage_from_lambda(m, 1, lag) / (kV0 * kV0 * kV0);
    EXPECT_LT(std::abs(mean - expected), 3 * se) << "lag " << lag;
  }
}

}  // namespace
}  // namespace smilelab
