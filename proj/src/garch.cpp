#include "smilelab/garch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "smilelab/error.hpp"
#include "smilelab/parallel.hpp"
#include "smilelab/quadrature.hpp"

namespace smilelab {

void GarchParams::validate() const {
  if (!std::isfinite(v0) || !std::isfinite(rho) || !std::isfinite(nu) || !std::isfinite(x1)) {
    fail(ErrorCode::kDomain, "GARCH parameters must be finite");
  }
  if (!(v0 > 0.0)) fail(ErrorCode::kDomain, "v0 must be positive", "v0=" + std::to_string(v0));
  if (!(rho > 0.0 && rho < 1.0)) fail(ErrorCode::kDomain, "rho must lie in (0, 1)", "rho=" + std::to_string(rho));
  if (!(nu >= 0.0)) fail(ErrorCode::kDomain, "nu must be non-negative", "nu=" + std::to_string(nu));
  if (!(x1 > -1.0)) fail(ErrorCode::kDomain, "x1 must exceed -1", "x1=" + std::to_string(x1));
  if (rho < 0.5 * nu) {
    fail(ErrorCode::kDomain, "stability requires rho >= nu/2",
         "rho=" + std::to_string(rho) + " nu=" + std::to_string(nu));
  }
}

double GarchParams::relaxation_time() const { return -1.0 / std::log(rho); }

GarchParams GarchParams::from_annualized(double v0_annual, double rho, double nu, double x1,
                                         double days_per_year) {
  if (!(days_per_year > 0.0)) fail(ErrorCode::kDomain, "days per year must be positive");
  GarchParams p{v0_annual / std::sqrt(days_per_year), rho, nu, x1};
  p.validate();
  return p;
}

GarchParams sp500_reference() { return GarchParams::from_annualized(0.179, 0.988, 0.123); }
GarchParams dax_reference() { return GarchParams::from_annualized(0.207, 0.9856, 0.133); }

double garch_conditional_mean(double a, double s2) {
  if (!(s2 >= 0.0)) fail(ErrorCode::kDomain, "variance must be non-negative");
  if (s2 == 0.0) return (a < 0.0 ? a * a : 0.0) - 0.5;
  const double s = std::sqrt(s2);
  return (a * a + s2) * norm_cdf(-a / s) - a * s * norm_pdf(a / s) - 0.5;
}

double garch_deriv_mean(double s2) {
  if (!(s2 >= 0.0)) fail(ErrorCode::kDomain, "variance must be non-negative");
  return -std::sqrt(2.0 / std::numbers::pi) * std::sqrt(s2);
}

ShockFunction garch_shock() {
  ShockFunction::Options options;
  options.kinks = {0.0};
  return ShockFunction(
             "garch", [](double x) { return (x < 0.0 ? x * x : 0.0) - 0.5; },
             [](double x) { return x < 0.0 ? 2.0 * x : 0.0; }, options)
      .with_closed_forms(garch_conditional_mean, garch_deriv_mean);
}

std::vector<double> forward_curve(const GarchParams& p, int horizon) {
  p.validate();
  if (horizon < 1) fail(ErrorCode::kDomain, "horizon must be at least one day");
  const double v02 = p.v0 * p.v0;
  std::vector<double> curve(horizon);
  double rho_pow = 1.0;
  for (int j = 0; j < horizon; ++j) {
    curve[j] = v02 * (1.0 + rho_pow * p.x1);
    rho_pow *= p.rho;
  }
  return curve;
}

CouplingKernel lambda_kernel(const GarchParams& p) {
  p.validate();
  const double v02 = p.v0 * p.v0;
  const double rho = p.rho;
  return [v02, rho](int i, int j, std::span<const double> curve) {
    if (i < 1 || i >= j) fail(ErrorCode::kDomain, "lambda needs 1 <= i < j");
    if (j > static_cast<int>(curve.size())) fail(ErrorCode::kRange, "lambda beyond the curve");
    return (v02 * (std::pow(rho, j - i) - 1.0) + curve[j - 1]) / rho;
  };
}

double garch_lambda(const GarchParams& p, int i, int j) {
  if (i < 1 || i >= j) fail(ErrorCode::kDomain, "lambda needs 1 <= i < j");
  return p.v0 * p.v0 * std::pow(p.rho, j - i - 1) * (1.0 + std::pow(p.rho, i - 1) * p.x1);
}

ForwardVarianceModel make_model(const GarchParams& p, int horizon) {
  return ForwardVarianceModel(forward_curve(p, horizon), lambda_kernel(p), p.nu, garch_shock());
}

double garch_total_variance(const GarchParams& p, int maturity) {
  p.validate();
  if (maturity < 1) fail(ErrorCode::kDomain, "maturity must be at least one day");
  return p.v0 * p.v0 * (maturity + p.x1 * (1.0 - std::pow(p.rho, maturity)) / (1.0 - p.rho));
}

namespace {

struct DoubleSums {
  double plain = 0.0;     // sum sqrt(1+rho^{i-1}x1)(rho^{j-i-1} + rho^{j-2}x1)
  double weighted = 0.0;  // same with sqrt(1 - v_1^i/V_T)
};

// Double sums over 1 <= i < j <= T in units of v0^3. The sum over j is geometric:
// sum_j (rho^{j-i-1} + rho^{j-2} x1) = (1 + rho^{i-1} x1) (1 - rho^{T-i}) / (1 - rho).
DoubleSums garch_double_sums(const GarchParams& p, int maturity) {
  const double big_v = maturity + p.x1 * (1.0 - std::pow(p.rho, maturity)) / (1.0 - p.rho);
  const double log_rho = std::log(p.rho);
  DoubleSums s;
  for (int i = 1; i < maturity; ++i) {
    const double xi = 1.0 + std::pow(p.rho, i - 1) * p.x1;
    const double geometric = -std::expm1((maturity - i) * log_rho) / (1.0 - p.rho);
    const double term = xi * std::sqrt(xi) * geometric;
    s.plain += term;
    s.weighted += term * std::sqrt(1.0 - xi / big_v);
  }
  return s;
}

double skew_prefactor(const GarchParams& p, int maturity) {
  const double v3 = p.v0 * p.v0 * p.v0;
  return -std::sqrt(2.0 / std::numbers::pi) * p.nu * v3 /
         (2.0 * std::pow(garch_total_variance(p, maturity), 1.5));
}

void require_skew_maturity(const GarchParams& p, int maturity) {
  p.validate();
  if (maturity < 1) fail(ErrorCode::kDomain, "maturity must be at least one day");
}

}  // namespace

double garch_skew(const GarchParams& p, int maturity) {
  require_skew_maturity(p, maturity);
  if (maturity == 1) return 0.0;
  return skew_prefactor(p, maturity) * garch_double_sums(p, maturity).weighted;
}

double garch_skewness(const GarchParams& p, int maturity) {
  require_skew_maturity(p, maturity);
  if (maturity == 1) return 0.0;
  return skew_prefactor(p, maturity) * garch_double_sums(p, maturity).plain;
}

double skewness_skew_ratio(const GarchParams& p, int maturity) {
  p.validate();
  if (maturity < 2) fail(ErrorCode::kDomain, "ratio needs T >= 2", "T=" + std::to_string(maturity));
  const auto s = garch_double_sums(p, maturity);
  if (s.weighted == 0.0) fail(ErrorCode::kDegenerate, "skew double sum vanishes");
  return s.plain / s.weighted;
}

double garch_gamma(const GarchParams& p, int maturity) {
  p.validate();
  if (maturity < 1) fail(ErrorCode::kDomain, "maturity must be at least one day");
  const double t = maturity;
  const double geo = (1.0 - std::pow(p.rho, maturity)) / (1.0 - p.rho);
  return -p.nu * std::sqrt(1.0 + p.x1) /
         (std::sqrt(2.0 * std::numbers::pi) * std::sqrt(t * (t + p.x1 * geo))) * geo;
}

std::uint64_t garch_variance_path(const GarchParams& p, std::span<const double> eps,
                                  std::span<double> variances) {
  if (variances.size() < eps.size()) fail(ErrorCode::kRange, "variance buffer too short");
  const double v02 = p.v0 * p.v0;
  const double floor = kVarianceFloor * v02;
  std::uint64_t hits = 0;
  double s2 = v02 * (1.0 + p.x1);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    variances[i] = s2;
    const double e = eps[i];
    const double shock = (e < 0.0 ? e * e : 0.0) - 0.5;
    s2 = v02 + p.rho * (s2 - v02) + p.nu * s2 * shock;
    if (s2 < floor) {
      s2 = floor;
      ++hits;
    }
  }
  return hits;
}

std::span<const double> GarchPaths::path_variances(int path) const {
  return std::span<const double>(variances).subspan(static_cast<std::size_t>(path) * n_days, n_days);
}
std::span<const double> GarchPaths::path_raw_returns(int path) const {
  return std::span<const double>(raw_returns).subspan(static_cast<std::size_t>(path) * n_days, n_days);
}
std::span<const double> GarchPaths::path_adjusted_returns(int path) const {
  return std::span<const double>(adjusted_returns)
      .subspan(static_cast<std::size_t>(path) * n_days, n_days);
}

GarchPaths simulate(const GarchParams& p, int n_days, int n_paths, std::uint64_t seed) {
  p.validate();
  if (n_days < 1) fail(ErrorCode::kDomain, "need at least one day");
  if (n_paths < 1) fail(ErrorCode::kDomain, "need at least one path");
  GarchPaths out;
  out.n_paths = n_paths;
  out.n_days = n_days;
  const std::size_t total = static_cast<std::size_t>(n_paths) * n_days;
  out.variances.resize(total);
  out.raw_returns.resize(total);
  out.adjusted_returns.resize(total);

  constexpr int kPathsPerBlock = 256;
  const int n_blocks = (n_paths + kPathsPerBlock - 1) / kPathsPerBlock;
  std::vector<std::uint64_t> hits(n_blocks, 0);
  parallel_blocks(n_blocks, [&](int block) {
    std::vector<double> eps(n_days);
    const int first = block * kPathsPerBlock;
    const int last = std::min(n_paths, first + kPathsPerBlock);
    for (int path = first; path < last; ++path) {
      auto engine = stream_engine(seed, static_cast<std::uint64_t>(path));
      std::normal_distribution<double> normal;
      for (auto& e : eps) e = normal(engine);
      const std::size_t off = static_cast<std::size_t>(path) * n_days;
      std::span<double> var(out.variances.data() + off, n_days);
      hits[block] += garch_variance_path(p, eps, var);
      for (int i = 0; i < n_days; ++i) {
        const double sd_eps = std::sqrt(var[i]) * eps[i];
        out.raw_returns[off + i] = sd_eps;
        out.adjusted_returns[off + i] = -0.5 * var[i] + sd_eps;
      }
    }
  });
  for (auto h : hits) out.floor_hits += h;
  return out;
}

}  // namespace smilelab
