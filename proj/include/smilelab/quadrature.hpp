#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace smilelab {

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// erfc keeps the lower tail accurate to full relative precision.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Gauss-Hermite rule for the standard normal weight:
/// E[g(Z)] ~ sum_k weight_k * g(node_k), exact for polynomials of degree < 2n.
class GaussHermiteRule {
 public:
  explicit GaussHermiteRule(int n_nodes);

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// E[g(mean + sqrt(variance) * Z)].
  template <class F>
  double expect(F&& g, double mean, double variance) const {
    const double s = std::sqrt(variance);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) acc += weights_[k] * g(mean + s * nodes_[k]);
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Rules are built once per size and shared; safe to call concurrently.
const GaussHermiteRule& gauss_hermite(int n_nodes);

class GaussLegendreRule {
 public:
  explicit GaussLegendreRule(int n_nodes);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  template <class F>
  double integrate(F&& g, double lo, double hi) const {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) acc += weights_[k] * g(mid + half * nodes_[k]);
    return half * acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

const GaussLegendreRule& gauss_legendre(int n_nodes);

/// E[g(mean + sqrt(variance) * Z)] for g that is smooth except at `breakpoints`.
/// Integrates the Gaussian density piecewise on [-12, 12] standard deviations.
double gaussian_expectation_piecewise(const std::function<double(double)>& g, double mean,
                                      double variance, std::span<const double> breakpoints);

}  // namespace smilelab
