#include "smilelab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "smilelab/error.hpp"

namespace smilelab {

namespace {

constexpr int kMaxNewtonIterations = 200;

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials,
// then one Newton polish per node. Weights from the Christoffel function.
void build_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  if (n == 1) {
    weights[0] = 1.0;
    return;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::kNumerical, "Gauss-Hermite eigenvalue solve failed");

  for (int i = 0; i < n; ++i) {
    double x = solver.eigenvalues()[i];
    double sum = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      // Orthonormal recurrence: p_{k+1} = (x p_k - sqrt(k) p_{k-1}) / sqrt(k+1).
      double p_prev = 0.0;
      double p = 1.0;
      sum = 0.0;
      for (int k = 0; k < n; ++k) {
        sum += p * p;
        const double next = (x * p - std::sqrt(static_cast<double>(k)) * p_prev) / std::sqrt(k + 1.0);
        p_prev = p;
        p = next;
      }
      if (pass == 0) x -= p / (std::sqrt(static_cast<double>(n)) * p_prev);
    }
    nodes[i] = x;
    weights[i] = 1.0 / sum;
  }
  // Symmetrise to remove rounding asymmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
    const double w = 0.5 * (weights[i] + weights[n - 1 - i]);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

void build_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) fail(ErrorCode::kNumerical, "Gauss-Legendre node iteration did not converge");
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

template <class Rule>
const Rule& cached_rule(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(n);
  return *slot;
}

}  // namespace

GaussHermiteRule::GaussHermiteRule(int n_nodes) {
  if (n_nodes < 1) fail(ErrorCode::kDomain, "Gauss-Hermite rule needs at least one node");
  build_hermite(n_nodes, nodes_, weights_);
}

const GaussHermiteRule& gauss_hermite(int n_nodes) { return cached_rule<GaussHermiteRule>(n_nodes); }

GaussLegendreRule::GaussLegendreRule(int n_nodes) {
  if (n_nodes < 1) fail(ErrorCode::kDomain, "Gauss-Legendre rule needs at least one node");
  build_legendre(n_nodes, nodes_, weights_);
}

const GaussLegendreRule& gauss_legendre(int n_nodes) { return cached_rule<GaussLegendreRule>(n_nodes); }

double gaussian_expectation_piecewise(const std::function<double(double)>& g, double mean,
                                      double variance, std::span<const double> breakpoints) {
  if (!(variance >= 0.0)) fail(ErrorCode::kDomain, "variance must be non-negative");
  if (variance == 0.0) return g(mean);
  constexpr double kTail = 12.0;
  constexpr double kMaxPiece = 2.0;
  const double s = std::sqrt(variance);

  std::vector<double> cuts{-kTail, kTail};
  for (double b : breakpoints) {
    const double z = (b - mean) / s;
    if (z > -kTail && z < kTail) cuts.push_back(z);
  }
  std::sort(cuts.begin(), cuts.end());

  const auto& rule = gauss_legendre(24);
  auto integrand = [&](double z) { return g(mean + s * z) * norm_pdf(z); };
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (hi <= lo) continue;
    const int pieces = static_cast<int>(std::ceil((hi - lo) / kMaxPiece));
    const double h = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) acc += rule.integrate(integrand, lo + p * h, lo + (p + 1) * h);
  }
  return acc;
}

}  // namespace smilelab
