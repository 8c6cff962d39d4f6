#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace smilelab {

/// The shock function f driving the forward-variance curve, with E[f(eps)] = 0
/// for standard normal eps.
///
/// Gaussian expectations E[f(a + Y)] and E[f'(Y)], Y ~ N(0, s2), default to
/// Gauss-Hermite quadrature. Shocks with kinks should list them so that the
/// piecewise rule is used instead, and shocks with known closed forms can
/// attach them via with_closed_forms().
class ShockFunction {
 public:
  using Fn = std::function<double(double)>;
  using ConditionalMeanFn = std::function<double(double a, double s2)>;
  using DerivMeanFn = std::function<double(double s2)>;

  struct Options {
    int quadrature_nodes = 64;
    std::vector<double> kinks;
  };

  ShockFunction(std::string name, Fn f, Fn f_prime);
  ShockFunction(std::string name, Fn f, Fn f_prime, Options options);

  ShockFunction with_closed_forms(ConditionalMeanFn conditional_mean, DerivMeanFn deriv_mean) const;
  ShockFunction with_quadrature_nodes(int n) const;
  /// x -> -f(x). Closed forms, if any, are negated too.
  ShockFunction negated() const;

  const std::string& name() const noexcept { return state_->name; }
  bool has_closed_forms() const noexcept { return static_cast<bool>(state_->conditional_mean); }

  double value(double x) const { return state_->f(x); }
  double derivative(double x) const { return state_->f_prime(x); }

  /// E[f(a + Y)], Y ~ N(0, s2).
  double conditional_mean(double a, double s2) const;
  /// E[f'(Y)], Y ~ N(0, s2).
  double deriv_mean(double s2) const;

  /// Quadrature-only evaluations, bypassing closed forms.
  double quadrature_conditional_mean(double a, double s2, int nodes) const;
  double quadrature_deriv_mean(double s2, int nodes) const;

 private:
  struct State {
    std::string name;
    Fn f;
    Fn f_prime;
    Options options;
    ConditionalMeanFn conditional_mean;
    DerivMeanFn deriv_mean;
  };
  explicit ShockFunction(std::shared_ptr<const State> state) : state_(std::move(state)) {}

  std::shared_ptr<const State> state_;
};

/// f(x) = x, the linear (Bergomi-Guyon) case.
ShockFunction linear_shock();

}  // namespace smilelab
