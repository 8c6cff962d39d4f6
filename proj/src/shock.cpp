#include "smilelab/shock.hpp"

#include <cmath>

#include "smilelab/error.hpp"
#include "smilelab/quadrature.hpp"

namespace smilelab {

namespace {

void check_variance(double s2) {
  if (!(s2 >= 0.0) || !std::isfinite(s2)) {
    fail(ErrorCode::kDomain, "Gaussian variance must be finite and non-negative",
         "s2=" + std::to_string(s2));
  }
}

}  // namespace

ShockFunction::ShockFunction(std::string name, Fn f, Fn f_prime)
    : ShockFunction(std::move(name), std::move(f), std::move(f_prime), Options{}) {}

ShockFunction::ShockFunction(std::string name, Fn f, Fn f_prime, Options options) {
  if (!f || !f_prime) fail(ErrorCode::kDomain, "shock function and derivative are required");
  if (options.quadrature_nodes < 2) fail(ErrorCode::kDomain, "need at least 2 quadrature nodes");
  auto state = std::make_shared<State>();
  state->name = std::move(name);
  state->f = std::move(f);
  state->f_prime = std::move(f_prime);
  state->options = std::move(options);
  state_ = std::move(state);
}

ShockFunction ShockFunction::with_closed_forms(ConditionalMeanFn conditional_mean,
                                               DerivMeanFn deriv_mean) const {
  if (!conditional_mean || !deriv_mean) fail(ErrorCode::kDomain, "both closed forms are required");
  auto state = std::make_shared<State>(*state_);
  state->conditional_mean = std::move(conditional_mean);
  state->deriv_mean = std::move(deriv_mean);
  return ShockFunction(std::move(state));
}

ShockFunction ShockFunction::with_quadrature_nodes(int n) const {
  if (n < 2) fail(ErrorCode::kDomain, "need at least 2 quadrature nodes");
  auto state = std::make_shared<State>(*state_);
  state->options.quadrature_nodes = n;
  return ShockFunction(std::move(state));
}

ShockFunction ShockFunction::negated() const {
  auto state = std::make_shared<State>(*state_);
  const auto base = state_;
  state->name = "-" + base->name;
  state->f = [base](double x) { return -base->f(x); };
  state->f_prime = [base](double x) { return -base->f_prime(x); };
  if (base->conditional_mean) {
    state->conditional_mean = [base](double a, double s2) { return -base->conditional_mean(a, s2); };
    state->deriv_mean = [base](double s2) { return -base->deriv_mean(s2); };
  }
  return ShockFunction(std::move(state));
}

double ShockFunction::conditional_mean(double a, double s2) const {
  check_variance(s2);
  if (state_->conditional_mean) return state_->conditional_mean(a, s2);
  return quadrature_conditional_mean(a, s2, state_->options.quadrature_nodes);
}

double ShockFunction::deriv_mean(double s2) const {
  check_variance(s2);
  if (state_->deriv_mean) return state_->deriv_mean(s2);
  return quadrature_deriv_mean(s2, state_->options.quadrature_nodes);
}

double ShockFunction::quadrature_conditional_mean(double a, double s2, int nodes) const {
  check_variance(s2);
  if (!state_->options.kinks.empty()) {
    return gaussian_expectation_piecewise(state_->f, a, s2, state_->options.kinks);
  }
  return gauss_hermite(nodes).expect(state_->f, a, s2);
}

double ShockFunction::quadrature_deriv_mean(double s2, int nodes) const {
  check_variance(s2);
  if (!state_->options.kinks.empty()) {
    return gaussian_expectation_piecewise(state_->f_prime, 0.0, s2, state_->options.kinks);
  }
  return gauss_hermite(nodes).expect(state_->f_prime, 0.0, s2);
}

ShockFunction linear_shock() {
  return ShockFunction("linear", [](double x) { return x; }, [](double) { return 1.0; })
      .with_closed_forms([](double a, double) { return a; }, [](double) { return 1.0; });
}

}  // namespace smilelab
