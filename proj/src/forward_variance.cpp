#include "smilelab/forward_variance.hpp"

#include <cmath>
#include <string>

#include "smilelab/error.hpp"

namespace smilelab {

namespace {

void require_maturity(const ForwardVarianceModel& model, int maturity, int extra_days = 0) {
  if (maturity < 1) {
    fail(ErrorCode::kDomain, "maturity must be at least one day", "T=" + std::to_string(maturity));
  }
  if (maturity + extra_days > model.horizon()) {
    fail(ErrorCode::kRange, "forward curve too short for the requested maturity",
         "T=" + std::to_string(maturity) + " needs horizon " + std::to_string(maturity + extra_days) +
             ", have " + std::to_string(model.horizon()));
  }
}

// Lambda_j = sum_{i=j+1}^{T} lambda_j^i for j = 1..T-1 (index j-1).
std::vector<double> coupling_column_sums(const ForwardVarianceModel& model, int maturity) {
  std::vector<double> sums(maturity > 1 ? maturity - 1 : 0, 0.0);
  for (int j = 1; j < maturity; ++j) {
    double acc = 0.0;
    for (int i = j + 1; i <= maturity; ++i) acc += model.coupling(j, i);
    sums[j - 1] = acc;
  }
  return sums;
}

// sum_j sqrt(v_1^j) Lambda_j * weight(j); weight == 1 gives the skewness sum.
template <class Weight>
double weighted_coupling_sum(const ForwardVarianceModel& model, std::span<const double> sums,
                             Weight&& weight) {
  double acc = 0.0;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    const int j = static_cast<int>(k) + 1;
    acc += std::sqrt(model.forward_variance(j)) * sums[k] * weight(j);
  }
  return acc;
}

double first_day_coupling_sum(const ForwardVarianceModel& model, int maturity) {
  double acc = 0.0;
  for (int j = 2; j <= maturity + 1; ++j) acc += model.coupling(1, j);
  return acc;
}

}  // namespace

ForwardVarianceModel::ForwardVarianceModel(std::vector<double> initial_curve, CouplingKernel kernel,
                                           double vol_of_vol, ShockFunction shock)
    : curve_(std::move(initial_curve)),
      kernel_(std::move(kernel)),
      vol_of_vol_(vol_of_vol),
      shock_(std::move(shock)) {
  if (curve_.empty()) fail(ErrorCode::kDomain, "initial forward curve is empty");
  if (!kernel_) fail(ErrorCode::kDomain, "coupling kernel is required");
  if (!(vol_of_vol_ >= 0.0) || !std::isfinite(vol_of_vol_)) {
    fail(ErrorCode::kDomain, "vol of vol must be finite and non-negative");
  }
  cumulative_.reserve(curve_.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < curve_.size(); ++j) {
    if (!(curve_[j] > 0.0) || !std::isfinite(curve_[j])) {
      fail(ErrorCode::kDomain, "forward variances must be positive and finite",
           "day=" + std::to_string(j + 1));
    }
    acc += curve_[j];
    cumulative_.push_back(acc);
  }
}

double ForwardVarianceModel::forward_variance(int j) const {
  if (j < 1 || j > horizon()) {
    fail(ErrorCode::kRange, "forward variance day out of range", "day=" + std::to_string(j));
  }
  return curve_[j - 1];
}

double ForwardVarianceModel::total_variance(int maturity) const {
  if (maturity < 1 || maturity > horizon()) {
    fail(ErrorCode::kRange, "maturity out of range", "T=" + std::to_string(maturity));
  }
  return cumulative_[maturity - 1];
}

double ForwardVarianceModel::coupling(int i, int j) const {
  if (i < 1 || i >= j || j > horizon()) {
    fail(ErrorCode::kDomain, "coupling needs 1 <= i < j <= horizon",
         "i=" + std::to_string(i) + " j=" + std::to_string(j));
  }
  return kernel_(i, j, curve_);
}

ForwardVarianceModel ForwardVarianceModel::with_shock(ShockFunction shock) const {
  return ForwardVarianceModel(curve_, kernel_, vol_of_vol_, std::move(shock));
}

ForwardVarianceModel ForwardVarianceModel::with_vol_of_vol(double vol_of_vol) const {
  return ForwardVarianceModel(curve_, kernel_, vol_of_vol, shock_);
}

CouplingKernel stationary_kernel(std::function<double(int lag)> by_lag) {
  if (!by_lag) fail(ErrorCode::kDomain, "lag function is required");
  return [g = std::move(by_lag)](int i, int j, std::span<const double>) { return g(j - i); };
}

CouplingKernel exponential_kernel(double amplitude, double tau) {
  if (!(tau > 0.0)) fail(ErrorCode::kDomain, "relaxation time must be positive");
  return [amplitude, tau](int i, int j, std::span<const double>) {
    return amplitude * std::exp(-static_cast<double>(j - i) / tau);
  };
}

double total_variance(const ForwardVarianceModel& model, int maturity) {
  require_maturity(model, maturity);
  return model.total_variance(maturity);
}

std::vector<double> smile_curve(const ForwardVarianceModel& model, int maturity,
                                std::span<const double> moneyness) {
  require_maturity(model, maturity);
  const double total_var = model.total_variance(maturity);
  const double atm = std::sqrt(total_var / maturity);
  const double scale = model.vol_of_vol() / (2.0 * std::sqrt(total_var * maturity));
  const auto sums = coupling_column_sums(model, maturity);
  const auto& shock = model.shock();

  std::vector<double> vols;
  vols.reserve(moneyness.size());
  for (double m : moneyness) {
    if (!std::isfinite(m)) fail(ErrorCode::kDomain, "moneyness must be finite");
    double acc = 0.0;
    for (std::size_t k = 0; k < sums.size(); ++k) {
      const double weight = model.forward_variance(static_cast<int>(k) + 1) / total_var;
      acc += sums[k] * shock.conditional_mean(m * std::sqrt(weight), 1.0 - weight);
    }
    const double vol = atm + scale * acc;
    if (!(vol > 0.0)) {
      fail(ErrorCode::kVolOfVolTooLarge, "order-1 smile gives a non-positive implied vol",
           "T=" + std::to_string(maturity) + " M=" + std::to_string(m));
    }
    vols.push_back(vol);
  }
  return vols;
}

double skew(const ForwardVarianceModel& model, int maturity) {
  require_maturity(model, maturity);
  if (maturity == 1) return 0.0;
  const double total_var = model.total_variance(maturity);
  const auto sums = coupling_column_sums(model, maturity);
  const auto& shock = model.shock();
  const double acc = weighted_coupling_sum(model, sums, [&](int j) {
    return shock.deriv_mean(1.0 - model.forward_variance(j) / total_var);
  });
  return model.vol_of_vol() / (2.0 * std::pow(total_var, 1.5)) * acc;
}

double skewness_over_6(const ForwardVarianceModel& model, int maturity) {
  require_maturity(model, maturity);
  if (maturity == 1) return 0.0;
  const double total_var = model.total_variance(maturity);
  const auto sums = coupling_column_sums(model, maturity);
  const double deriv = model.shock().deriv_mean(1.0);
  const double acc = weighted_coupling_sum(model, sums, [&](int) { return deriv; });
  return model.vol_of_vol() / (2.0 * std::pow(total_var, 1.5)) * acc;
}

double implied_leverage(const ForwardVarianceModel& model, int maturity) {
  require_maturity(model, maturity, 1);
  const double total_var = model.total_variance(maturity);
  const double sigma1_sq = model.forward_variance(1);
  return model.vol_of_vol() * model.shock().deriv_mean(1.0) /
         (2.0 * std::sqrt(maturity * sigma1_sq * total_var)) *
         first_day_coupling_sum(model, maturity);
}

double leverage_from_lambda(const ForwardVarianceModel& model, int day, int lag) {
  if (lag < 1) fail(ErrorCode::kDomain, "lag must be at least one day");
  if (day < 1 || day + lag > model.horizon()) {
    fail(ErrorCode::kRange, "day/lag outside the forward curve",
         "day=" + std::to_string(day) + " lag=" + std::to_string(lag));
  }
  return model.vol_of_vol() * std::sqrt(model.forward_variance(day)) *
         model.coupling(day, day + lag) * model.shock().deriv_mean(1.0);
}

double gamma_from_leverage(std::span<const double> leverage, double sigma1, double total_var,
                           int maturity) {
  if (maturity < 1) fail(ErrorCode::kDomain, "maturity must be at least one day");
  if (!(sigma1 > 0.0)) fail(ErrorCode::kDomain, "sigma_1 must be positive");
  if (!(total_var > 0.0)) fail(ErrorCode::kDomain, "total variance must be positive");
  if (leverage.size() != static_cast<std::size_t>(maturity)) {
    fail(ErrorCode::kRange, "need E[r_1 r_j^2] for j = 2..T+1",
         "got " + std::to_string(leverage.size()) + " values for T=" + std::to_string(maturity));
  }
  double acc = 0.0;
  for (double x : leverage) acc += x;
  const double s2 = sigma1 * sigma1;
  return acc / (2.0 * std::sqrt(maturity * s2 * s2 * total_var));
}

double ssr_linear(const ForwardVarianceModel& model, int maturity) {
  require_maturity(model, maturity, 1);
  if (maturity < 2) fail(ErrorCode::kDomain, "SSR needs T >= 2");
  const auto sums = coupling_column_sums(model, maturity);
  const double denom = weighted_coupling_sum(model, sums, [](int) { return 1.0; });
  if (denom == 0.0) fail(ErrorCode::kDegenerate, "all couplings vanish; SSR undefined");
  const double total_var = model.total_variance(maturity);
  const double sigma1 = std::sqrt(model.forward_variance(1));
  return total_var / sigma1 * first_day_coupling_sum(model, maturity) / denom;
}

double ssr(const ForwardVarianceModel& model, int maturity) {
  require_maturity(model, maturity, 1);
  if (maturity < 2) fail(ErrorCode::kDomain, "SSR needs T >= 2");
  const double sk = skew(model, maturity);
  if (sk == 0.0) fail(ErrorCode::kDegenerate, "zero skew; SSR undefined");
  return ssr_linear(model, maturity) * (skewness_over_6(model, maturity) / sk);
}

FlatExponentialSsr ssr_flat_exponential(double amplitude, double tau, int maturity) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) fail(ErrorCode::kDomain, "amplitude must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::kDomain, "relaxation time must be positive");
  if (maturity < 2) fail(ErrorCode::kDomain, "SSR needs T >= 2");
  double num = 0.0;
  double den = 0.0;
  for (int l = 1; l <= maturity; ++l) {
    const double g = -amplitude * std::exp(-l / tau);
    num += g;
    den += (1.0 - static_cast<double>(l) / maturity) * g;
  }
  const double t = maturity;
  const double decay = -std::expm1(-t / tau);
  return {num / den, t * decay / (t - tau * decay)};
}

SmileReport smile_report(const ForwardVarianceModel& model, int maturity) {
  require_maturity(model, maturity, 1);
  SmileReport report;
  report.maturity = maturity;
  report.atm_vol = std::sqrt(model.total_variance(maturity) / maturity);
  report.skew = skew(model, maturity);
  report.skewness_over_6 = skewness_over_6(model, maturity);
  report.implied_leverage = implied_leverage(model, maturity);
  if (maturity == 1) {
    report.warnings.emplace_back("T=1: skew and skewness are empty sums, reported as 0");
  }
  if (report.skew != 0.0) {
    report.ssr = report.implied_leverage * std::sqrt(static_cast<double>(maturity)) / report.skew;
    report.correction_factor = report.skewness_over_6 / report.skew;
  } else {
    report.warnings.emplace_back("zero skew: SSR and correction factor undefined");
  }
  return report;
}

double shifted_moneyness(double log_moneyness, double total_var) {
  if (!(total_var > 0.0)) fail(ErrorCode::kDomain, "total variance must be positive");
  return (log_moneyness + 0.5 * total_var) / std::sqrt(total_var);
}

double log_moneyness_from_shifted(double moneyness, double total_var) {
  if (!(total_var > 0.0)) fail(ErrorCode::kDomain, "total variance must be positive");
  return moneyness * std::sqrt(total_var) - 0.5 * total_var;
}

double unshifted_moneyness(double log_moneyness, double atm_vol, int maturity) {
  if (!(atm_vol > 0.0) || maturity < 1) fail(ErrorCode::kDomain, "need positive vol and maturity");
  return log_moneyness / (atm_vol * std::sqrt(static_cast<double>(maturity)));
}

}  // namespace smilelab
