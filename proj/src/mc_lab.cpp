#include "smilelab/mc_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "smilelab/bs_core.hpp"
#include "smilelab/error.hpp"
#include "smilelab/estimators.hpp"
#include "smilelab/forward_variance.hpp"
#include "smilelab/parallel.hpp"

namespace smilelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double shock_value(McShock kind, double e) {
  if (kind == McShock::kLinear) return e;
  return (e < 0.0 ? e * e : 0.0) - 0.5;
}

ForwardVarianceModel analytic_model(const McConfig& c, int horizon) {
  auto model = make_model(c.params, horizon);
  if (c.shock == McShock::kLinear) return model.with_shock(linear_shock());
  return model;
}

// Per-maturity layout of the strike list: [M = 0, moneyness..., skew_grid...].
struct Layout {
  std::size_t n_strikes = 0;
  std::size_t smile_offset = 1;
  std::size_t skew_offset = 0;
};

struct BatchSums {
  std::vector<double> payoff;    // maturity-major, n_strikes per maturity
  std::vector<double> payoff_sq;
  std::vector<double> lev_lin;   // per maturity: sum dsigma * r_1
  std::vector<double> lev_sqrt;
  std::vector<double> r1_sq;
  double count = 0.0;
  std::uint64_t floor_hits = 0;

  void resize(std::size_t n_mat, std::size_t n_strikes) {
    payoff.assign(n_mat * n_strikes, 0.0);
    payoff_sq.assign(n_mat * n_strikes, 0.0);
    lev_lin.assign(n_mat, 0.0);
    lev_sqrt.assign(n_mat, 0.0);
    r1_sq.assign(n_mat, 0.0);
  }
  void add(const BatchSums& o, double sign) {
    for (std::size_t k = 0; k < payoff.size(); ++k) payoff[k] += sign * o.payoff[k];
    for (std::size_t k = 0; k < lev_lin.size(); ++k) {
      lev_lin[k] += sign * o.lev_lin[k];
      lev_sqrt[k] += sign * o.lev_sqrt[k];
      r1_sq[k] += sign * o.r1_sq[k];
    }
    count += sign * o.count;
  }
};

double implied_vol_or_nan(double price, double strike, int maturity) {
  const double intrinsic = std::max(1.0 - strike, 0.0);
  if (!(price > intrinsic) || !(price < 1.0)) return kNaN;
  try {
    return std::sqrt(implied_total_variance(price, 1.0, strike) / maturity);
  } catch (const Error&) {
    return kNaN;
  }
}

struct MaturityStats {
  std::vector<double> vols;  // per strike
  double skew = kNaN;
  double gamma = kNaN;
  double gamma_sqrt = kNaN;
};

double ols_skew(std::span<const double> m, std::span<const double> vols) {
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (std::isnan(vols[k])) continue;
    n += 1.0;
    sx += m[k];
    sy += vols[k];
    sxx += m[k] * m[k];
    sxy += m[k] * vols[k];
  }
  if (n < 3.0) return kNaN;
  const double det = n * sxx - sx * sx;
  if (det <= 0.0) return kNaN;
  const double b = (n * sxy - sx * sy) / det;
  const double a = (sy - b * sx) / n;
  return b / a;
}

MaturityStats stats_from(const BatchSums& s, std::size_t t_index, int maturity,
                         std::span<const double> strikes, std::span<const double> skew_grid,
                         const Layout& layout) {
  MaturityStats out;
  out.vols.resize(layout.n_strikes);
  for (std::size_t k = 0; k < layout.n_strikes; ++k) {
    const double price = s.payoff[t_index * layout.n_strikes + k] / s.count;
    out.vols[k] = implied_vol_or_nan(price, strikes[k], maturity);
  }
  out.skew = ols_skew(skew_grid, std::span<const double>(out.vols).subspan(layout.skew_offset, skew_grid.size()));
  if (s.r1_sq[t_index] > 0.0) {
    out.gamma = s.lev_lin[t_index] / s.r1_sq[t_index];
    out.gamma_sqrt = s.lev_sqrt[t_index] / s.r1_sq[t_index];
  }
  return out;
}

// Jackknife standard error from leave-one-batch-out replicates.
double jackknife_se(std::span<const double> replicates) {
  const double b = static_cast<double>(replicates.size());
  double mean = 0.0;
  for (double x : replicates) {
    if (std::isnan(x)) return kNaN;
    mean += x;
  }
  mean /= b;
  double ss = 0.0;
  for (double x : replicates) ss += (x - mean) * (x - mean);
  return std::sqrt((b - 1.0) / b * ss);
}

McEstimate make_estimate(double value, double se, double analytic) {
  McEstimate e{value, se, analytic, kNaN};
  if (se > 0.0 && std::isfinite(se)) e.z = (value - analytic) / se;
  return e;
}

}  // namespace

void McConfig::validate() const {
  params.validate();
  if (maturities.empty()) fail(ErrorCode::kConfig, "need at least one maturity");
  for (int t : maturities) {
    if (t < 2) fail(ErrorCode::kConfig, "maturities must be at least 2 days", "T=" + std::to_string(t));
  }
  if (n_paths < 10000) fail(ErrorCode::kConfig, "n_paths must be at least 10^4");
  if (antithetic && n_paths % 2 != 0) fail(ErrorCode::kConfig, "antithetic runs need an even n_paths");
  if (skew_grid.size() < 3) fail(ErrorCode::kConfig, "skew grid needs at least 3 points");
  for (double m : moneyness) {
    if (!std::isfinite(m)) fail(ErrorCode::kConfig, "moneyness must be finite");
  }
  for (double m : skew_grid) {
    if (!std::isfinite(m)) fail(ErrorCode::kConfig, "skew grid must be finite");
  }
  if (!(target_se >= 0.0)) fail(ErrorCode::kConfig, "target_se must be non-negative");
  if (nested_outer < 30 || nested_inner < 100) fail(ErrorCode::kConfig, "nested run too small");
}

McResult run_mc(const McConfig& config) {
  config.validate();
  std::vector<int> mats = config.maturities;
  std::sort(mats.begin(), mats.end());
  mats.erase(std::unique(mats.begin(), mats.end()), mats.end());
  const int max_t = mats.back();
  const std::size_t n_mat = mats.size();
  const auto& p = config.params;
  const auto model = analytic_model(config, max_t + 1);

  Layout layout;
  layout.n_strikes = 1 + config.moneyness.size() + config.skew_grid.size();
  layout.skew_offset = 1 + config.moneyness.size();

  // Strikes and order-1 curve-update coefficients per maturity.
  std::vector<std::vector<double>> strikes(n_mat);
  std::vector<double> lev_coupling(n_mat), lev_drift(n_mat), total_var(n_mat);
  for (std::size_t t = 0; t < n_mat; ++t) {
    const int T = mats[t];
    const double v = model.total_variance(T);
    total_var[t] = v;
    auto strike = [&](double m) { return std::exp(m * std::sqrt(v) - 0.5 * v); };
    strikes[t].push_back(strike(0.0));
    for (double m : config.moneyness) strikes[t].push_back(strike(m));
    for (double m : config.skew_grid) strikes[t].push_back(strike(m));
    double acc = 0.0;
    for (int j = 2; j <= T + 1; ++j) acc += model.coupling(1, j);
    lev_coupling[t] = acc;
    lev_drift[t] = model.forward_variance(T + 1) - model.forward_variance(1);
  }

  const std::int64_t n_units = config.antithetic ? config.n_paths / 2 : config.n_paths;
  const int signs = config.antithetic ? 2 : 1;
  std::vector<BatchSums> batches(kMcBatches);
  for (auto& b : batches) b.resize(n_mat, layout.n_strikes);

  const double v02 = p.v0 * p.v0;
  const double floor = kVarianceFloor * v02;
  const double s2_start = v02 * (1.0 + p.x1);
  const double sigma1 = std::sqrt(s2_start);

  parallel_blocks(kMcBatches, [&](int b) {
    auto& acc = batches[b];
    const std::int64_t first = n_units * b / kMcBatches;
    const std::int64_t last = n_units * (b + 1) / kMcBatches;
    std::vector<double> eps(max_t);
    std::vector<double> log_s(n_mat);
    for (std::int64_t unit = first; unit < last; ++unit) {
      auto engine = stream_engine(config.seed, static_cast<std::uint64_t>(unit));
      std::normal_distribution<double> normal;
      for (auto& e : eps) e = normal(engine);
      for (int sgn = 0; sgn < signs; ++sgn) {
        const double flip = sgn == 0 ? 1.0 : -1.0;
        double s2 = s2_start;
        double x = 0.0;
        std::size_t next = 0;
        for (int i = 0; i < max_t; ++i) {
          const double e = flip * eps[i];
          x += -0.5 * s2 + std::sqrt(s2) * e;
          s2 = v02 + p.rho * (s2 - v02) + p.nu * s2 * shock_value(config.shock, e);
          if (s2 < floor) {
            s2 = floor;
            ++acc.floor_hits;
          }
          if (i + 1 == mats[next]) log_s[next++] = x;
        }
        const double e1 = flip * eps[0];
        const double r1 = sigma1 * e1;
        const double f1 = shock_value(config.shock, e1);
        for (std::size_t t = 0; t < n_mat; ++t) {
          const double st = std::exp(log_s[t]);
          double* pay = &acc.payoff[t * layout.n_strikes];
          for (std::size_t k = 0; k < layout.n_strikes; ++k) {
            pay[k] += std::max(st - strikes[t][k], 0.0);
          }
          const double shift = lev_drift[t] + p.nu * f1 * lev_coupling[t];
          const double T = mats[t];
          const double d_lin = shift / (2.0 * std::sqrt(T * total_var[t]));
          const double d_sqrt =
              std::sqrt(std::max(total_var[t] + shift, 0.0) / T) - std::sqrt(total_var[t] / T);
          acc.lev_lin[t] += d_lin * r1;
          acc.lev_sqrt[t] += d_sqrt * r1;
          acc.r1_sq[t] += r1 * r1;
        }
        acc.count += 1.0;
      }
    }
  });

  BatchSums total;
  total.resize(n_mat, layout.n_strikes);
  for (const auto& b : batches) {
    total.add(b, 1.0);
    total.floor_hits += b.floor_hits;
  }

  McResult result;
  result.n_paths = config.n_paths;
  result.floor_hits = total.floor_hits;
  if (total.floor_hits > 0) {
    result.warnings.push_back("variance floor hit " + std::to_string(total.floor_hits) + " times");
  }

  for (std::size_t t = 0; t < n_mat; ++t) {
    const int T = mats[t];
    const auto full = stats_from(total, t, T, strikes[t], config.skew_grid, layout);
    std::vector<MaturityStats> loo;
    loo.reserve(kMcBatches);
    for (const auto& b : batches) {
      BatchSums s = total;
      s.add(b, -1.0);
      loo.push_back(stats_from(s, t, T, strikes[t], config.skew_grid, layout));
    }
    auto se_of = [&](auto member) {
      std::vector<double> reps;
      reps.reserve(loo.size());
      for (const auto& s : loo) reps.push_back(member(s));
      return jackknife_se(reps);
    };

    McMaturity out;
    out.maturity = T;
    out.sqrt_vt_over_t = std::sqrt(total_var[t] / T);
    const auto analytic_smile = smile_curve(model, T, config.moneyness);
    const double analytic_atm = smile_curve(model, T, std::vector<double>{0.0})[0];

    for (std::size_t k = 0; k < config.moneyness.size(); ++k) {
      const std::size_t idx = layout.smile_offset + k;
      McSmilePoint pt;
      pt.moneyness = config.moneyness[k];
      pt.strike = strikes[t][idx];
      pt.price = total.payoff[t * layout.n_strikes + idx] / total.count;
      std::vector<double> batch_prices;
      for (const auto& b : batches) batch_prices.push_back(b.payoff[t * layout.n_strikes + idx] / b.count);
      double mean = 0.0;
      for (double x : batch_prices) mean += x;
      mean /= kMcBatches;
      double ss = 0.0;
      for (double x : batch_prices) ss += (x - mean) * (x - mean);
      pt.price_se = std::sqrt(ss / (kMcBatches - 1) / kMcBatches);
      pt.implied_vol = full.vols[idx];
      pt.vol_se = se_of([&](const MaturityStats& s) { return s.vols[idx]; });
      pt.analytic_vol = analytic_smile[k];
      pt.excluded = std::isnan(pt.implied_vol) || std::isnan(pt.vol_se);
      if (pt.excluded) {
        ++out.excluded_strikes;
      } else if (pt.vol_se > 0.0) {
        pt.z = (pt.implied_vol - pt.analytic_vol) / pt.vol_se;
      }
      out.smile.push_back(pt);
    }
    for (std::size_t k = 0; k < config.skew_grid.size(); ++k) {
      if (std::isnan(full.vols[layout.skew_offset + k])) ++out.excluded_strikes;
    }

    out.atm_vol = make_estimate(full.vols[0], se_of([](const MaturityStats& s) { return s.vols[0]; }),
                                analytic_atm);
    out.skew = make_estimate(full.skew, se_of([](const MaturityStats& s) { return s.skew; }),
                             skew(model, T));
    out.gamma = make_estimate(full.gamma, se_of([](const MaturityStats& s) { return s.gamma; }),
                              implied_leverage(model, T));
    out.gamma_sqrt = make_estimate(full.gamma_sqrt,
                                   se_of([](const MaturityStats& s) { return s.gamma_sqrt; }),
                                   out.gamma.analytic);

    // SSR only when the skew is clearly non-zero.
    const double skew_z = std::abs(out.skew.value) / out.skew.se;
    if (std::isfinite(skew_z) && skew_z >= 5.0) {
      auto ratio = [T](const MaturityStats& s) { return s.gamma * std::sqrt(static_cast<double>(T)) / s.skew; };
      double analytic = kNaN;
      if (out.skew.analytic != 0.0) analytic = ssr(model, T);
      out.ssr = make_estimate(ratio(full), se_of(ratio), analytic);
    } else {
      out.ssr_note = "skew within 5 standard errors of zero (|skew|/se = " + std::to_string(skew_z) + ")";
    }

    if (config.nested_leverage) out.gamma_nested = mc_nested_leverage(config, T);
    if (config.target_se > 0.0 && out.atm_vol.se > config.target_se) {
      result.warnings.push_back("T=" + std::to_string(T) + ": ATM vol standard error " +
                                std::to_string(out.atm_vol.se) + " exceeds the target");
    }
    result.maturities.push_back(std::move(out));
  }
  return result;
}

McResult mc_smile(const McConfig& config) {
  auto result = run_mc(config);
  for (auto& m : result.maturities) {
    m.gamma = {};
    m.gamma_sqrt = {};
    m.gamma_nested.reset();
    m.ssr.reset();
    m.ssr_note.clear();
  }
  return result;
}

std::vector<McEstimate> mc_implied_leverage(const McConfig& config) {
  const auto result = run_mc(config);
  std::vector<McEstimate> out;
  for (const auto& m : result.maturities) out.push_back(m.gamma);
  return out;
}

std::vector<McEstimate> mc_ssr(const McConfig& config) {
  const auto result = run_mc(config);
  std::vector<McEstimate> out;
  for (const auto& m : result.maturities) {
    if (!m.ssr) {
      fail(ErrorCode::kInsignificant, "refusing to report an SSR", "T=" + std::to_string(m.maturity) + ": " + m.ssr_note);
    }
    out.push_back(*m.ssr);
  }
  return out;
}

McEstimate mc_nested_leverage(const McConfig& config, int maturity) {
  config.validate();
  if (maturity < 2) fail(ErrorCode::kDomain, "maturity must be at least 2 days");
  const auto& p = config.params;
  const double v02 = p.v0 * p.v0;
  const double floor = kVarianceFloor * v02;
  const int n_inner = config.nested_inner;
  const int n_outer = config.nested_outer;

  // Inner innovations shared by every outer path.
  std::vector<double> inner(static_cast<std::size_t>(n_inner) * maturity);
  {
    auto engine = stream_engine(config.seed, 0x4000000000000000ULL);
    std::normal_distribution<double> normal;
    for (auto& e : inner) e = normal(engine);
  }
  auto atm_vol_from = [&](double s2_start) {
    double payoff = 0.0;
    for (int k = 0; k < n_inner; ++k) {
      double s2 = s2_start;
      double x = 0.0;
      const double* e = &inner[static_cast<std::size_t>(k) * maturity];
      for (int i = 0; i < maturity; ++i) {
        x += -0.5 * s2 + std::sqrt(s2) * e[i];
        s2 = std::max(v02 + p.rho * (s2 - v02) + p.nu * s2 * shock_value(config.shock, e[i]), floor);
      }
      payoff += std::max(std::exp(x) - 1.0, 0.0);
    }
    return implied_vol_or_nan(payoff / n_inner, 1.0, maturity);
  };

  const double s2_1 = v02 * (1.0 + p.x1);
  const double base = atm_vol_from(s2_1);
  std::vector<double> r1(n_outer), dsigma(n_outer);
  parallel_blocks(n_outer, [&](int k) {
    auto engine = stream_engine(config.seed, 0x2000000000000000ULL + static_cast<std::uint64_t>(k));
    std::normal_distribution<double> normal;
    const double e = normal(engine);
    const double s2_2 =
        std::max(v02 + p.rho * (s2_1 - v02) + p.nu * s2_1 * shock_value(config.shock, e), floor);
    r1[k] = std::sqrt(s2_1) * e;
    dsigma[k] = atm_vol_from(s2_2) - base;
  });
  for (double d : dsigma) {
    if (std::isnan(d)) fail(ErrorCode::kNumerical, "nested repricing produced an invalid price");
  }
  const auto fit = slope_through_origin(r1, dsigma);
  const auto model = analytic_model(config, maturity + 1);
  return make_estimate(fit.slope, fit.se, implied_leverage(model, maturity));
}

}  // namespace smilelab
