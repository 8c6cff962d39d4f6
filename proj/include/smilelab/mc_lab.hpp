#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smilelab/garch.hpp"

namespace smilelab {

enum class McShock { kGarch, kLinear };

/// Monte Carlo run description. Paths start at S_1 = 1 and use martingale-adjusted
/// log-returns -sigma_i^2/2 + sigma_i eps_i. Strikes are set on the shifted moneyness
/// grid, K = exp(M sqrt(V_T) - V_T/2).
struct McConfig {
  GarchParams params;
  std::vector<int> maturities{20, 40, 60};
  std::vector<double> moneyness{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> skew_grid{-0.2, -0.1, 0.0, 0.1, 0.2};
  std::int64_t n_paths = 1'000'000;
  std::uint64_t seed = 42;
  bool antithetic = true;
  double target_se = 0.0;  // ATM vol standard-error budget; 0 disables the check
  McShock shock = McShock::kGarch;
  bool nested_leverage = false;
  int nested_outer = 1000;
  int nested_inner = 10000;

  void validate() const;
};

inline constexpr int kMcBatches = 32;

struct McSmilePoint {
  double moneyness = 0.0;
  double strike = 0.0;
  double price = 0.0;
  double price_se = 0.0;
  double implied_vol = 0.0;  // per sqrt(day)
  double vol_se = 0.0;
  double analytic_vol = 0.0;
  double z = 0.0;  // (mc - analytic) / se
  bool excluded = false;
};

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
  double analytic = 0.0;
  double z = 0.0;
};

struct McMaturity {
  int maturity = 0;
  std::vector<McSmilePoint> smile;
  McEstimate atm_vol;   // vol at M = 0 against the order-1 smile at M = 0
  double sqrt_vt_over_t = 0.0;
  McEstimate skew;      // b/a of an OLS line over skew_grid, against skew_T
  McEstimate gamma;     // order-1 curve update, linearised vol change
  McEstimate gamma_sqrt;  // same update, exact square root (diagnostic)
  std::optional<McEstimate> gamma_nested;
  std::optional<McEstimate> ssr;  // gamma sqrt(T)/skew, against ssr()
  std::string ssr_note;
  std::size_t excluded_strikes = 0;
};

struct McResult {
  std::vector<McMaturity> maturities;
  std::uint64_t floor_hits = 0;
  std::int64_t n_paths = 0;
  int batches = kMcBatches;
  std::vector<std::string> warnings;
};

/// Full run: smile, implied leverage and SSR per maturity. Standard errors are
/// jackknife over 32 batch means. Bit-identical for a given config.
McResult run_mc(const McConfig& config);

/// Smile section only (leverage and SSR fields left empty).
McResult mc_smile(const McConfig& config);
/// gamma_T per maturity.
std::vector<McEstimate> mc_implied_leverage(const McConfig& config);
/// R_T per maturity; throws kInsignificant if a skew is within 5 SE of zero.
std::vector<McEstimate> mc_ssr(const McConfig& config);

/// Nested repricing: regresses the change of the K = S implied vol between day 1
/// and day 2 on r_1, with inner paths shared across outer paths.
McEstimate mc_nested_leverage(const McConfig& config, int maturity);

}  // namespace smilelab
