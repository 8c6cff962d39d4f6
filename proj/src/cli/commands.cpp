#include "smilelab/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>

#include <fmt/format.h>

#include "smilelab/cli/io.hpp"
#include "smilelab/cli/run_config.hpp"
#include "smilelab/error.hpp"
#include "smilelab/estimators.hpp"
#include "smilelab/forward_variance.hpp"
#include "smilelab/garch.hpp"
#include "smilelab/mc_lab.hpp"

#ifndef SMILELAB_VERSION
#define SMILELAB_VERSION "0.0.0"
#endif

namespace smilelab::cli {

std::string tool_version() { return SMILELAB_VERSION; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Row = std::vector<std::string>;

std::string num(double v) { return format_number(v, 12); }

// JSON numbers carry the same 12 significant digits as the CSV tables.
Json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v, 12));
}

Json jopt(const std::optional<double>& v) { return v ? jnum(*v) : Json(nullptr); }

struct Table {
  std::string name;
  Row header;
  std::vector<Row> rows;
};

// Collects outputs and writes them only after the command finished.
class Output {
 public:
  explicit Output(const RunConfig& config) : config_(config) {}

  void add_input(const std::string& key, const std::string& path) {
    inputs_[key] = {{"path", path}, {"sha256", file_sha256(path)}};
  }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_table(Table t) { tables_.push_back(std::move(t)); }
  void add_surface(std::string name, std::vector<SmileSurface> s) {
    surfaces_.emplace_back(std::move(name), std::move(s));
  }
  void add_returns(std::string name, ReturnSeries s) { returns_.emplace_back(std::move(name), std::move(s)); }
  void set_results(Json results) { results_ = std::move(results); }

  Json metadata() const {
    Json meta = Json::object();
    meta["tool"] = "smile_lab";
    meta["version"] = tool_version();
    meta["command"] = config_.command();
    meta["config"] = config_.resolved();
    meta["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
    meta["input_hashes"] = inputs_;
    return meta;
  }

  std::vector<std::string> comment_lines() const {
    const auto meta = metadata();
    return {fmt::format("tool: smile_lab {}", tool_version()),
            "command: " + config_.command(),
            "config: " + meta["config"].dump(),
            "seed: " + meta["seed"].dump(),
            "input_hashes: " + meta["input_hashes"].dump()};
  }

  std::vector<std::string> write() const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config_.out_dir(), ec);
    if (ec) fail(ErrorCode::kIo, "cannot create output directory", config_.out_dir());
    std::vector<std::string> written;
    const auto comments = comment_lines();
    auto path_of = [&](const std::string& name) { return (fs::path(config_.out_dir()) / name).string(); };

    for (const auto& t : tables_) {
      std::string text;
      for (const auto& c : comments) text += "# " + c + "\n";
      text += join(t.header) + "\n";
      for (const auto& r : t.rows) text += join(r) + "\n";
      const auto path = path_of(t.name);
      write_text_file(path, text);
      written.push_back(path);
    }
    for (const auto& [name, s] : surfaces_) {
      const auto path = path_of(name);
      save_surface(path, s, 12, comments);
      written.push_back(path);
    }
    for (const auto& [name, s] : returns_) {
      const auto path = path_of(name);
      save_returns(path, s, 17, comments);
      written.push_back(path);
    }
    auto doc = metadata();
    doc["results"] = results_;
    const auto path = path_of(config_.command() + ".json");
    write_text_file(path, doc.dump(2) + "\n");
    written.push_back(path);
    return written;
  }

 private:
  static std::string join(const Row& r) {
    std::string s;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) s += ',';
      s += r[k];
    }
    return s;
  }

  const RunConfig& config_;
  std::optional<std::uint64_t> seed_;
  Json inputs_ = Json::object();
  std::vector<Table> tables_;
  std::vector<std::pair<std::string, std::vector<SmileSurface>>> surfaces_;
  std::vector<std::pair<std::string, ReturnSeries>> returns_;
  Json results_ = Json::object();
};

std::vector<OptionSpec> garch_specs(double nu_default) {
  return {
      {"v0", OptionType::kDouble, 0.179, "GARCH baseline vol, annualized"},
      {"rho", OptionType::kDouble, 0.988, "GARCH mean reversion per day"},
      {"nu", OptionType::kDouble, nu_default, "GARCH vol of vol"},
      {"x1", OptionType::kDouble, 0.0, "initial relative variance offset X_1"},
      {"days-per-year", OptionType::kDouble, kTradingDaysPerYear, "annualization factor"},
  };
}

// Later specs with an existing name are dropped.
std::vector<OptionSpec> concat(std::vector<OptionSpec> a, const std::vector<OptionSpec>& b) {
  for (const auto& spec : b) {
    const bool seen = std::any_of(a.begin(), a.end(), [&](const OptionSpec& s) { return s.name == spec.name; });
    if (!seen) a.push_back(spec);
  }
  return a;
}

GarchParams garch_from(const RunConfig& c) {
  return GarchParams::from_annualized(c.get_double("v0"), c.get_double("rho"), c.get_double("nu"),
                                      c.get_double("x1"), c.get_double("days-per-year"));
}

int max_of(const std::vector<int>& v) {
  if (v.empty()) fail(ErrorCode::kConfig, "maturity list is empty");
  return *std::max_element(v.begin(), v.end());
}

Json params_json(const GarchParams& p, double dpy) {
  return {{"v0_annualized", jnum(p.v0 * std::sqrt(dpy))},
          {"v0_daily", jnum(p.v0)},
          {"rho", jnum(p.rho)},
          {"nu", jnum(p.nu)},
          {"x1", jnum(p.x1)},
          {"relaxation_time_days", jnum(p.relaxation_time())}};
}

// ---- smile ----------------------------------------------------------------

std::vector<OptionSpec> smile_specs() {
  return concat(garch_specs(0.123),
                {{"maturities", OptionType::kIntList, "5,10,20,40,60,120,250", "maturities in days"},
                 {"moneyness", OptionType::kDoubleList, "-1..1:0.25", "shifted moneyness grid"},
                 {"date", OptionType::kString, "2000-01-03", "snapshot date written to the surface"}});
}

void run_smile(const RunConfig& c, Output& out) {
  const auto p = garch_from(c);
  const double ann = std::sqrt(c.get_double("days-per-year"));
  const auto mats = c.get_int_list("maturities");
  const auto grid = c.get_double_list("moneyness");
  const auto model = make_model(p, max_of(mats) + 1);

  SmileSurface surface;
  surface.date = parse_date(c.get_string("date"));
  Table report{"smile_report.csv",
               {"maturity_days", "atm_vol", "skew", "skewness_over_6", "implied_leverage", "ssr",
                "correction_factor"},
               {}};
  Json reports = Json::array();
  for (int T : mats) {
    const auto vols = smile_curve(model, T, grid);
    SmileSlice slice{T, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) slice.quotes.push_back({grid[k], vols[k] * ann});
    surface.slices.push_back(std::move(slice));
    const auto r = smile_report(model, T);
    report.rows.push_back({std::to_string(T), num(r.atm_vol * ann), num(r.skew), num(r.skewness_over_6),
                           num(r.implied_leverage), num(r.ssr.value_or(kNaN)),
                           num(r.correction_factor.value_or(kNaN))});
    reports.push_back({{"maturity_days", T},
                       {"atm_vol", jnum(r.atm_vol * ann)},
                       {"skew", jnum(r.skew)},
                       {"skewness_over_6", jnum(r.skewness_over_6)},
                       {"implied_leverage", jnum(r.implied_leverage)},
                       {"ssr", jopt(r.ssr)},
                       {"correction_factor", jopt(r.correction_factor)},
                       {"warnings", r.warnings}});
  }
  std::sort(surface.slices.begin(), surface.slices.end(),
            [](const SmileSlice& a, const SmileSlice& b) { return a.maturity_days < b.maturity_days; });
  surface.validate();
  out.add_surface("smile.csv", {surface});
  out.add_table(std::move(report));
  out.set_results({{"params", params_json(p, c.get_double("days-per-year"))},
                   {"moneyness_convention", "shifted: (ln(K/S) + V_T/2) / sqrt(V_T)"},
                   {"maturities", reports}});
}

// ---- ssr ------------------------------------------------------------------

std::vector<OptionSpec> ssr_specs() {
  return concat(garch_specs(0.123),
                {{"model", OptionType::kString, "garch", "garch or exponential"},
                 {"maturities", OptionType::kIntList, "2..250", "maturities in days"},
                 {"amplitude", OptionType::kDouble, 0.2, "exponential leverage amplitude A"},
                 {"tau", OptionType::kDouble, 50.0, "exponential leverage relaxation time in days"}});
}

void run_ssr(const RunConfig& c, Output& out) {
  const auto model_name = c.get_string("model");
  const auto mats = c.get_int_list("maturities");
  Json rows = Json::array();
  if (model_name == "exponential") {
    Table t{"ssr.csv", {"maturity_days", "ssr_discrete", "ssr_closed_form"}, {}};
    for (int T : mats) {
      const auto r = ssr_flat_exponential(c.get_double("amplitude"), c.get_double("tau"), T);
      t.rows.push_back({std::to_string(T), num(r.discrete), num(r.closed_form)});
      rows.push_back({{"maturity_days", T}, {"ssr_discrete", jnum(r.discrete)}, {"ssr_closed_form", jnum(r.closed_form)}});
    }
    out.add_table(std::move(t));
    out.set_results({{"model", model_name}, {"maturities", rows}});
    return;
  }
  if (model_name != "garch") fail(ErrorCode::kConfig, "model must be garch or exponential", model_name);
  const auto p = garch_from(c);
  const auto model = make_model(p, max_of(mats) + 1);
  Table t{"ssr.csv",
          {"maturity_days", "ssr_linear", "ssr", "correction_factor", "skew", "skewness_over_6",
           "implied_leverage"},
          {}};
  for (int T : mats) {
    const double lin = ssr_linear(model, T);
    const double sk = skew(model, T);
    const double sn = skewness_over_6(model, T);
    const double full = ssr(model, T);
    const double g = implied_leverage(model, T);
    t.rows.push_back({std::to_string(T), num(lin), num(full), num(sn / sk), num(sk), num(sn), num(g)});
    rows.push_back({{"maturity_days", T},
                    {"ssr_linear", jnum(lin)},
                    {"ssr", jnum(full)},
                    {"correction_factor", jnum(sn / sk)},
                    {"skew", jnum(sk)},
                    {"skewness_over_6", jnum(sn)},
                    {"implied_leverage", jnum(g)}});
  }
  out.add_table(std::move(t));
  out.set_results({{"model", model_name}, {"params", params_json(p, c.get_double("days-per-year"))}, {"maturities", rows}});
}

// ---- simulate -------------------------------------------------------------

std::vector<OptionSpec> simulate_specs() {
  return concat(garch_specs(0.123),
                {{"days", OptionType::kInt, 2520, "number of simulated days"},
                 {"seed", OptionType::kInt, 42, "random seed"},
                 {"start-date", OptionType::kString, "2000-01-03", "date of the first return"},
                 {"adjusted", OptionType::kBool, false, "emit martingale-adjusted returns"}});
}

void run_simulate(const RunConfig& c, Output& out) {
  const auto p = garch_from(c);
  const int days = c.get_int("days");
  const auto seed = static_cast<std::uint64_t>(c.get_int("seed"));
  out.set_seed(seed);
  const auto paths = simulate(p, days, 1, seed);
  ReturnSeries s;
  const auto returns = c.get_bool("adjusted") ? paths.path_adjusted_returns(0) : paths.path_raw_returns(0);
  s.returns.assign(returns.begin(), returns.end());
  Date d = parse_date(c.get_string("start-date"));
  for (int i = 0; i < days; ++i) {
    s.dates.push_back(d);
    d = next_business_day(d);
  }
  s.validate();
  const double dpy = c.get_double("days-per-year");
  double m2 = 0.0;
  for (double r : s.returns) m2 += r * r;
  m2 /= days;
  out.set_results({{"params", params_json(p, dpy)},
                   {"floor_hits", paths.floor_hits},
                   {"realized_vol", jnum(std::sqrt(m2 * dpy))},
                   {"daily_skewness", jnum(days >= 3 ? daily_skewness(s.returns) : kNaN)}});
  out.add_returns("simulate.csv", std::move(s));
}

// ---- analyze --------------------------------------------------------------

std::vector<OptionSpec> estimator_specs() {
  return {{"returns", OptionType::kString, nullptr, "returns CSV (date,close or date,return)", true},
          {"surface", OptionType::kString, nullptr, "implied vol surface CSV (optional)"},
          {"ema-span", OptionType::kInt, 20, "EMA span for sigma_i"},
          {"detrend-span", OptionType::kInt, 1000, "EMA span of the drift"},
          {"max-lag", OptionType::kInt, 250, "largest leverage lag"},
          {"maturities", OptionType::kIntList, "5,10,20,40,60,120,250", "maturities in days"},
          {"ssr-window", OptionType::kInt, 50, "local SSR window M"},
          {"skew-window", OptionType::kDouble, 0.5, "skew fit half-width in moneyness"},
          {"days-per-year", OptionType::kDouble, kTradingDaysPerYear, "annualization factor"}};
}

struct OptionSeries {
  std::vector<double> atm;
  std::vector<double> skew;
  std::vector<double> returns;
  std::size_t skipped_dates = 0;
};

// Constant-maturity ATM vol and skew on surface dates, with returns aggregated
// between consecutive surface dates. Surface vols are annualized on input.
OptionSeries option_series(const std::vector<SmileSurface>& surfaces, const ReturnSeries& series,
                           int maturity, double window, double dpy) {
  std::map<Date, std::size_t> index;
  for (std::size_t i = 0; i < series.dates.size(); ++i) index[series.dates[i]] = i;
  const double scale = 1.0 / std::sqrt(dpy);
  struct Point {
    std::size_t idx;
    double atm;
    double skew;
  };
  std::vector<Point> pts;
  OptionSeries out;
  for (const auto& s : surfaces) {
    const auto it = index.find(s.date);
    if (it == index.end()) {
      ++out.skipped_dates;
      continue;
    }
    SmileSurface daily = s;
    for (auto& slice : daily.slices) {
      for (auto& q : slice.quotes) q.implied_vol *= scale;
    }
    try {
      const auto fit = fit_at_maturity(daily, maturity, window);
      pts.push_back({it->second, fit.atm_vol, fit.skew});
    } catch (const Error&) {
      ++out.skipped_dates;
    }
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out.atm.push_back(pts[k].atm);
    out.skew.push_back(pts[k].skew);
    double r = 0.0;
    if (k + 1 < pts.size()) {
      for (std::size_t i = pts[k].idx + 1; i <= pts[k + 1].idx; ++i) r += series.returns[i];
    }
    out.returns.push_back(r);
  }
  return out;
}

struct MaturityAnalysis {
  int maturity = 0;
  std::optional<BetaEstimate> beta;
  std::string beta_note;
  double skewness = kNaN;
  double gamma_th = kNaN;
  double option_skew = kNaN;
  std::optional<RegressionSlope> gamma;
  std::optional<LocalSsr> local;
  std::string option_note;
};

struct Analysis {
  ReturnSeries series;
  LeverageCurve leverage;
  double zeta1 = 0.0;
  std::vector<MaturityAnalysis> maturities;
  bool has_surface = false;
};

Analysis analyze_inputs(const RunConfig& c, Output& out) {
  Analysis a;
  const auto returns_path = c.get_string("returns");
  out.add_input("returns", returns_path);
  a.series = load_returns(returns_path);
  const auto& r = a.series.returns;
  const auto mats = c.get_int_list("maturities");
  const int max_lag = std::max(c.get_int("max-lag"), max_of(mats));
  const double dpy = c.get_double("days-per-year");
  a.leverage = leverage_corr(r, max_lag, c.get_int("ema-span"));
  a.zeta1 = daily_skewness(r);

  std::vector<SmileSurface> surfaces;
  if (c.has("surface")) {
    const auto path = c.get_string("surface");
    out.add_input("surface", path);
    surfaces = load_surface(path);
    a.has_surface = true;
  }
  for (int T : mats) {
    MaturityAnalysis m;
    m.maturity = T;
    try {
      m.beta = low_moment_skewness(r, T, c.get_int("detrend-span"));
    } catch (const Error& e) {
      m.beta_note = e.what();
    }
    m.skewness = skewness_from_leverage(a.leverage.g, a.zeta1, T);
    m.gamma_th = gamma_theoretical(a.leverage.g, T);
    if (a.has_surface) {
      const auto os = option_series(surfaces, a.series, T, c.get_double("skew-window"), dpy);
      if (!os.skew.empty()) {
        double acc = 0.0;
        for (double s : os.skew) acc += s;
        m.option_skew = acc / static_cast<double>(os.skew.size());
      }
      try {
        m.gamma = fit_implied_leverage(os.atm, os.returns);
        m.local = local_ssr(os.atm, os.skew, os.returns, c.get_int("ssr-window"));
      } catch (const Error& e) {
        m.option_note = e.what();
      }
    }
    a.maturities.push_back(std::move(m));
  }
  return a;
}

void run_analyze(const RunConfig& c, Output& out) {
  const auto a = analyze_inputs(c, out);
  const int window = c.get_int("ssr-window");
  Table lev{"analyze_leverage.csv", {"lag", "g_l", "se", "count"}, {}};
  for (std::size_t k = 0; k < a.leverage.g.size(); ++k) {
    lev.rows.push_back({std::to_string(k + 1), num(a.leverage.g[k]), num(a.leverage.se[k]),
                        std::to_string(a.leverage.count[k])});
  }
  Table mat{"analyze.csv",
            {"maturity_days", "beta", "beta_se", "beta_windows", "skewness_from_leverage", "gamma_th",
             "option_skew", "implied_leverage", "implied_leverage_se", "local_ssr_display",
             "local_ssr_ratio", "local_ssr_windows", "local_ssr_skipped"},
            {}};
  Json rows = Json::array();
  for (const auto& m : a.maturities) {
    const double local = m.local ? m.local->mean : kNaN;
    const double ratio = m.local ? local_ssr_to_ratio(local, m.maturity, window) : kNaN;
    mat.rows.push_back({std::to_string(m.maturity), num(m.beta ? m.beta->beta : kNaN),
                        num(m.beta ? m.beta->se : kNaN), std::to_string(m.beta ? m.beta->n_windows : 0),
                        num(m.skewness), num(m.gamma_th), num(m.option_skew),
                        num(m.gamma ? m.gamma->slope : kNaN), num(m.gamma ? m.gamma->se : kNaN), num(local),
                        num(ratio), std::to_string(m.local ? m.local->used : 0),
                        std::to_string(m.local ? m.local->skipped : 0)});
    Json row = {{"maturity_days", m.maturity},
                {"beta", m.beta ? jnum(m.beta->beta) : Json(nullptr)},
                {"beta_se", m.beta ? jnum(m.beta->se) : Json(nullptr)},
                {"skewness_from_leverage", jnum(m.skewness)},
                {"gamma_th", jnum(m.gamma_th)}};
    if (!m.beta_note.empty()) row["beta_note"] = m.beta_note;
    if (a.has_surface) {
      row["option_skew"] = jnum(m.option_skew);
      row["implied_leverage"] = m.gamma ? jnum(m.gamma->slope) : Json(nullptr);
      row["local_ssr_display"] = jnum(local);
      row["local_ssr_ratio"] = jnum(ratio);
      if (!m.option_note.empty()) row["option_note"] = m.option_note;
    }
    rows.push_back(row);
  }
  out.add_table(std::move(lev));
  out.add_table(std::move(mat));
  out.set_results({{"n_returns", a.series.size()},
                   {"daily_skewness", jnum(a.zeta1)},
                   {"beta_windows", "overlapping daily-rolling, in-sample"},
                   {"moneyness_convention", "surface moneyness taken as ln(K/S)/(sigma_ATM sqrt(T))"},
                   {"maturities", rows}});
}

// ---- calibrate ------------------------------------------------------------

std::vector<OptionSpec> calibrate_specs() {
  return {{"returns", OptionType::kString, nullptr, "returns CSV (date,close or date,return)", true},
          {"max-lag", OptionType::kInt, 100, "largest leverage lag in the fit"},
          {"bootstrap", OptionType::kInt, 200, "block bootstrap replicates"},
          {"block-length", OptionType::kInt, 5000, "bootstrap block length in days"},
          {"burn-in", OptionType::kInt, 250, "days skipped while the filter settles"},
          {"seed", OptionType::kInt, 1, "bootstrap seed"},
          {"days-per-year", OptionType::kDouble, kTradingDaysPerYear, "annualization factor"}};
}

CalibrationOptions calibration_options(const RunConfig& c) {
  CalibrationOptions o;
  o.max_lag = c.get_int("max-lag");
  o.bootstrap_replicates = c.get_int("bootstrap");
  o.block_length = c.get_int("block-length");
  o.burn_in = c.get_int("burn-in");
  o.seed = static_cast<std::uint64_t>(c.get_int("seed"));
  return o;
}

Json calibration_json(const CalibrationResult& cal, double dpy) {
  auto j = params_json(cal.params, dpy);
  j["se_v0_annualized"] = jnum(cal.se_v0 * std::sqrt(dpy));
  j["se_rho"] = jnum(cal.se_rho);
  j["se_nu"] = jnum(cal.se_nu);
  j["objective"] = jnum(cal.objective);
  j["iterations"] = cal.iterations;
  j["bootstrap_replicates"] = cal.bootstrap_replicates;
  return j;
}

void run_calibrate(const RunConfig& c, Output& out) {
  const auto path = c.get_string("returns");
  out.add_input("returns", path);
  out.set_seed(static_cast<std::uint64_t>(c.get_int("seed")));
  const auto series = load_returns(path);
  const auto cal = calibrate_garch(series.returns, calibration_options(c));
  const double dpy = c.get_double("days-per-year");
  Table t{"calibrate_leverage.csv", {"lag", "g_l", "se", "model"}, {}};
  const double amp = -cal.params.nu * std::sqrt(2.0 / std::acos(-1.0));
  for (std::size_t k = 0; k < cal.leverage.g.size(); ++k) {
    t.rows.push_back({std::to_string(k + 1), num(cal.leverage.g[k]), num(cal.leverage.se[k]),
                      num(amp * std::pow(cal.params.rho, static_cast<double>(k)))});
  }
  out.add_table(std::move(t));
  out.set_results({{"calibration", calibration_json(cal, dpy)},
                   {"normalisation", "GARCH-filtered sigma at the fitted parameters"}});
}

// ---- mc-verify ------------------------------------------------------------

std::vector<OptionSpec> mc_specs() {
  return concat(garch_specs(0.05),
                {{"maturities", OptionType::kIntList, "20,40,60", "maturities in days"},
                 {"moneyness", OptionType::kDoubleList, "-1,-0.5,0,0.5,1", "shifted moneyness grid"},
                 {"skew-grid", OptionType::kDoubleList, "-0.2..0.2:0.1", "moneyness points of the skew fit"},
                 {"paths", OptionType::kInt, 1000000, "number of paths"},
                 {"seed", OptionType::kInt, 42, "random seed"},
                 {"antithetic", OptionType::kBool, true, "antithetic pairs"},
                 {"shock", OptionType::kString, "garch", "garch or linear"},
                 {"target-se", OptionType::kDouble, 0.0, "ATM vol standard-error budget (annualized)"},
                 {"nested", OptionType::kBool, false, "also run nested repricing for gamma"},
                 {"nested-outer", OptionType::kInt, 1000, "outer paths of the nested run"},
                 {"nested-inner", OptionType::kInt, 10000, "inner paths of the nested run"}});
}

Json estimate_json(const McEstimate& e, double scale = 1.0) {
  return {{"mc", jnum(e.value * scale)}, {"se", jnum(e.se * scale)}, {"analytic", jnum(e.analytic * scale)},
          {"z", jnum(e.z)}};
}

void run_mc_verify(const RunConfig& c, Output& out) {
  McConfig mc;
  mc.params = garch_from(c);
  mc.maturities = c.get_int_list("maturities");
  mc.moneyness = c.get_double_list("moneyness");
  mc.skew_grid = c.get_double_list("skew-grid");
  mc.n_paths = c.get_int("paths");
  mc.seed = static_cast<std::uint64_t>(c.get_int("seed"));
  mc.antithetic = c.get_bool("antithetic");
  const double dpy = c.get_double("days-per-year");
  const double ann = std::sqrt(dpy);
  mc.target_se = c.get_double("target-se") / ann;
  const auto shock = c.get_string("shock");
  if (shock == "linear") {
    mc.shock = McShock::kLinear;
  } else if (shock != "garch") {
    fail(ErrorCode::kConfig, "shock must be garch or linear", shock);
  }
  mc.nested_leverage = c.get_bool("nested");
  mc.nested_outer = c.get_int("nested-outer");
  mc.nested_inner = c.get_int("nested-inner");
  out.set_seed(mc.seed);

  const auto res = run_mc(mc);
  Table smile{"mc_smile.csv",
              {"maturity_days", "moneyness", "strike", "price", "price_se", "implied_vol", "vol_se",
               "analytic_vol", "z", "excluded"},
              {}};
  Table summary{"mc_summary.csv", {"maturity_days", "quantity", "mc", "se", "analytic", "z"}, {}};
  Json mats = Json::array();
  for (const auto& m : res.maturities) {
    const auto T = std::to_string(m.maturity);
    for (const auto& pt : m.smile) {
      smile.rows.push_back({T, num(pt.moneyness), num(pt.strike), num(pt.price), num(pt.price_se),
                            num(pt.implied_vol * ann), num(pt.vol_se * ann), num(pt.analytic_vol * ann),
                            num(pt.z), pt.excluded ? "1" : "0"});
    }
    auto add = [&](const std::string& name, const McEstimate& e, double scale) {
      summary.rows.push_back({T, name, num(e.value * scale), num(e.se * scale), num(e.analytic * scale), num(e.z)});
    };
    add("atm_vol", m.atm_vol, ann);
    add("skew", m.skew, 1.0);
    add("implied_leverage", m.gamma, 1.0);
    add("implied_leverage_sqrt_update", m.gamma_sqrt, 1.0);
    if (m.gamma_nested) add("implied_leverage_nested", *m.gamma_nested, 1.0);
    if (m.ssr) add("ssr", *m.ssr, 1.0);
    Json row = {{"maturity_days", m.maturity},
                {"sqrt_vt_over_t", jnum(m.sqrt_vt_over_t * ann)},
                {"atm_vol", estimate_json(m.atm_vol, ann)},
                {"skew", estimate_json(m.skew)},
                {"implied_leverage", estimate_json(m.gamma)},
                {"implied_leverage_sqrt_update", estimate_json(m.gamma_sqrt)},
                {"ssr", m.ssr ? estimate_json(*m.ssr) : Json(nullptr)},
                {"excluded_strikes", m.excluded_strikes}};
    if (m.gamma_nested) row["implied_leverage_nested"] = estimate_json(*m.gamma_nested);
    if (!m.ssr_note.empty()) row["ssr_note"] = m.ssr_note;
    mats.push_back(row);
  }
  out.add_table(std::move(smile));
  out.add_table(std::move(summary));
  out.set_results({{"params", params_json(mc.params, dpy)},
                   {"n_paths", res.n_paths},
                   {"batches", res.batches},
                   {"floor_hits", res.floor_hits},
                   {"warnings", res.warnings},
                   {"maturities", mats}});
}

// ---- report ---------------------------------------------------------------

std::vector<OptionSpec> report_specs() {
  auto specs = estimator_specs();
  for (auto& s : specs) {
    if (s.name == "maturities") s.default_value = "5,10,20,40,60,90,120,180,250";
  }
  return concat(concat(specs, garch_specs(0.123)),
                {{"params", OptionType::kString, "calibrate", "calibrate or given (use --v0/--rho/--nu)"},
                 {"bootstrap", OptionType::kInt, 50, "bootstrap replicates when calibrating"},
                 {"seed", OptionType::kInt, 1, "bootstrap seed"}});
}

void run_report(const RunConfig& c, Output& out) {
  const auto a = analyze_inputs(c, out);
  const double dpy = c.get_double("days-per-year");
  const int window = c.get_int("ssr-window");
  out.set_seed(static_cast<std::uint64_t>(c.get_int("seed")));

  GarchParams p;
  Json params_doc;
  const auto source = c.get_string("params");
  if (source == "calibrate") {
    CalibrationOptions o;
    o.bootstrap_replicates = c.get_int("bootstrap");
    o.seed = static_cast<std::uint64_t>(c.get_int("seed"));
    const auto cal = calibrate_garch(a.series.returns, o);
    p = cal.params;
    params_doc = calibration_json(cal, dpy);
  } else if (source == "given") {
    p = garch_from(c);
    params_doc = params_json(p, dpy);
  } else {
    fail(ErrorCode::kConfig, "params must be calibrate or given", source);
  }
  int max_t = 2;
  for (const auto& m : a.maturities) max_t = std::max(max_t, m.maturity);
  const auto model = make_model(p, max_t + 1);

  Table fig1{"report_skew_leverage.csv",
             {"maturity_days", "option_skew", "beta", "beta_se", "garch_skew", "option_implied_leverage",
              "gamma_th", "garch_implied_leverage"},
             {}};
  Table fig2{"report_ssr.csv", {"maturity_days", "option_ssr", "ssr_th", "garch_ssr"}, {}};
  Table fig3{"report_correction.csv",
             {"maturity_days", "data_skewness_over_6", "data_skew", "data_ratio", "garch_ratio"},
             {}};
  Json rows = Json::array();
  for (const auto& m : a.maturities) {
    const int T = m.maturity;
    const double beta = m.beta ? m.beta->beta : kNaN;
    const double g_skew = T >= 2 ? skew(model, T) : kNaN;
    const double g_gamma = implied_leverage(model, T);
    const double g_ssr = T >= 2 ? ssr(model, T) : kNaN;
    const double opt_ssr = m.local ? local_ssr_to_ratio(m.local->mean, T, window) : kNaN;
    const double ssr_th = m.gamma_th * std::sqrt(static_cast<double>(T)) / beta;
    const double data_skew = std::isnan(m.option_skew) ? beta : m.option_skew;
    const double data_ratio = (m.skewness / 6.0) / data_skew;
    const double g_ratio = T >= 2 ? skewness_skew_ratio(p, T) : kNaN;
    fig1.rows.push_back({std::to_string(T), num(m.option_skew), num(beta), num(m.beta ? m.beta->se : kNaN),
                         num(g_skew), num(m.gamma ? m.gamma->slope : kNaN), num(m.gamma_th), num(g_gamma)});
    fig2.rows.push_back({std::to_string(T), num(opt_ssr), num(ssr_th), num(g_ssr)});
    fig3.rows.push_back({std::to_string(T), num(m.skewness / 6.0), num(data_skew), num(data_ratio), num(g_ratio)});
    rows.push_back({{"maturity_days", T},
                    {"option_skew", jnum(m.option_skew)},
                    {"beta", jnum(beta)},
                    {"garch_skew", jnum(g_skew)},
                    {"option_implied_leverage", m.gamma ? jnum(m.gamma->slope) : Json(nullptr)},
                    {"gamma_th", jnum(m.gamma_th)},
                    {"garch_implied_leverage", jnum(g_gamma)},
                    {"option_ssr", jnum(opt_ssr)},
                    {"ssr_th", jnum(ssr_th)},
                    {"garch_ssr", jnum(g_ssr)},
                    {"data_ratio", jnum(data_ratio)},
                    {"garch_ratio", jnum(g_ratio)}});
  }
  out.add_table(std::move(fig1));
  out.add_table(std::move(fig2));
  out.add_table(std::move(fig3));
  out.set_results({{"params_source", source},
                   {"params", params_doc},
                   {"data_skew_source", a.has_surface ? "option surface" : "beta_T (no surface given)"},
                   {"maturities", rows}});
}

// ---------------------------------------------------------------------------

struct Command {
  std::string name;
  std::string help;
  std::function<std::vector<OptionSpec>()> specs;
  std::function<void(const RunConfig&, Output&)> run;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> kCommands{
      {"smile", "order-1 GARCH smile surface and per-maturity report", smile_specs, run_smile},
      {"ssr", "SSR term structure (GARCH or flat exponential leverage)", ssr_specs, run_ssr},
      {"simulate", "simulate a GARCH return series", simulate_specs, run_simulate},
      {"analyze", "estimators on a return series and optional surface", estimator_specs, run_analyze},
      {"mc-verify", "Monte Carlo check of the analytic smile, leverage and SSR", mc_specs, run_mc_verify},
      {"calibrate", "fit GARCH parameters to a return series", calibrate_specs, run_calibrate},
      {"report", "figure-ready comparison tables", report_specs, run_report},
  };
  return kCommands;
}

void print_error(std::ostream& err, const std::string& code, const std::string& message,
                 const std::string& context) {
  err << Json{{"code", code}, {"message", message}, {"context", context}}.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"smile_lab: smile dynamics, skew, implied leverage and SSR"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  std::vector<std::unique_ptr<RunConfig>> configs;
  std::vector<CLI::App*> subs;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    configs.push_back(std::make_unique<RunConfig>(cmd.name, cmd.specs()));
    configs.back()->attach(*sub);
    subs.push_back(sub);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    print_error(err, std::string(to_string(ErrorCode::kConfig)), e.what(), "command line");
    return 2;
  }

  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    auto& config = *configs[k];
    try {
      config.resolve();
      Output output(config);
      commands()[k].run(config, output);
      const auto written = output.write();
      out << Json{{"command", config.command()}, {"outputs", written}}.dump() << "\n";
      return 0;
    } catch (const Error& e) {
      print_error(err, std::string(to_string(e.code())), e.what(), e.context());
      return 1;
    } catch (const std::exception& e) {
      print_error(err, "internal_error", e.what(), config.command());
      return 1;
    }
  }
  print_error(err, std::string(to_string(ErrorCode::kConfig)), "no subcommand given", "");
  return 2;
}

}  // namespace smilelab::cli
