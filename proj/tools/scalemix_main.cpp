// Command-line front end: simulate, ingest, analyze, compare, calibrate.
// Every command writes plot-ready CSV/JSON into --out and is a pure function
// of its config, inputs, and seed. Exit codes: 0 success, 1 runtime failure,
// 2 usage or config error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scalemix/estimators.hpp"
#include "scalemix/ingest.hpp"
#include "scalemix/io.hpp"
#include "scalemix/scalefn.hpp"
#include "scalemix/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scalemix;

namespace {

// Maps to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool quiet = false;
};

json load_config(const CliOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  if (!fs::exists(opt.config_path)) {
    throw ConfigError("config file not found: " + opt.config_path);
  }
  try {
    return json::parse(read_text_file(opt.config_path));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::string out_path(const CliOptions& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / name).string();
}

void note(const CliOptions& opt, const std::string& msg) {
  if (!opt.quiet) std::cout << msg << '\n';
}

json load_json_field(const json& cfg, const std::string& key) {
  // The field holds either an inline object or a path to a JSON file.
  if (!cfg.contains(key)) throw ConfigError("config field '" + key + "' is required");
  const json& v = cfg[key];
  if (v.is_object()) return v;
  if (v.is_string()) {
    const std::string path = v.get<std::string>();
    if (!fs::exists(path)) throw ConfigError(key + " file not found: " + path);
    try {
      return json::parse(read_text_file(path));
    } catch (const std::exception& e) {
      throw ConfigError(key + " file is not valid JSON: " + std::string(e.what()));
    }
  }
  throw ConfigError("config field '" + key + "' must be an object or a path");
}

ProcessModel model_from_config(const json& cfg) {
  try {
    return model_from_json(load_json_field(cfg, "model"));
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad model: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("bad model: ") + e.what());
  } catch (const NonIntegrable& e) {
    throw ConfigError(std::string("bad model: ") + e.what());
  }
}

std::uint64_t required_seed(const json& cfg, const CliOptions& opt) {
  if (opt.seed) return *opt.seed;
  if (cfg.contains("seed") && cfg["seed"].is_number_unsigned()) {
    return cfg["seed"].get<std::uint64_t>();
  }
  throw ConfigError("a seed is required (--seed or config field 'seed')");
}

std::string resolve_input(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_string()) {
    throw ConfigError("config field '" + key + "' (path) is required");
  }
  const std::string path = cfg[key].get<std::string>();
  if (!fs::exists(path)) throw ConfigError(key + " not found: " + path);
  return path;
}

Ensemble load_ensemble(const json& cfg) {
  const std::string path = resolve_input(cfg, "ensemble");
  Ensemble e = read_ensemble_csv(path);
  std::string meta_path;
  if (cfg.contains("ensemble_meta") && cfg["ensemble_meta"].is_string()) {
    meta_path = cfg["ensemble_meta"].get<std::string>();
  } else {
    fs::path p(path);
    p.replace_filename(p.stem().string() + "_meta.json");
    if (fs::exists(p)) meta_path = p.string();
  }
  if (!meta_path.empty() && fs::exists(meta_path)) {
    apply_ensemble_meta(e, json::parse(read_text_file(meta_path)));
  }
  return e;
}

std::vector<double> alphas_from_config(const json& cfg) {
  std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0};
  if (cfg.contains("alphas")) {
    alphas = cfg["alphas"].get<std::vector<double>>();
  }
  if (alphas.empty()) throw ConfigError("the alpha grid must not be empty");
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("alpha grid entries must be positive");
  }
  return alphas;
}

std::vector<std::pair<double, double>> pairs_from_config(
    const json& cfg, const std::string& key, const std::vector<double>& alphas) {
  std::vector<std::pair<double, double>> pairs;
  if (cfg.contains(key)) {
    for (const auto& p : cfg[key]) {
      if (!p.is_array() || p.size() != 2) {
        throw ConfigError(key + " entries must be [alpha, beta] pairs");
      }
      pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  } else {
    for (double a : alphas)
      for (double b : alphas) pairs.emplace_back(a, b);
  }
  if (pairs.empty()) throw ConfigError(key + " must not be empty");
  return pairs;
}

std::vector<int> default_time_grid(int horizon) {
  std::vector<int> ts = {1, std::max(2, static_cast<int>(horizon * 0.3)),
                         std::max(3, static_cast<int>(horizon * 0.6)), horizon};
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  ts.erase(std::remove_if(ts.begin(), ts.end(),
                          [&](int t) { return t < 1 || t > horizon; }),
           ts.end());
  return ts;
}

std::vector<std::pair<int, int>> k_points_from_config(const json& cfg,
                                                      int horizon) {
  std::vector<std::pair<int, int>> pts;
  if (cfg.contains("K_points")) {
    for (const auto& p : cfg["K_points"]) {
      if (!p.is_array() || p.size() != 2) {
        throw ConfigError("K_points entries must be [t1, t2] pairs");
      }
      pts.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  } else {
    const std::vector<int> ts = default_time_grid(horizon);
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i; j < ts.size(); ++j) pts.emplace_back(ts[i], ts[j]);
  }
  for (auto [t1, t2] : pts) {
    if (t1 < 1 || t2 < t1 || t2 > horizon) {
      throw ConfigError("K_points entry out of range");
    }
  }
  return pts;
}

std::vector<std::pair<int, int>> collapse_spec_from_config(const json& cfg,
                                                           int horizon) {
  std::vector<std::pair<int, int>> spec;
  if (cfg.contains("collapse") && cfg["collapse"].contains("spec")) {
    for (const auto& p : cfg["collapse"]["spec"]) {
      spec.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  } else {
    for (int t : default_time_grid(horizon)) spec.emplace_back(t, t);
    for (int t : default_time_grid(horizon)) {
      if (t > 1) spec.emplace_back(t, 1);
    }
  }
  for (auto [t, T] : spec) {
    if (T < 1 || t < T || t > horizon) throw ConfigError("collapse spec entry out of range");
  }
  return spec;
}

SessionSpec session_from_config(const json& cfg) {
  SessionSpec spec;
  if (!cfg.contains("session")) return spec;
  const json& s = cfg["session"];
  if (s.contains("start")) {
    const std::string start = s["start"].get<std::string>();
    int h = 0, m = 0;
    if (std::sscanf(start.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 23 ||
        m < 0 || m > 59) {
      throw ConfigError("session.start must be HH:MM");
    }
    spec.start_hour = h;
    spec.start_minute = m;
  }
  if (s.contains("zone")) spec.zone = s["zone"].get<std::string>();
  if (s.contains("bar_minutes")) spec.bar_minutes = s["bar_minutes"].get<int>();
  if (s.contains("bar_count")) spec.bar_count = s["bar_count"].get<int>();
  if (s.contains("min_coverage")) spec.min_coverage = s["min_coverage"].get<double>();
  if (s.contains("detrend")) spec.detrend = s["detrend"].get<bool>();
  if (s.contains("timestamp_format")) {
    spec.timestamp_format = s["timestamp_format"].get<std::string>();
  }
  if (spec.bar_minutes < 1 || spec.bar_count < 1) {
    throw ConfigError("session.bar_minutes and session.bar_count must be >= 1");
  }
  return spec;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const ProcessModel model = model_from_config(cfg);
  if (!cfg.contains("M") || !cfg["M"].is_number_integer()) {
    throw ConfigError("config field 'M' (histories) is required");
  }
  const int m = cfg["M"].get<int>();
  if (m < 1) throw ConfigError("M must be >= 1");
  const std::uint64_t seed = required_seed(cfg, opt);

  Ensemble e = simulate_ensemble(model, m, seed, opt.threads);
  write_ensemble_csv(out_path(opt, "ensemble.csv"), e);
  json meta = ensemble_meta_json(e);
  meta["model"] = model_to_json(model);
  write_text_file(out_path(opt, "ensemble_meta.json"), meta.dump(2) + "\n");
  note(opt, "wrote " + std::to_string(m) + "x" + std::to_string(model.horizon()) +
                " ensemble to " + opt.out_dir);
  return 0;
}

int cmd_calibrate(const CliOptions& opt) {
  const json cfg = load_config(opt);
  if (!cfg.contains("variance_target")) {
    throw ConfigError("config field 'variance_target' is required");
  }
  theory::CalibrationTargets targets{};
  targets.variance = cfg["variance_target"].get<double>();
  if (cfg.contains("degenerate") && cfg["degenerate"].get<bool>()) {
    targets.tail_index = std::numeric_limits<double>::infinity();
  } else if (cfg.contains("tail_index")) {
    targets.tail_index = cfg["tail_index"].get<double>();
  } else {
    throw ConfigError("config needs 'tail_index' or 'degenerate': true");
  }
  theory::PowerLawInit init;
  if (cfg.contains("gamma")) init.gamma = cfg["gamma"].get<double>();
  if (cfg.contains("sigma_min")) init.sigma_min = cfg["sigma_min"].get<double>();

  const MixtureDensity mixture = theory::calibrate(targets, init);
  write_text_file(out_path(opt, "mixture.json"),
                  mixture_to_json(mixture).dump(2) + "\n");

  json report;
  report["mixture"] = mixture_to_json(mixture);
  report["achieved_variance"] = mixture.moment(2.0);
  report["variance_target"] = targets.variance;
  if (!mixture.is_degenerate()) {
    report["norm_constant"] = mixture.norm_constant();
    report["max_finite_moment"] = mixture.max_moment_order();
  }
  if (cfg.contains("g_probe")) {
    json table = json::array();
    for (const auto& xv : cfg["g_probe"]) {
      const double x = xv.get<double>();
      table.push_back({x, g_density(mixture, x)});
    }
    report["g_probe"] = std::move(table);
  }

  // Plot-ready tabulations of the scaling function and, with a full model,
  // the return densities.
  int tab_points = 201;
  double tab_span = 5.0;
  if (cfg.contains("tabulate")) {
    const json& t = cfg["tabulate"];
    if (t.contains("points")) tab_points = t["points"].get<int>();
    if (t.contains("span")) tab_span = t["span"].get<double>();
    if (tab_points < 2 || !(tab_span > 0.0)) {
      throw ConfigError("tabulate.points must be >= 2 and tabulate.span > 0");
    }
  }
  const double sd = std::sqrt(mixture.moment(2.0));
  {
    std::string csv = "x,density\n";
    for (int i = 0; i < tab_points; ++i) {
      const double x = sd * tab_span * (2.0 * i / (tab_points - 1) - 1.0);
      csv += format_double(x) + "," + format_double(g_density(mixture, x)) + "\n";
    }
    write_text_file(out_path(opt, "g_density.csv"), csv);
  }

  if (cfg.contains("D") && cfg.contains("horizon")) {
    const ProcessModel model(cfg["D"].get<double>(), mixture,
                             cfg["horizon"].get<int>());
    write_text_file(out_path(opt, "model.json"),
                    model_to_json(model).dump(2) + "\n");

    std::vector<std::pair<int, int>> queries;
    if (cfg.contains("pdf_queries")) {
      for (const auto& q : cfg["pdf_queries"]) {
        queries.emplace_back(q[0].get<int>(), q[1].get<int>());
      }
    } else {
      queries = collapse_spec_from_config(json::object(), model.horizon());
    }
    std::string csv = "t,T,x,density\n";
    for (const auto& [t, T] : queries) {
      if (T < 1 || t < T || t > model.horizon()) {
        throw ConfigError("pdf_queries entry out of range");
      }
      const double scale =
          sd * return_scale(model.scaling_exponent(), t, T);
      for (int i = 0; i < tab_points; ++i) {
        const double x = scale * tab_span * (2.0 * i / (tab_points - 1) - 1.0);
        csv += std::to_string(t) + "," + std::to_string(T) + "," +
               format_double(x) + "," +
               format_double(return_pdf(model, {t, T, x})) + "\n";
      }
    }
    write_text_file(out_path(opt, "return_pdf.csv"), csv);
  }
  write_text_file(out_path(opt, "calibration_report.json"), report.dump(2) + "\n");
  note(opt, "calibrated mixture written to " + opt.out_dir);
  return 0;
}

int cmd_ingest(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const std::string input = resolve_input(cfg, "input");
  const SessionSpec spec = session_from_config(cfg);

  std::vector<std::string> warnings;
  const std::vector<PriceRecord> records = load_prices(input, spec, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  IngestReport report;
  Ensemble e = build_ensemble(records, spec, &report);
  write_ensemble_csv(out_path(opt, "ensemble.csv"), e);
  write_text_file(out_path(opt, "ensemble_meta.json"),
                  ensemble_meta_json(e).dump(2) + "\n");

  json rj;
  rj["days_seen"] = report.days_seen;
  rj["sessions_built"] = report.sessions_built;
  rj["days_dropped"] = report.days_dropped;
  rj["first_day"] = report.first_day;
  rj["last_day"] = report.last_day;
  rj["warnings"] = warnings;
  rj["summary"] = summary_to_json(ensemble_report(e));
  write_text_file(out_path(opt, "ingest_report.json"), rj.dump(2) + "\n");
  note(opt, "ingested " + std::to_string(report.sessions_built) + " sessions (" +
                std::to_string(report.days_dropped) + " dropped)");
  return 0;
}

// Runs fn and reports the statistic's name on failure.
template <typename Fn>
auto computing(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(name + ": " + e.what());
  }
}

int cmd_analyze(const CliOptions& opt) {
  const json cfg = load_config(opt);
  Ensemble e = load_ensemble(cfg);
  const bool do_detrend = !cfg.contains("detrend") || cfg["detrend"].get<bool>();
  if (do_detrend) e = detrend(e);
  const int horizon = e.horizon();
  const std::vector<double> alphas = alphas_from_config(cfg);
  const auto kappa_pairs = pairs_from_config(cfg, "kappa_pairs", alphas);
  const auto k_points = k_points_from_config(cfg, horizon);

  // Second moment of the elementary returns.
  {
    const std::vector<double> m2 = emp_increment_second_moment(e);
    std::string out = "t,value\n";
    for (int t = 1; t <= horizon; ++t) {
      out += std::to_string(t) + "," + format_double(m2[t - 1]) + "\n";
    }
    write_text_file(out_path(opt, "m2_increments.csv"), out);
  }

  // Nonlinear moments of the total return.
  {
    std::string out = "alpha,t,value\n";
    for (double a : alphas) {
      for (int t = 1; t <= horizon; ++t) {
        const double m = computing("moment", [&] { return emp_moment(e, t, a); });
        out += format_double(a) + "," + std::to_string(t) + "," +
               format_double(m) + "\n";
      }
    }
    write_text_file(out_path(opt, "moments.csv"), out);
  }

  // Scaling-exponent regression.
  const DEstimate dest =
      computing("D_estimate", [&] { return estimate_D(e, alphas); });
  {
    std::string out = "alpha,slope_over_alpha\n";
    for (const auto& [a, d] : dest.per_alpha) {
      out += format_double(a) + "," + format_double(d) + "\n";
    }
    write_text_file(out_path(opt, "d_estimate.csv"), out);
    json j;
    j["D"] = dest.D;
    j["std_error"] = dest.std_error;
    json per = json::array();
    for (const auto& [a, d] : dest.per_alpha) per.push_back({a, d});
    j["per_alpha"] = std::move(per);
    write_text_file(out_path(opt, "d_estimate.json"), j.dump(2) + "\n");
  }

  json curves_json = json::array();

  // Linear correlation of non-overlapping returns.
  if (horizon >= 2) {
    CorrelatorCurve curve;
    curve.kind = CurveKind::linear;
    curve.source = "empirical";
    for (int n = 2; n <= horizon; ++n) {
      curve.points.push_back(
          {n, 0, computing("linear_corr", [&] { return emp_linear_corr(e, n); })});
    }
    write_curve_csv(out_path(opt, "linear_corr.csv"), curve);
    curves_json.push_back(curve_to_json(curve));
  }

  // Absolute-moment cross correlators, with the constancy-based error bar.
  {
    std::string out;
    bool first = true;
    for (const auto& pair : kappa_pairs) {
      const double a = pair.first, b = pair.second;
      CorrelatorCurve curve;
      curve.kind = CurveKind::kappa;
      curve.alpha = a;
      curve.beta = b;
      curve.source = "empirical";
      for (int n = 2; n <= horizon; ++n) {
        curve.points.push_back(
            {n, 0, computing("kappa", [&] { return emp_kappa(e, a, b, n); })});
      }
      computing("kappa_error_bars", [&] { return kappa_error_bars(curve); });
      append_curve_csv(out, curve, first);
      curves_json.push_back(curve_to_json(curve));
      first = false;
    }
    write_text_file(out_path(opt, "kappa.csv"), out);
  }

  // Volatility autocorrelation.
  if (horizon >= 2) {
    CorrelatorCurve curve;
    curve.kind = CurveKind::vol_autocorr;
    curve.source = "empirical";
    for (int n = 2; n <= horizon; ++n) {
      curve.points.push_back({n, 0, computing("vol_autocorr", [&] {
                                return emp_vol_autocorr(e, n);
                              })});
    }
    write_curve_csv(out_path(opt, "vol_autocorr.csv"), curve);
    curves_json.push_back(curve_to_json(curve));
  }

  // Aggregated-return correlators.
  {
    std::string out;
    bool first = true;
    for (const auto& pair : kappa_pairs) {
      const double a = pair.first, b = pair.second;
      CorrelatorCurve curve;
      curve.kind = CurveKind::K;
      curve.alpha = a;
      curve.beta = b;
      curve.source = "empirical";
      for (const auto& pt : k_points) {
        const int t1 = pt.first, t2 = pt.second;
        curve.points.push_back(
            {t1, t2, computing("K", [&] { return emp_K(e, a, b, t1, t2); })});
      }
      append_curve_csv(out, curve, first);
      curves_json.push_back(curve_to_json(curve));
      first = false;
    }
    write_text_file(out_path(opt, "K.csv"), out);
  }
  write_text_file(out_path(opt, "curves.json"), curves_json.dump(2) + "\n");

  // Data collapse.
  {
    double d_value = dest.D;
    int bins = 41;
    if (cfg.contains("collapse")) {
      const json& c = cfg["collapse"];
      if (c.contains("D") && c["D"].is_number()) d_value = c["D"].get<double>();
      if (c.contains("bins")) bins = c["bins"].get<int>();
    }
    const auto spec = collapse_spec_from_config(cfg, horizon);
    const CollapsePlotData data =
        computing("collapse", [&] { return collapse(e, d_value, spec, bins); });
    write_collapse_csv(out_path(opt, "collapse.csv"), data);
    write_text_file(out_path(opt, "collapse.json"),
                    collapse_to_json(data).dump(2) + "\n");
  }

  note(opt, "analysis written to " + opt.out_dir + "  (D = " +
                format_double(dest.D) + " +- " + format_double(dest.std_error) +
                ")");
  return 0;
}

int cmd_compare(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const ProcessModel model = model_from_config(cfg);
  Ensemble e = load_ensemble(cfg);
  const bool do_detrend = !cfg.contains("detrend") || cfg["detrend"].get<bool>();
  if (do_detrend) e = detrend(e);
  if (e.horizon() != model.horizon()) {
    throw ConfigError("ensemble horizon does not match the model horizon");
  }
  const int horizon = e.horizon();
  const std::vector<double> alphas = alphas_from_config(cfg);
  const auto kappa_pairs = pairs_from_config(cfg, "kappa_pairs", alphas);
  const auto k_points = k_points_from_config(cfg, horizon);
  const int reps = cfg.contains("bootstrap_reps")
                       ? cfg["bootstrap_reps"].get<int>()
                       : 100;
  if (reps < 2) throw ConfigError("bootstrap_reps must be >= 2");
  const std::uint64_t seed = required_seed(cfg, opt);
  const double moment_bound = model.mixture().max_moment_order();

  std::string csv = "statistic,alpha,beta,idx1,idx2,empirical,err,theory,z\n";
  json skipped = json::array();
  int n_points = 0, n_exceed = 0;

  std::vector<std::pair<int, int>> lag_points;
  for (int n = 2; n <= horizon; ++n) lag_points.emplace_back(n, 0);

  std::vector<StatisticSpec> specs;
  std::vector<std::vector<double>> theory_values;

  for (const auto& [a, b] : kappa_pairs) {
    if (a + b >= moment_bound) {
      skipped.push_back({{"statistic", "kappa"}, {"alpha", a}, {"beta", b},
                         {"reason", "theory moment diverges"}});
      continue;
    }
    specs.push_back({CurveKind::kappa, a, b, lag_points});
    const double k = theory::kappa(model.mixture(), a, b);
    theory_values.emplace_back(lag_points.size(), k);
  }

  if (2.0 < moment_bound) {
    specs.push_back({CurveKind::vol_autocorr, 1.0, 1.0, lag_points});
    std::vector<double> vals;
    for (const auto& [n, unused] : lag_points) {
      (void)unused;
      vals.push_back(theory::vol_autocorr(model, n));
    }
    theory_values.push_back(std::move(vals));
  } else {
    skipped.push_back({{"statistic", "vol_autocorr"},
                       {"reason", "theory moment diverges"}});
  }

  specs.push_back({CurveKind::linear, 1.0, 1.0, lag_points});
  theory_values.emplace_back(lag_points.size(), 0.0);

  for (const auto& [a, b] : kappa_pairs) {
    if (a + b >= moment_bound) {
      skipped.push_back({{"statistic", "K"}, {"alpha", a}, {"beta", b},
                         {"reason", "theory moment diverges"}});
      continue;
    }
    specs.push_back({CurveKind::K, a, b, k_points});
    std::vector<double> vals;
    for (const auto& [t1, t2] : k_points) {
      vals.push_back(theory::K(model, a, b, t1, t2));
    }
    theory_values.push_back(std::move(vals));
  }

  // Theory curves in the same schema as the empirical ones.
  {
    std::string kappa_csv, k_csv, vol_csv;
    nlohmann::json curves = nlohmann::json::array();
    bool kappa_first = true, k_first = true;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      CorrelatorCurve curve;
      curve.kind = specs[s].kind;
      curve.alpha = specs[s].alpha;
      curve.beta = specs[s].beta;
      curve.source = "theory";
      for (std::size_t i = 0; i < specs[s].points.size(); ++i) {
        curve.points.push_back({specs[s].points[i].first,
                                specs[s].points[i].second, theory_values[s][i]});
      }
      curves.push_back(curve_to_json(curve));
      switch (curve.kind) {
        case CurveKind::kappa:
          append_curve_csv(kappa_csv, curve, kappa_first);
          kappa_first = false;
          break;
        case CurveKind::K:
          append_curve_csv(k_csv, curve, k_first);
          k_first = false;
          break;
        case CurveKind::vol_autocorr:
          append_curve_csv(vol_csv, curve, true);
          break;
        case CurveKind::linear:
          break;  // identically zero; reported only in the comparison table
      }
    }
    if (!kappa_csv.empty()) write_text_file(out_path(opt, "theory_kappa.csv"), kappa_csv);
    if (!k_csv.empty()) write_text_file(out_path(opt, "theory_K.csv"), k_csv);
    if (!vol_csv.empty()) {
      write_text_file(out_path(opt, "theory_vol_autocorr.csv"), vol_csv);
    }
    write_text_file(out_path(opt, "theory_curves.json"), curves.dump(2) + "\n");
  }

  // One shared replicate pass provides the error bars for every statistic.
  const std::vector<std::vector<double>> all_errs = bootstrap_error_bars_multi(
      model, e.histories(), reps, specs, seed, opt.threads);

  for (std::size_t s = 0; s < specs.size(); ++s) {
    const StatisticSpec& spec = specs[s];
    const std::vector<double> emp = evaluate_statistic(e, spec);
    const std::vector<double>& errs = all_errs[s];
    const std::vector<double>& th = theory_values[s];
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
      const double z = errs[i] > 0.0
                           ? (emp[i] - th[i]) / errs[i]
                           : (emp[i] == th[i] ? 0.0
                                              : std::numeric_limits<double>::infinity());
      ++n_points;
      if (std::abs(z) > 3.0) ++n_exceed;
      csv += curve_kind_name(spec.kind) + "," + format_double(spec.alpha) + "," +
             format_double(spec.beta) + "," + std::to_string(spec.points[i].first) +
             "," + std::to_string(spec.points[i].second) + "," +
             format_double(emp[i]) + "," + format_double(errs[i]) + "," +
             format_double(th[i]) + "," + format_double(z) + "\n";
    }
  }

  write_text_file(out_path(opt, "comparison.csv"), csv);
  json summary;
  summary["points"] = n_points;
  summary["exceedances"] = n_exceed;
  summary["fraction_over_3z"] =
      n_points > 0 ? static_cast<double>(n_exceed) / n_points : 0.0;
  summary["bootstrap_reps"] = reps;
  summary["seed"] = seed;
  summary["skipped"] = std::move(skipped);
  write_text_file(out_path(opt, "comparison.json"), summary.dump(2) + "\n");
  note(opt, "compared " + std::to_string(n_points) + " points, " +
                std::to_string(n_exceed) + " with |z| > 3");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble simulator, calibrator and statistical-verification "
               "toolkit for a self-similar volatility-mixture return process"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON config file");
  app.add_option("--out", opt.out_dir, "output directory (default .)");
  app.add_option("--seed", opt.seed, "seed for simulation commands");
  app.add_option("--threads", opt.threads, "worker threads (default 1)");
  app.add_flag("--quiet", opt.quiet, "suppress progress output");

  app.add_subcommand("simulate",
                     "simulate an ensemble: config {model, M, seed}");
  app.add_subcommand("ingest",
                     "build an ensemble from a price CSV: config {input, session}");
  app.add_subcommand("analyze",
                     "compute ensemble statistics: config {ensemble, alphas, ...}");
  app.add_subcommand("compare",
                     "model vs. ensemble report: config {model, ensemble, ...}");
  app.add_subcommand("calibrate",
                     "fit the mixture scale: config {variance_target, tail_index}");

  app.footer(
      "Output CSV columns:\n"
      "  ensemble.csv        history,r1,...,rn\n"
      "  m2_increments.csv   t,value\n"
      "  moments.csv         alpha,t,value\n"
      "  d_estimate.csv      alpha,slope_over_alpha\n"
      "  linear_corr.csv     n,value\n"
      "  kappa.csv           alpha,beta,n,value,err\n"
      "  vol_autocorr.csv    n,value\n"
      "  K.csv               alpha,beta,t1,t2,value\n"
      "  collapse.csv        t,T,bin_center,density\n"
      "  g_density.csv       x,density\n"
      "  return_pdf.csv      t,T,x,density\n"
      "  comparison.csv      statistic,alpha,beta,idx1,idx2,empirical,err,theory,z\n"
      "Exit codes: 0 success, 1 runtime failure, 2 usage/config error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(opt);
    if (app.got_subcommand("ingest")) return cmd_ingest(opt);
    if (app.got_subcommand("analyze")) return cmd_analyze(opt);
    if (app.got_subcommand("compare")) return cmd_compare(opt);
    if (app.got_subcommand("calibrate")) return cmd_calibrate(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
