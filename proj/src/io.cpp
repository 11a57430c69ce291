#include "scalemix/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace scalemix {

namespace {

double require_number(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ParseError("missing numeric field '" + key + "'");
  }
  return j[key].get<double>();
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

nlohmann::json mixture_to_json(const MixtureDensity& m) {
  nlohmann::json j;
  if (m.is_degenerate()) {
    j["type"] = "degenerate";
    j["sigma0"] = m.sigma0();
  } else {
    const PowerLawParams& p = m.power_law_params();
    j["type"] = "powerlaw";
    j["gamma"] = p.gamma;
    j["delta"] = p.delta;
    j["d"] = p.d;
    j["sigma_min"] = p.sigma_min;
  }
  return j;
}

MixtureDensity mixture_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ParseError("mixture: expected an object with a 'type' field");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "degenerate") {
    return MixtureDensity::degenerate(require_number(j, "sigma0"));
  }
  if (type == "powerlaw") {
    const double sigma_min =
        j.contains("sigma_min") ? require_number(j, "sigma_min") : 0.0;
    return MixtureDensity::power_law(require_number(j, "gamma"),
                                     require_number(j, "delta"),
                                     require_number(j, "d"), sigma_min);
  }
  throw ParseError("mixture: unknown type '" + type + "'");
}

nlohmann::json model_to_json(const ProcessModel& model) {
  nlohmann::json j;
  j["D"] = model.scaling_exponent();
  j["horizon"] = model.horizon();
  j["mixture"] = mixture_to_json(model.mixture());
  return j;
}

ProcessModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("mixture")) {
    throw ParseError("model: expected an object with D, horizon, mixture");
  }
  const double d = require_number(j, "D");
  if (!j.contains("horizon") || !j["horizon"].is_number_integer()) {
    throw ParseError("model: missing integer field 'horizon'");
  }
  return ProcessModel(d, mixture_from_json(j["mixture"]),
                      j["horizon"].get<int>());
}

void write_ensemble_csv(const std::string& path, const Ensemble& e) {
  std::string out;
  out.reserve(static_cast<std::size_t>(e.histories()) * e.horizon() * 22 + 64);
  out += "history";
  for (int t = 1; t <= e.horizon(); ++t) {
    out += ",r" + std::to_string(t);
  }
  out += '\n';
  for (int l = 0; l < e.histories(); ++l) {
    out += std::to_string(l + 1);
    for (int t = 1; t <= e.horizon(); ++t) {
      out += ',';
      out += format_double(e.ret(l, t));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

Ensemble read_ensemble_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty ensemble file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int n = 0;
  {
    std::stringstream header(line);
    std::string col;
    bool first = true;
    while (std::getline(header, col, ',')) {
      if (first) {
        if (col != "history") throw ParseError("expected 'history' column", 1);
        first = false;
      } else {
        ++n;
      }
    }
  }
  if (n < 1) throw ParseError("ensemble header has no return columns", 1);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        first = false;
        continue;  // history index column
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ParseError("bad number '" + cell + "'", line_no);
      row.push_back(v);
    }
    if (static_cast<int>(row.size()) != n) {
      throw ParseError("expected " + std::to_string(n) + " returns", line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("ensemble file has no data rows");

  Ensemble e(static_cast<int>(rows.size()), n);
  for (int l = 0; l < e.histories(); ++l) {
    for (int t = 1; t <= n; ++t) e.ret(l, t) = rows[l][t - 1];
  }
  return e;
}

nlohmann::json ensemble_meta_json(const Ensemble& e) {
  nlohmann::json j;
  j["histories"] = e.histories();
  j["horizon"] = e.horizon();
  j["detrended"] = e.detrended();
  j["source"] = e.meta.source;
  if (e.meta.seed) j["seed"] = *e.meta.seed;
  if (!e.meta.detail.empty()) j["detail"] = e.meta.detail;
  return j;
}

void apply_ensemble_meta(Ensemble& e, const nlohmann::json& j) {
  if (j.contains("detrended") && j["detrended"].is_boolean()) {
    e.set_detrended(j["detrended"].get<bool>());
  }
  if (j.contains("source") && j["source"].is_string()) {
    e.meta.source = j["source"].get<std::string>();
  }
  if (j.contains("seed") && j["seed"].is_number_unsigned()) {
    e.meta.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("detail") && j["detail"].is_string()) {
    e.meta.detail = j["detail"].get<std::string>();
  }
}

nlohmann::json summary_to_json(const EnsembleSummary& s) {
  nlohmann::json j;
  j["histories"] = s.histories;
  j["horizon"] = s.horizon;
  j["detrended"] = s.detrended;
  j["source"] = s.source;
  if (s.seed) j["seed"] = *s.seed;
  if (!s.detail.empty()) j["detail"] = s.detail;
  j["column_mean"] = s.column_mean;
  j["column_variance"] = s.column_variance;
  return j;
}

void append_curve_csv(std::string& out, const CorrelatorCurve& curve,
                      bool header) {
  const bool has_ab =
      curve.kind == CurveKind::kappa || curve.kind == CurveKind::K;
  const bool has_t2 = curve.kind == CurveKind::K;
  const bool has_err = !curve.errors.empty();
  if (header) {
    if (has_ab) out += "alpha,beta,";
    out += has_t2 ? "t1,t2,value" : "n,value";
    if (has_err) out += ",err";
    out += '\n';
  }
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const CurvePoint& p = curve.points[i];
    if (has_ab) {
      out += format_double(curve.alpha);
      out += ',';
      out += format_double(curve.beta);
      out += ',';
    }
    out += std::to_string(p.idx1);
    if (has_t2) {
      out += ',';
      out += std::to_string(p.idx2);
    }
    out += ',';
    out += format_double(p.value);
    if (has_err) {
      out += ',';
      out += format_double(curve.errors[i]);
    }
    out += '\n';
  }
}

void write_curve_csv(const std::string& path, const CorrelatorCurve& curve) {
  std::string out;
  append_curve_csv(out, curve, true);
  write_text_file(path, out);
}

nlohmann::json curve_to_json(const CorrelatorCurve& curve) {
  nlohmann::json j;
  j["kind"] = curve_kind_name(curve.kind);
  if (curve.kind == CurveKind::kappa || curve.kind == CurveKind::K) {
    j["alpha"] = curve.alpha;
    j["beta"] = curve.beta;
  }
  j["source"] = curve.source;
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    nlohmann::json p;
    if (curve.kind == CurveKind::K) {
      p["t1"] = curve.points[i].idx1;
      p["t2"] = curve.points[i].idx2;
    } else {
      p["n"] = curve.points[i].idx1;
    }
    p["value"] = curve.points[i].value;
    if (!curve.errors.empty()) p["err"] = curve.errors[i];
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  return j;
}

void write_collapse_csv(const std::string& path, const CollapsePlotData& data) {
  std::string out = "t,T,bin_center,density\n";
  for (const auto& entry : data.entries) {
    for (std::size_t b = 0; b < entry.bin_centers.size(); ++b) {
      out += std::to_string(entry.t);
      out += ',';
      out += std::to_string(entry.T);
      out += ',';
      out += format_double(entry.bin_centers[b]);
      out += ',';
      out += format_double(entry.density[b]);
      out += '\n';
    }
  }
  write_text_file(path, out);
}

nlohmann::json collapse_to_json(const CollapsePlotData& data) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& entry : data.entries) {
    nlohmann::json e;
    e["t"] = entry.t;
    e["T"] = entry.T;
    e["bin_centers"] = entry.bin_centers;
    e["density"] = entry.density;
    entries.push_back(std::move(e));
  }
  nlohmann::json j;
  j["entries"] = std::move(entries);
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace scalemix
