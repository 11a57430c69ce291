#pragma once

#include <string>

#include <json.hpp>

#include "scalemix/ensemble.hpp"
#include "scalemix/estimators.hpp"
#include "scalemix/ingest.hpp"
#include "scalemix/mixture.hpp"
#include "scalemix/process.hpp"

namespace scalemix {

// Shortest text that round-trips the double exactly.
std::string format_double(double x);

// Mixture JSON: {"type":"powerlaw","gamma":..,"delta":..,"d":..,"sigma_min":..}
// or {"type":"degenerate","sigma0":..}. The normalization constant is never
// serialized and always recomputed on load.
nlohmann::json mixture_to_json(const MixtureDensity& m);
MixtureDensity mixture_from_json(const nlohmann::json& j);

// Model JSON: {"D":.., "horizon":.., "mixture":{..}}.
nlohmann::json model_to_json(const ProcessModel& model);
ProcessModel model_from_json(const nlohmann::json& j);

// Ensemble CSV: header "history,r1,...,rn", one row per history.
void write_ensemble_csv(const std::string& path, const Ensemble& e);
Ensemble read_ensemble_csv(const std::string& path);

// Sidecar with provenance; read back alongside the CSV when present.
nlohmann::json ensemble_meta_json(const Ensemble& e);
void apply_ensemble_meta(Ensemble& e, const nlohmann::json& j);

nlohmann::json summary_to_json(const EnsembleSummary& s);

// Correlator curve CSV. Columns depend on the kind:
//   kappa:        alpha,beta,n,value[,err]
//   vol_autocorr: n,value[,err]
//   linear:       n,value[,err]
//   K:            alpha,beta,t1,t2,value[,err]
void write_curve_csv(const std::string& path, const CorrelatorCurve& curve);
void append_curve_csv(std::string& out, const CorrelatorCurve& curve,
                      bool header);
nlohmann::json curve_to_json(const CorrelatorCurve& curve);

// Collapse CSV: t,T,bin_center,density.
void write_collapse_csv(const std::string& path, const CollapsePlotData& data);
nlohmann::json collapse_to_json(const CollapsePlotData& data);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace scalemix
