#include <unistd.h>

#include <filesystem>
#include <string>

#include <doctest.h>

#include "scalemix/io.hpp"
#include "scalemix/theory.hpp"

using namespace scalemix;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& tag) {
  static int counter = 0;
  return (fs::temp_directory_path() /
          ("scalemix_io_" + std::to_string(::getpid()) + "_" + tag + "_" +
           std::to_string(counter++)))
      .string();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("mixture json round trip") {
  const auto m = MixtureDensity::power_law(1.25, 6.5, 0.37, 0.01);
  const auto j = mixture_to_json(m);
  CHECK(j["type"] == "powerlaw");
  const auto back = mixture_from_json(j);
  CHECK(back.power_law_params().gamma == 1.25);
  CHECK(back.power_law_params().delta == 6.5);
  CHECK(back.power_law_params().d == 0.37);
  CHECK(back.power_law_params().sigma_min == 0.01);
  CHECK(back.norm_constant() == m.norm_constant());

  const auto dg = MixtureDensity::degenerate(0.5);
  const auto dj = mixture_to_json(dg);
  CHECK(mixture_from_json(dj).sigma0() == 0.5);
}

TEST_CASE("normalization is recomputed, never trusted") {
  nlohmann::json j = {{"type", "powerlaw"}, {"gamma", 1.0}, {"delta", 4.0},
                      {"d", 1.0},           {"sigma_min", 0.0},
                      {"norm_A", 123456.0}};
  const auto m = mixture_from_json(j);
  CHECK(m.norm_constant() == doctest::Approx(4.0 / M_PI).epsilon(1e-10));
}

TEST_CASE("mixture json rejects junk") {
  CHECK_THROWS_AS(mixture_from_json(nlohmann::json::parse("{}")), ParseError);
  CHECK_THROWS_AS(mixture_from_json(nlohmann::json{{"type", "cauchy"}}),
                  ParseError);
  CHECK_THROWS_AS(mixture_from_json(nlohmann::json{{"type", "degenerate"}}),
                  ParseError);
}

TEST_CASE("model json round trip") {
  const ProcessModel model(0.358, MixtureDensity::power_law(1, 9, 1, 0), 17);
  const auto j = model_to_json(model);
  const auto back = model_from_json(j);
  CHECK(back.scaling_exponent() == 0.358);
  CHECK(back.horizon() == 17);
  CHECK(back.mixture().power_law_params().delta == 9.0);
}

TEST_CASE("ensemble csv round trip is exact") {
  const ProcessModel model(0.41, MixtureDensity::power_law(1, 7, 1, 0), 5);
  Ensemble e = simulate_ensemble(model, 37, 99, 2);
  const std::string path = temp_path("ens") + ".csv";
  write_ensemble_csv(path, e);
  const Ensemble back = read_ensemble_csv(path);
  CHECK(back.histories() == 37);
  CHECK(back.horizon() == 5);
  CHECK(back.data() == e.data());
  fs::remove(path);
}

TEST_CASE("ensemble csv header and layout") {
  Ensemble e(2, 3);
  e.ret(0, 1) = 0.5;
  e.ret(1, 3) = -0.25;
  const std::string path = temp_path("hdr") + ".csv";
  write_ensemble_csv(path, e);
  const std::string text = read_text_file(path);
  CHECK(text.rfind("history,r1,r2,r3\n", 0) == 0);
  CHECK(text.find("\n1,0.5,0,0\n") != std::string::npos);
  CHECK(text.find("\n2,0,0,-0.25\n") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("ensemble csv rejects malformed input") {
  const std::string path = temp_path("bad") + ".csv";
  write_text_file(path, "history,r1,r2\n1,0.5\n");
  CHECK_THROWS_AS(read_ensemble_csv(path), ParseError);
  write_text_file(path, "wrong,r1\n1,0.5\n");
  CHECK_THROWS_AS(read_ensemble_csv(path), ParseError);
  fs::remove(path);
}

TEST_CASE("ensemble meta round trip") {
  Ensemble e(3, 2);
  e.meta.source = "simulated";
  e.meta.seed = 777;
  e.set_detrended(true);
  const auto j = ensemble_meta_json(e);
  Ensemble f(3, 2);
  apply_ensemble_meta(f, j);
  CHECK(f.meta.source == "simulated");
  CHECK(f.meta.seed == 777);
  CHECK(f.detrended());
}

TEST_CASE("curve csv layouts") {
  CorrelatorCurve kappa;
  kappa.kind = CurveKind::kappa;
  kappa.alpha = 0.5;
  kappa.beta = 1.5;
  kappa.points = {{2, 0, 1.25}, {3, 0, 1.3}};
  kappa.errors = {0.01, 0.01};
  std::string out;
  append_curve_csv(out, kappa, true);
  CHECK(out ==
        "alpha,beta,n,value,err\n"
        "0.5,1.5,2,1.25,0.01\n"
        "0.5,1.5,3,1.3,0.01\n");

  CorrelatorCurve bigk;
  bigk.kind = CurveKind::K;
  bigk.alpha = 1.0;
  bigk.beta = 1.0;
  bigk.points = {{1, 5, 1.4}};
  std::string out2;
  append_curve_csv(out2, bigk, true);
  CHECK(out2 == "alpha,beta,t1,t2,value\n1,1,1,5,1.3999999999999999\n");

  CorrelatorCurve lin;
  lin.kind = CurveKind::linear;
  lin.points = {{2, 0, 0.0}};
  std::string out3;
  append_curve_csv(out3, lin, true);
  CHECK(out3 == "n,value\n2,0\n");
}

TEST_CASE("curve json carries the kind and points") {
  CorrelatorCurve c;
  c.kind = CurveKind::vol_autocorr;
  c.source = "theory";
  c.points = {{2, 0, 0.25}, {3, 0, 0.2}};
  const auto j = curve_to_json(c);
  CHECK(j["kind"] == "vol_autocorr");
  CHECK(j["source"] == "theory");
  CHECK(j["points"].size() == 2);
  CHECK(j["points"][0]["n"] == 2);
}

TEST_CASE("collapse csv layout") {
  CollapsePlotData data;
  data.entries.push_back({5, 1, {-0.5, 0.5}, {0.125, 0.25}});
  const std::string path = temp_path("col") + ".csv";
  write_collapse_csv(path, data);
  CHECK(read_text_file(path) ==
        "t,T,bin_center,density\n"
        "5,1,-0.5,0.125\n"
        "5,1,0.5,0.25\n");
  fs::remove(path);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 2.3e-7, -1.7976931348623157e308, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

}  // TEST_SUITE
