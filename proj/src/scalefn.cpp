#include "scalemix/scalefn.hpp"

#include <cmath>

namespace scalemix {

namespace {
const double kInvSqrt2Pi = 0.3989422804014326779;
}

double g_density(const MixtureDensity& mixture, double x) {
  return mixture.expectation([x](double sigma) {
    const double z = x / sigma;
    return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
  });
}

double return_scale(double D, int t, int T) {
  if (!(D > 0.0 && D < 1.0)) {
    throw InvalidParameter("return_scale: requires 0 < D < 1");
  }
  if (T < 1 || t < T) {
    throw IndexOutOfRange("return_scale: requires 1 <= T <= t");
  }
  return std::sqrt(std::pow(t, 2.0 * D) - std::pow(t - T, 2.0 * D));
}

double return_pdf(const ProcessModel& model, const ReturnPdfQuery& query) {
  if (query.t > model.horizon()) {
    throw IndexOutOfRange("return_pdf: t exceeds the model horizon");
  }
  const double s = return_scale(model.scaling_exponent(), query.t, query.T);
  return g_density(model.mixture(), query.r / s) / s;
}

double char_fn_diag(const ProcessModel& model, int n, double k) {
  if (n < 1 || n > model.horizon()) {
    throw IndexOutOfRange("char_fn_diag: requires 1 <= n <= horizon");
  }
  const double lambda =
      0.5 * k * k * std::pow(n, 2.0 * model.scaling_exponent());
  return model.mixture().expectation(
      [lambda](double sigma) { return std::exp(-lambda * sigma * sigma); });
}

double char_fn_marginal(const ProcessModel& model, int i, double k) {
  if (i < 1 || i > model.horizon()) {
    throw IndexOutOfRange("char_fn_marginal: requires 1 <= i <= horizon");
  }
  const double a = model.scales()[i - 1];
  const double lambda = 0.5 * k * k * a * a;
  return model.mixture().expectation(
      [lambda](double sigma) { return std::exp(-lambda * sigma * sigma); });
}

}  // namespace scalemix
