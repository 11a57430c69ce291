#pragma once

#include "scalemix/mixture.hpp"
#include "scalemix/process.hpp"

namespace scalemix {

// Scaling function g(x) = E_rho[ normal_pdf(x; 0, sigma^2) ]: the common
// shape of all rescaled return distributions.
double g_density(const MixtureDensity& mixture, double x);

struct ReturnPdfQuery {
  int t;
  int T;
  double r;
};

// Rescaling factor sqrt(t^2D - (t-T)^2D) of the aggregated return r(t, T).
double return_scale(double D, int t, int T);

// Density of r(t, T): g(r / s) / s with s = return_scale(D, t, T). For
// T == t this is the pure scaling form t^-D g(t^-D r).
double return_pdf(const ProcessModel& model, const ReturnPdfQuery& query);

// Characteristic function of r_1 + ... + r_n along the diagonal wave
// vector: E_rho[ exp(-k^2 sigma^2 n^2D / 2) ]. Real-valued because the
// process is symmetric. Satisfies char_fn_diag(n, k) == char_fn_diag(1, n^D k).
double char_fn_diag(const ProcessModel& model, int n, double k);

// Characteristic function of the single elementary return r_i; equals
// char_fn_diag(1, a_i k).
double char_fn_marginal(const ProcessModel& model, int i, double k);

}  // namespace scalemix
