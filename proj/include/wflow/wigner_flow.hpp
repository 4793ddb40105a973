#pragma once

#include "wflow/gaussian.hpp"
#include "wflow/hamiltonian.hpp"

namespace wflow {

// Truncation of the hbar^{2 eta} series. eta_max = 0 keeps only the
// classical (Liouville) term.
struct TruncationPolicy {
  static constexpr int kMaxEta = 30;

  int eta_max = kMaxEta;
  double term_rel_tol = 1e-14;
  double term_abs_tol = 1e-300;

  // Throws InputError / CapabilityError.
  void validate() const;

  static TruncationPolicy classical() { return {0, 1e-14, 1e-300}; }
};

struct FlowDiagnostics {
  int terms_used = 0;
  double last_term_magnitude = 0.0;
  bool converged = true;
};

struct SeriesResult {
  double value = 0.0;
  FlowDiagnostics diagnostics;
};

struct StationarityResult {
  double value = 0.0;
  FlowDiagnostics x_part;
  FlowDiagnostics k_part;

  bool converged() const { return x_part.converged && k_part.converged; }
};

struct ClassicalCurrents {
  double x = 0.0;
  double k = 0.0;
};

struct LiouvillianityResult {
  bool masked = false;
  double value = 0.0;  // meaningless when masked
  FlowDiagnostics x_part;
  FlowDiagnostics k_part;

  bool converged() const { return x_part.converged && k_part.converged; }
};

// Points with W below this fraction of the peak are masked for the
// Liouvillianity quantifier, which divides by W^2.
inline constexpr double kLiouvillianityMaskFraction = 1e-12;

// J_x = sum_eta (-1)^eta / (4^eta (2eta+1)!) K^{(2eta+1)}(k) d_x^{2eta} W
SeriesResult current_x_series(const GaussianEnsemble& w,
                              const SeparableHamiltonian& h, double x, double k,
                              const TruncationPolicy& policy = {});

// J_k = -sum_eta (-1)^eta / (4^eta (2eta+1)!) V^{(2eta+1)}(x) d_k^{2eta} W
SeriesResult current_k_series(const GaussianEnsemble& w,
                              const SeparableHamiltonian& h, double x, double k,
                              const TruncationPolicy& policy = {});

// d_x J_x: same series with d_x^{2eta+1} W.
SeriesResult div_jx_series(const GaussianEnsemble& w,
                           const SeparableHamiltonian& h, double x, double k,
                           const TruncationPolicy& policy = {});

// d_k J_k: same series with d_k^{2eta+1} W.
SeriesResult div_jk_series(const GaussianEnsemble& w,
                           const SeparableHamiltonian& h, double x, double k,
                           const TruncationPolicy& policy = {});

// div J = -dW/dt.
StationarityResult stationarity_quantifier(const GaussianEnsemble& w,
                                           const SeparableHamiltonian& h,
                                           double x, double k,
                                           const TruncationPolicy& policy = {});

// Resummed div J through the odd Hermite generating function. Every term
// must be Cosh or Cos; throws UnsupportedTermError otherwise.
double div_j_closed_form(const GaussianEnsemble& w,
                         const SeparableHamiltonian& h, double x, double k);

// ((dH/dk) W, -(dH/dx) W).
ClassicalCurrents classical_currents(const GaussianEnsemble& w,
                                     const SeparableHamiltonian& h, double x,
                                     double k);

// div of the classical currents, i.e. the Poisson bracket term.
double classical_divergence(const GaussianEnsemble& w,
                            const SeparableHamiltonian& h, double x, double k);

bool liouvillianity_masked(const GaussianEnsemble& w, double x, double k);

// div w, w = J / W. Only eta >= 1 contributes; the classical velocity
// field is divergence free.
LiouvillianityResult liouvillianity_quantifier(
    const GaussianEnsemble& w, const SeparableHamiltonian& h, double x,
    double k, const TruncationPolicy& policy = {});

}  // namespace wflow
