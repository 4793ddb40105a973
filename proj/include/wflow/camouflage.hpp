#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wflow/gaussian.hpp"
#include "wflow/grid.hpp"
#include "wflow/hamiltonian.hpp"
#include "wflow/wigner_flow.hpp"

namespace wflow {

// Squeeze bound for the camouflage family. Beyond max_abs_zeta the caller must
// opt in explicitly; the grid density check still applies.
struct SqueezeBound {
  static constexpr double kDefaultMaxAbsZeta = 1.5;

  double max_abs_zeta = kDefaultMaxAbsZeta;
  bool allow_large_squeeze = false;
};

// Parameters of
//   V(x) = lambda1 cosh(nu1 x) + lambda2 cos(nu2 x)
//   K(k) = gamma1 cosh(mu1 k) + gamma2 cos(mu2 k)
// with mu1 = e^{-2 zeta} nu2, mu2 = e^{-2 zeta} nu1 and
// lambda2 = -gamma1 e^{+nu2 mu1/2}, lambda1 = -gamma2 e^{-nu1 mu2/2}.
struct CamouflageParams {
  double zeta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double nu1 = 1.0;
  double nu2 = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

CamouflageParams solve_constraints(double zeta, double gamma1, double gamma2,
                                   double nu1, double nu2,
                                   const SqueezeBound& bound = {});

// The one-parameter family
//   V(x) = -exp(-e^{-2zeta}/2) cosh(x) - gamma cos(e^{2zeta} x)
//   K(k) = gamma exp(-e^{2zeta}/2) cosh(k) + cos(e^{-2zeta} k)
CamouflageParams simplified_parameters(double zeta, double gamma,
                                       const SqueezeBound& bound = {});

// Replaces potential amplitudes, leaving every frequency untouched.
struct LambdaOverride {
  std::optional<double> lambda1;
  std::optional<double> lambda2;

  bool empty() const { return !lambda1 && !lambda2; }
};

CamouflageParams with_override(CamouflageParams params,
                               const LambdaOverride& override_);

SeparableHamiltonian build_hamiltonian(const CamouflageParams& params);

GaussianEnsemble matched_ensemble(const CamouflageParams& params);

// Coefficients of the two brackets of the closed-form divergence:
//   sinh_sin = gamma2 e^{-nu1 mu2/4} + lambda1 e^{+nu1 mu2/4}
//   sin_sinh = gamma1 e^{+nu2 mu1/4} + lambda2 e^{-nu2 mu1/4}
// Both vanish for solved parameters.
struct ResidualCoefficients {
  double sinh_sin = 0.0;
  double sin_sinh = 0.0;
};

ResidualCoefficients residual_coefficients(const CamouflageParams& params);

// Throws ContractViolation when the frequency relations do not hold.
void check_frequency_constraint(const CamouflageParams& params);

// div J for the camouflage Hamiltonian and matched squeezed gaussian:
//   2 [ sin(mu2 k) sinh(nu1 x) c1 - sinh(mu1 k) sin(nu2 x) c2 ] G_zeta(x,k)
double camouflage_divergence(const CamouflageParams& params, double x, double k,
                             const LambdaOverride& override_ = {});

// Throws GridError naming the bound when an oscillating factor gets fewer than
// kMinPointsPerPeriod nodes per period on the grid.
inline constexpr double kMinPointsPerPeriod = 8.0;
void check_grid_resolution(const CamouflageParams& params,
                           const PhaseSpaceGrid& grid);

struct PathMaximum {
  double max_abs = 0.0;
  double x = 0.0;
  double k = 0.0;
};

struct StationarityCertificate {
  double tolerance = 0.0;
  PathMaximum closed_form;  // camouflage_divergence
  PathMaximum generating;   // div_j_closed_form
  PathMaximum series;       // stationarity_quantifier
  PathMaximum classical;    // divergence of the matched classical currents
  double max_pairwise_discrepancy = 0.0;
  ResidualCoefficients coefficients;
  std::size_t points = 0;
  std::size_t series_nonconverged = 0;
  std::vector<std::pair<double, double>> nonconverged_points;  // capped
  int series_terms_min = 0;
  int series_terms_max = 0;
  double series_terms_mean = 0.0;
  bool certified = false;
};

inline constexpr double kDefaultCertificateTolerance = 1e-10;

// Evaluates div J over the grid by three independent routes. Certified when
// every route stays within tolerance and the series converged everywhere.
StationarityCertificate stationarity_certificate(
    const CamouflageParams& params, const PhaseSpaceGrid& grid,
    const TruncationPolicy& policy = {},
    double tolerance = kDefaultCertificateTolerance,
    const LambdaOverride& override_ = {});

}  // namespace wflow
