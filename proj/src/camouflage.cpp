#include "wflow/camouflage.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "wflow/errors.hpp"

namespace wflow {
namespace {

constexpr std::size_t kMaxReportedPoints = 32;

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

CamouflageParams solve_constraints(double zeta, double gamma1, double gamma2,
                                   double nu1, double nu2,
                                   const SqueezeBound& bound) {
  for (double v : {zeta, gamma1, gamma2, nu1, nu2}) {
    if (!std::isfinite(v)) throw InputError("camouflage parameters must be finite");
  }
  if (!(nu1 > 0.0) || !(nu2 > 0.0)) {
    throw InputError("camouflage frequencies nu1, nu2 must be positive");
  }
  if (std::abs(zeta) > bound.max_abs_zeta && !bound.allow_large_squeeze) {
    std::ostringstream msg;
    msg << "|zeta| = " << std::abs(zeta) << " exceeds the squeeze bound |zeta| <= "
        << bound.max_abs_zeta
        << "; larger squeezes need allow_large_squeeze with a finer grid";
    throw InputError(msg.str());
  }
  CamouflageParams p;
  p.zeta = zeta;
  p.gamma1 = gamma1;
  p.gamma2 = gamma2;
  p.nu1 = nu1;
  p.nu2 = nu2;
  const double squeeze = std::exp(-2.0 * zeta);
  p.mu1 = squeeze * nu2;
  p.mu2 = squeeze * nu1;
  p.lambda2 = -gamma1 * std::exp(+0.5 * nu2 * p.mu1);
  p.lambda1 = -gamma2 * std::exp(-0.5 * nu1 * p.mu2);
  return p;
}

CamouflageParams simplified_parameters(double zeta, double gamma,
                                       const SqueezeBound& bound) {
  const double stretch = std::exp(2.0 * zeta);
  return solve_constraints(zeta, gamma * std::exp(-0.5 * stretch), 1.0, 1.0,
                           stretch, bound);
}

CamouflageParams with_override(CamouflageParams params,
                               const LambdaOverride& override_) {
  if (override_.lambda1) params.lambda1 = *override_.lambda1;
  if (override_.lambda2) params.lambda2 = *override_.lambda2;
  if (!std::isfinite(params.lambda1) || !std::isfinite(params.lambda2)) {
    throw InputError("lambda overrides must be finite");
  }
  return params;
}

SeparableHamiltonian build_hamiltonian(const CamouflageParams& p) {
  return {{Term::cosh(p.gamma1, p.mu1), Term::cos(p.gamma2, p.mu2)},
          {Term::cosh(p.lambda1, p.nu1), Term::cos(p.lambda2, p.nu2)}};
}

GaussianEnsemble matched_ensemble(const CamouflageParams& p) {
  return GaussianEnsemble::squeezed(p.zeta);
}

ResidualCoefficients residual_coefficients(const CamouflageParams& p) {
  const double e1 = 0.25 * p.nu1 * p.mu2;
  const double e2 = 0.25 * p.nu2 * p.mu1;
  return {p.gamma2 * std::exp(-e1) + p.lambda1 * std::exp(+e1),
          p.gamma1 * std::exp(+e2) + p.lambda2 * std::exp(-e2)};
}

void check_frequency_constraint(const CamouflageParams& p) {
  const double squeeze = std::exp(-2.0 * p.zeta);
  if (!close(p.mu1, squeeze * p.nu2) || !close(p.mu2, squeeze * p.nu1)) {
    throw ContractViolation(
        "frequency constraint mu1 = e^{-2 zeta} nu2, mu2 = e^{-2 zeta} nu1 "
        "violated; the closed-form divergence does not apply");
  }
}

double camouflage_divergence(const CamouflageParams& params, double x, double k,
                             const LambdaOverride& override_) {
  const CamouflageParams p = with_override(params, override_);
  check_frequency_constraint(p);
  const auto c = residual_coefficients(p);
  const double g = std::exp(-(std::exp(2.0 * p.zeta) * x * x +
                              std::exp(-2.0 * p.zeta) * k * k)) /
                   std::numbers::pi;
  return 2.0 *
         (std::sin(p.mu2 * k) * std::sinh(p.nu1 * x) * c.sinh_sin -
          std::sinh(p.mu1 * k) * std::sin(p.nu2 * x) * c.sin_sinh) *
         g;
}

void check_grid_resolution(const CamouflageParams& p,
                           const PhaseSpaceGrid& grid) {
  grid.validate();
  const auto check = [](double frequency, double step, const char* axis,
                        const char* name) {
    const double per_period = 2.0 * std::numbers::pi / (frequency * step);
    if (per_period < kMinPointsPerPeriod) {
      std::ostringstream msg;
      msg << "grid under-resolves cos(" << name << " " << axis << ") with "
          << name << " = " << frequency << ": " << per_period
          << " points per period on the " << axis
          << " axis, bound is >= " << kMinPointsPerPeriod
          << " points per period";
      throw GridError(msg.str());
    }
  };
  check(p.nu2, grid.x.step(), "x", "nu2");
  check(p.mu2, grid.k.step(), "k", "mu2");
}

namespace {

// Per-row partial results, reduced in row order for deterministic output.
struct RowSummary {
  PathMaximum closed_form, generating, series, classical;
  double discrepancy = 0.0;
  std::size_t nonconverged = 0;
  std::vector<std::pair<double, double>> nonconverged_points;
  int terms_min = std::numeric_limits<int>::max();
  int terms_max = 0;
  double terms_sum = 0.0;
};

void track(PathMaximum& m, double v, double x, double k) {
  if (std::abs(v) > m.max_abs) m = {std::abs(v), x, k};
}

void merge(PathMaximum& into, const PathMaximum& from) {
  if (from.max_abs > into.max_abs) into = from;
}

}  // namespace

StationarityCertificate stationarity_certificate(
    const CamouflageParams& params, const PhaseSpaceGrid& grid,
    const TruncationPolicy& policy, double tolerance,
    const LambdaOverride& override_) {
  policy.validate();
  check_grid_resolution(params, grid);
  if (!(tolerance > 0.0)) throw InputError("certificate tolerance must be positive");
  const CamouflageParams p = with_override(params, override_);
  check_frequency_constraint(p);
  const SeparableHamiltonian h = build_hamiltonian(p);
  const GaussianEnsemble w = matched_ensemble(p);
  // Terms below term_rel_tol * tolerance cannot move the decision; in the far
  // tail the series is tiny in absolute terms but needs far more than eta_max
  // terms to converge relative to its own sum.
  TruncationPolicy series_policy = policy;
  series_policy.term_abs_tol =
      std::max(policy.term_abs_tol, policy.term_rel_tol * tolerance);

  std::vector<RowSummary> rows(static_cast<std::size_t>(grid.x.n));
  parallel_rows(grid.x.n, [&](int i) {
    RowSummary& r = rows[static_cast<std::size_t>(i)];
    const double x = grid.x.at(i);
    for (int j = 0; j < grid.k.n; ++j) {
      const double k = grid.k.at(j);
      const double closed = camouflage_divergence(p, x, k);
      const double generating = div_j_closed_form(w, h, x, k);
      const StationarityResult series = stationarity_quantifier(w, h, x, k, series_policy);
      track(r.closed_form, closed, x, k);
      track(r.generating, generating, x, k);
      track(r.series, series.value, x, k);
      track(r.classical, classical_divergence(w, h, x, k), x, k);
      r.discrepancy = std::max({r.discrepancy, std::abs(closed - generating),
                                std::abs(closed - series.value),
                                std::abs(generating - series.value)});
      if (!series.converged()) {
        ++r.nonconverged;
        if (r.nonconverged_points.size() < kMaxReportedPoints) {
          r.nonconverged_points.emplace_back(x, k);
        }
      }
      const int terms = series.x_part.terms_used + series.k_part.terms_used;
      r.terms_min = std::min(r.terms_min, terms);
      r.terms_max = std::max(r.terms_max, terms);
      r.terms_sum += terms;
    }
  });

  StationarityCertificate cert;
  cert.tolerance = tolerance;
  cert.coefficients = residual_coefficients(p);
  cert.points = grid.size();
  cert.series_terms_min = std::numeric_limits<int>::max();
  double terms_sum = 0.0;
  for (const auto& r : rows) {
    merge(cert.closed_form, r.closed_form);
    merge(cert.generating, r.generating);
    merge(cert.series, r.series);
    merge(cert.classical, r.classical);
    cert.max_pairwise_discrepancy =
        std::max(cert.max_pairwise_discrepancy, r.discrepancy);
    cert.series_nonconverged += r.nonconverged;
    for (const auto& pt : r.nonconverged_points) {
      if (cert.nonconverged_points.size() < kMaxReportedPoints) {
        cert.nonconverged_points.push_back(pt);
      }
    }
    cert.series_terms_min = std::min(cert.series_terms_min, r.terms_min);
    cert.series_terms_max = std::max(cert.series_terms_max, r.terms_max);
    terms_sum += r.terms_sum;
  }
  cert.series_terms_mean = terms_sum / static_cast<double>(cert.points);
  cert.certified = cert.closed_form.max_abs <= tolerance &&
                   cert.generating.max_abs <= tolerance &&
                   cert.series.max_abs <= tolerance &&
                   cert.series_nonconverged == 0;
  return cert;
}

}  // namespace wflow
