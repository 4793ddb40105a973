#pragma once

#include <utility>

#include "wflow/hamiltonian.hpp"

namespace wflow {

// Normalized density sqrt(c/pi) exp(-c u^2).
struct GaussianMarginal {
  double exponent;

  double operator()(double u) const;
  double variance() const { return 0.5 / exponent; }
};

// Gaussian over physical (q, p):
//   G(q,p) = (1/(pi hbar)) exp[-(1/hbar)(e^{2z} q^2/A^2 + e^{-2z} A^2 p^2)]
// with A = (m w)^{-1/2}.
class PhysicalGaussian {
 public:
  PhysicalGaussian(double zeta, const UnitsMap& units);

  double operator()(double q, double p) const;
  double length_scale() const { return length_; }

 private:
  double zeta_;
  UnitsMap units_;
  double length_;
};

// Centered gaussian Wigner function
//   W(x,k) = (sqrt(ab)/pi) exp(-a x^2 - b k^2).
// alpha form: a = b = alpha^2. Squeezed form: a = e^{2 zeta}, b = e^{-2 zeta}.
class GaussianEnsemble {
 public:
  static GaussianEnsemble general(double a, double b);
  static GaussianEnsemble alpha_form(double alpha);
  static GaussianEnsemble squeezed(double zeta);

  double a() const { return a_; }
  double b() const { return b_; }
  double normalization() const { return norm_; }
  double peak() const { return norm_; }

  double operator()(double x, double k) const;

  // d^{ox}/dx^{ox} d^{ok}/dk^{ok} W. Throws CapabilityError when
  // ox + ok exceeds the Hermite order limit.
  double partial(int order_x, int order_k, double x, double k) const;

  std::pair<GaussianMarginal, GaussianMarginal> marginals() const;

  // Only defined for the squeezed family (a b = 1).
  PhysicalGaussian physical_form(const UnitsMap& units) const;
  bool is_squeezed_form() const;
  double zeta() const;  // valid when is_squeezed_form()

 private:
  GaussianEnsemble(double a, double b);

  double a_;
  double b_;
  double norm_;
};

}  // namespace wflow
