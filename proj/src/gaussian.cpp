#include "wflow/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wflow/errors.hpp"
#include "wflow/special_functions.hpp"

namespace wflow {

double GaussianMarginal::operator()(double u) const {
  return std::sqrt(exponent / std::numbers::pi) * std::exp(-exponent * u * u);
}

PhysicalGaussian::PhysicalGaussian(double zeta, const UnitsMap& units)
    : zeta_(zeta),
      units_(units),
      length_(1.0 / std::sqrt(units.mass() * units.angular_frequency())) {
  if (!std::isfinite(zeta)) throw InputError("zeta must be finite");
}

double PhysicalGaussian::operator()(double q, double p) const {
  const double hbar = units_.planck();
  const double a2 = length_ * length_;
  const double arg = std::exp(2.0 * zeta_) * q * q / a2 +
                     std::exp(-2.0 * zeta_) * a2 * p * p;
  return std::exp(-arg / hbar) / (std::numbers::pi * hbar);
}

GaussianEnsemble::GaussianEnsemble(double a, double b)
    : a_(a), b_(b), norm_(std::sqrt(a * b) / std::numbers::pi) {
  const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(a) || !ok(b)) {
    throw InputError("gaussian exponents must be positive and finite");
  }
}

GaussianEnsemble GaussianEnsemble::general(double a, double b) {
  return GaussianEnsemble(a, b);
}

GaussianEnsemble GaussianEnsemble::alpha_form(double alpha) {
  if (!std::isfinite(alpha) || alpha == 0.0) {
    throw InputError("alpha must be finite and nonzero");
  }
  return GaussianEnsemble(alpha * alpha, alpha * alpha);
}

GaussianEnsemble GaussianEnsemble::squeezed(double zeta) {
  if (!std::isfinite(zeta)) throw InputError("zeta must be finite");
  return GaussianEnsemble(std::exp(2.0 * zeta), std::exp(-2.0 * zeta));
}

double GaussianEnsemble::operator()(double x, double k) const {
  return norm_ * std::exp(-a_ * x * x - b_ * k * k);
}

double GaussianEnsemble::partial(int order_x, int order_k, double x,
                                 double k) const {
  if (order_x < 0 || order_k < 0) {
    throw ContractViolation("partial derivative orders must be >= 0");
  }
  if (order_x + order_k > kMaxHermiteOrder) {
    throw CapabilityError("mixed partial of total order " +
                          std::to_string(order_x + order_k) +
                          " exceeds the Hermite limit " +
                          std::to_string(kMaxHermiteOrder));
  }
  return norm_ * gaussian_derivative(a_, order_x, x) *
         gaussian_derivative(b_, order_k, k);
}

std::pair<GaussianMarginal, GaussianMarginal> GaussianEnsemble::marginals()
    const {
  return {GaussianMarginal{a_}, GaussianMarginal{b_}};
}

bool GaussianEnsemble::is_squeezed_form() const {
  return std::abs(a_ * b_ - 1.0) <= 1e-12;
}

double GaussianEnsemble::zeta() const {
  if (!is_squeezed_form()) {
    throw ContractViolation("ensemble is not in squeezed form (a b != 1)");
  }
  return 0.5 * std::log(a_);
}

PhysicalGaussian GaussianEnsemble::physical_form(const UnitsMap& units) const {
  return PhysicalGaussian(zeta(), units);
}

}  // namespace wflow
