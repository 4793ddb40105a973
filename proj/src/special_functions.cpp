#include "wflow/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wflow/errors.hpp"

namespace wflow {
namespace {

// log(DBL_MAX), minus a little headroom for the trigonometric factor.
constexpr double kMaxExponent = 709.0;

void check_order(int n, int max_order) {
  if (n < 0) {
    throw ContractViolation("Hermite order must be non-negative, got " +
                            std::to_string(n));
  }
  if (n > max_order) {
    throw CapabilityError("Hermite order " + std::to_string(n) +
                          " exceeds supported maximum " +
                          std::to_string(max_order));
  }
}

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw InputError(std::string(what) + " must be finite");
  }
}

}  // namespace

HermiteEvaluator::HermiteEvaluator(int max_order) : max_order_(max_order) {
  if (max_order < 0 || max_order > kMaxHermiteOrder) {
    throw CapabilityError("HermiteEvaluator max_order must lie in [0, " +
                          std::to_string(kMaxHermiteOrder) + "]");
  }
}

double HermiteEvaluator::operator()(int n, double x) const {
  check_order(n, max_order_);
  check_finite(x, "Hermite argument");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int j = 1; j < n; ++j) {
    const double next = 2.0 * x * cur - 2.0 * j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void HermiteEvaluator::fill(double x, std::span<double> out,
                            double scale) const {
  if (out.empty()) return;
  check_order(static_cast<int>(out.size()) - 1, max_order_);
  check_finite(x, "Hermite argument");
  out[0] = scale;
  if (out.size() == 1) return;
  out[1] = 2.0 * x * scale;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    out[j + 1] = 2.0 * x * out[j] - 2.0 * static_cast<double>(j) * out[j - 1];
  }
}

double hermite(int n, double x) {
  static const HermiteEvaluator evaluator;
  return evaluator(n, x);
}

std::complex<double> odd_hermite_generating(std::complex<double> t, double x) {
  check_finite(x, "generating-function argument");
  if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
    throw InputError("generating-function parameter must be finite");
  }
  if (t.imag() == 0.0) {
    // Real t: split sinh so each exponential stays as small as possible.
    const double tr = t.real();
    const double up = 2.0 * x * tr - tr * tr;
    const double down = -2.0 * x * tr - tr * tr;
    if (std::max(up, down) > kMaxExponent) {
      throw RangeError("odd Hermite generating function overflows: exponent " +
                       std::to_string(std::max(up, down)));
    }
    return {0.5 * (std::exp(up) - std::exp(down)), 0.0};
  }
  if (t.real() == 0.0) {
    const double s = t.imag();
    if (s * s > kMaxExponent) {
      throw RangeError("odd Hermite generating function overflows: exp(s^2) "
                       "with |s| = " + std::to_string(std::abs(s)));
    }
    return {0.0, std::exp(s * s) * std::sin(2.0 * x * s)};
  }
  const std::complex<double> up = 2.0 * x * t - t * t;
  const std::complex<double> down = -2.0 * x * t - t * t;
  if (std::max(up.real(), down.real()) > kMaxExponent) {
    throw RangeError("odd Hermite generating function overflows: exponent " +
                     std::to_string(std::max(up.real(), down.real())));
  }
  return 0.5 * (std::exp(up) - std::exp(down));
}

double gaussian_derivative(double a, int order, double u) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw InputError("gaussian exponent must be positive and finite");
  }
  check_order(order, kMaxHermiteOrder);
  check_finite(u, "gaussian argument");
  const double root = std::sqrt(a);
  std::vector<double> h(static_cast<std::size_t>(order) + 1);
  HermiteEvaluator().fill(root * u, h, std::exp(-a * u * u));
  const double sign = (order % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(root, order) * h.back();
}

double gaussian_odd_derivative(double a, int order, double u) {
  if (order % 2 == 0) {
    throw ContractViolation("gaussian_odd_derivative needs an odd order, got " +
                            std::to_string(order));
  }
  return gaussian_derivative(a, order, u);
}

}  // namespace wflow
