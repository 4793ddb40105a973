#pragma once

#include <complex>
#include <span>

namespace wflow {

// Highest Hermite order supported anywhere in the library (eta <= 30).
inline constexpr int kMaxHermiteOrder = 61;

// Physicists' Hermite polynomials by forward recurrence
//   H_{n+1}(x) = 2x H_n(x) - 2n H_{n-1}(x).
class HermiteEvaluator {
 public:
  explicit HermiteEvaluator(int max_order = kMaxHermiteOrder);

  int max_order() const { return max_order_; }

  double operator()(int n, double x) const;

  // Writes scale * H_j(x) for j = 0 .. out.size()-1. Running the recurrence on
  // scaled values keeps H_n(x) * exp(-x^2) bounded where H_n alone is huge.
  void fill(double x, std::span<double> out, double scale = 1.0) const;

 private:
  int max_order_;
};

double hermite(int n, double x);

// Sum_{eta>=0} t^{2eta+1}/(2eta+1)! H_{2eta+1}(x) = exp(-t^2) sinh(2xt).
// For t = i s this is i exp(s^2) sin(2xs). Throws RangeError when the
// exponential factor leaves double range.
std::complex<double> odd_hermite_generating(std::complex<double> t, double x);

// d^n/du^n exp(-a u^2) = (-1)^n a^{n/2} H_n(sqrt(a) u) exp(-a u^2) for odd n.
double gaussian_odd_derivative(double a, int order, double u);

// Same identity for any order n >= 0.
double gaussian_derivative(double a, int order, double u);

}  // namespace wflow
