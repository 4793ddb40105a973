#pragma once

#include <limits>
#include <vector>

namespace wflow {

enum class TermKind { Cosh, Cos, Monomial };

const char* to_string(TermKind kind);

// One analytic term of a kinetic K(k) or potential V(x) function:
//   Cosh:     A cosh(f u)
//   Cos:      A cos(f u)
//   Monomial: A u^m, 0 <= m <= 8
// Odd derivatives factor as f^{2eta+1} times a carrier function, which is
// what the resummed flow expressions rely on.
class Term {
 public:
  static constexpr int kMaxMonomialPower = 8;
  // Returned by last_nonzero_order() for terms with infinitely many
  // non-vanishing derivatives.
  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  static Term cosh(double amplitude, double frequency);
  static Term cos(double amplitude, double frequency);
  static Term monomial(double amplitude, int power);

  TermKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }
  int power() const { return power_; }

  double value(double u) const;
  // Any derivative order >= 0.
  double derivative(int order, double u) const;
  // Highest derivative order that is not identically zero.
  int last_nonzero_order() const;

  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(TermKind kind, double amplitude, double frequency, int power);

  TermKind kind_;
  double amplitude_;
  double frequency_;
  int power_;
};

// Exact odd derivative; throws ContractViolation for even order.
double term_odd_derivative(const Term& term, int order, double u);

// H(x, k) = K(k) + V(x). No cross terms can be represented, so
// d^2H/dx dk vanishes identically.
struct SeparableHamiltonian {
  std::vector<Term> kinetic;    // functions of k
  std::vector<Term> potential;  // functions of x

  double kinetic_value(double k) const;
  double potential_value(double x) const;
  double kinetic_derivative(int order, double k) const;
  double potential_derivative(int order, double x) const;

  int kinetic_last_nonzero_order() const;
  int potential_last_nonzero_order() const;

  // True when every term is Cosh or Cos (resummable in closed form).
  bool factorizable() const;

  static SeparableHamiltonian harmonic(double mass = 1.0, double spring = 1.0);
};

double hamiltonian_eval(const SeparableHamiltonian& h, double x, double k);

struct PhaseVelocity {
  double x;
  double k;
};

// (dK/dk, -dV/dx).
PhaseVelocity classical_velocity(const SeparableHamiltonian& h, double x,
                                 double k);

struct PhasePoint {
  double first;
  double second;
};

// Physical scales. x = (m w / hbar)^{1/2} q, k = (m w hbar)^{-1/2} p.
class UnitsMap {
 public:
  UnitsMap(double mass, double angular_frequency, double planck);

  double mass() const { return mass_; }
  double angular_frequency() const { return omega_; }
  double planck() const { return hbar_; }

  double position_scale() const;  // x / q
  double momentum_scale() const;  // k / p

  PhasePoint to_dimensionless(double q, double p) const;
  PhasePoint to_physical(double x, double k) const;

 private:
  double mass_;
  double omega_;
  double hbar_;
};

}  // namespace wflow
