#include "wflow/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wflow/errors.hpp"

namespace wflow {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
}

// m (m-1) ... (m-n+1)
double falling_factorial(int m, int n) {
  double r = 1.0;
  for (int j = 0; j < n; ++j) r *= static_cast<double>(m - j);
  return r;
}

}  // namespace

const char* to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Cosh: return "cosh";
    case TermKind::Cos: return "cos";
    case TermKind::Monomial: return "monomial";
  }
  return "unknown";
}

Term::Term(TermKind kind, double amplitude, double frequency, int power)
    : kind_(kind), amplitude_(amplitude), frequency_(frequency), power_(power) {
  require_finite(amplitude, "term amplitude");
  if (kind != TermKind::Monomial) {
    require_finite(frequency, "term frequency");
    if (frequency == 0.0) throw InputError("cosh/cos frequency must be nonzero");
  } else if (power < 0 || power > kMaxMonomialPower) {
    throw InputError("monomial power must lie in [0, " +
                     std::to_string(kMaxMonomialPower) + "], got " +
                     std::to_string(power));
  }
}

Term Term::cosh(double amplitude, double frequency) {
  return Term(TermKind::Cosh, amplitude, frequency, 0);
}

Term Term::cos(double amplitude, double frequency) {
  return Term(TermKind::Cos, amplitude, frequency, 0);
}

Term Term::monomial(double amplitude, int power) {
  return Term(TermKind::Monomial, amplitude, 0.0, power);
}

double Term::value(double u) const { return derivative(0, u); }

double Term::derivative(int order, double u) const {
  if (order < 0) throw ContractViolation("derivative order must be >= 0");
  switch (kind_) {
    case TermKind::Cosh: {
      const double scale = amplitude_ * std::pow(frequency_, order);
      return scale * (order % 2 == 0 ? std::cosh(frequency_ * u)
                                     : std::sinh(frequency_ * u));
    }
    case TermKind::Cos: {
      // d^n cos(f u) = f^n cos(f u + n pi/2)
      const double scale = amplitude_ * std::pow(frequency_, order);
      const double arg = frequency_ * u;
      switch (order % 4) {
        case 0: return scale * std::cos(arg);
        case 1: return -scale * std::sin(arg);
        case 2: return -scale * std::cos(arg);
        default: return scale * std::sin(arg);
      }
    }
    case TermKind::Monomial:
      if (order > power_) return 0.0;
      return amplitude_ * falling_factorial(power_, order) *
             std::pow(u, power_ - order);
  }
  return 0.0;
}

int Term::last_nonzero_order() const {
  if (kind_ != TermKind::Monomial) return kUnbounded;
  return amplitude_ == 0.0 ? -1 : power_;
}

double term_odd_derivative(const Term& term, int order, double u) {
  if (order < 1 || order % 2 == 0) {
    throw ContractViolation("term_odd_derivative needs an odd order >= 1, got " +
                            std::to_string(order));
  }
  return term.derivative(order, u);
}

namespace {

double sum_derivatives(const std::vector<Term>& terms, int order, double u) {
  double s = 0.0;
  for (const auto& t : terms) s += t.derivative(order, u);
  return s;
}

int last_nonzero(const std::vector<Term>& terms) {
  int r = -1;
  for (const auto& t : terms) r = std::max(r, t.last_nonzero_order());
  return r;
}

}  // namespace

double SeparableHamiltonian::kinetic_value(double k) const {
  return sum_derivatives(kinetic, 0, k);
}

double SeparableHamiltonian::potential_value(double x) const {
  return sum_derivatives(potential, 0, x);
}

double SeparableHamiltonian::kinetic_derivative(int order, double k) const {
  return sum_derivatives(kinetic, order, k);
}

double SeparableHamiltonian::potential_derivative(int order, double x) const {
  return sum_derivatives(potential, order, x);
}

int SeparableHamiltonian::kinetic_last_nonzero_order() const {
  return last_nonzero(kinetic);
}

int SeparableHamiltonian::potential_last_nonzero_order() const {
  return last_nonzero(potential);
}

bool SeparableHamiltonian::factorizable() const {
  const auto trig = [](const Term& t) { return t.kind() != TermKind::Monomial; };
  return std::all_of(kinetic.begin(), kinetic.end(), trig) &&
         std::all_of(potential.begin(), potential.end(), trig);
}

SeparableHamiltonian SeparableHamiltonian::harmonic(double mass, double spring) {
  return {{Term::monomial(0.5 / mass, 2)}, {Term::monomial(0.5 * spring, 2)}};
}

double hamiltonian_eval(const SeparableHamiltonian& h, double x, double k) {
  require_finite(x, "x");
  require_finite(k, "k");
  return h.kinetic_value(k) + h.potential_value(x);
}

PhaseVelocity classical_velocity(const SeparableHamiltonian& h, double x,
                                 double k) {
  require_finite(x, "x");
  require_finite(k, "k");
  return {h.kinetic_derivative(1, k), -h.potential_derivative(1, x)};
}

UnitsMap::UnitsMap(double mass, double angular_frequency, double planck)
    : mass_(mass), omega_(angular_frequency), hbar_(planck) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(mass) || !positive(angular_frequency) || !positive(planck)) {
    throw InputError("units (mass, angular frequency, hbar) must be positive");
  }
}

double UnitsMap::position_scale() const {
  return std::sqrt(mass_ * omega_ / hbar_);
}

double UnitsMap::momentum_scale() const {
  return 1.0 / std::sqrt(mass_ * omega_ * hbar_);
}

PhasePoint UnitsMap::to_dimensionless(double q, double p) const {
  return {q * position_scale(), p * momentum_scale()};
}

PhasePoint UnitsMap::to_physical(double x, double k) const {
  return {x / position_scale(), k / momentum_scale()};
}

}  // namespace wflow
