#include "wflow/wigner_flow.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "wflow/errors.hpp"
#include "wflow/special_functions.hpp"

namespace wflow {
namespace {

using Complex = std::complex<double>;

// (i/2)^{2 eta} / (2 eta + 1)! = (-1)^eta / (4^eta (2 eta + 1)!)
const std::array<double, TruncationPolicy::kMaxEta + 1>& series_weights() {
  static const auto table = [] {
    std::array<double, TruncationPolicy::kMaxEta + 1> c{};
    double factorial = 1.0;  // (2 eta + 1)!
    double four = 1.0;       // 4^eta
    for (int eta = 0; eta <= TruncationPolicy::kMaxEta; ++eta) {
      if (eta > 0) {
        factorial *= (2.0 * eta) * (2.0 * eta + 1.0);
        four *= 4.0;
      }
      c[eta] = ((eta % 2 == 0) ? 1.0 : -1.0) / (four * factorial);
    }
    return c;
  }();
  return table;
}

void require_finite_point(double x, double k) {
  if (!std::isfinite(x) || !std::isfinite(k)) {
    throw InputError("phase-space point must be finite");
  }
}

// Derivative of one side of H (kinetic or potential) at its own coordinate.
struct HamiltonianSide {
  const std::vector<Term>& terms;
  int last_nonzero;
  double at;

  double odd_derivative(int order) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.derivative(order, at);
    return s;
  }
};

// Largest eta whose Hamiltonian factor (order 2 eta + 1) may be nonzero.
int eta_extent(int last_nonzero) {
  if (last_nonzero < 1) return -1;
  if (last_nonzero == Term::kUnbounded) return Term::kUnbounded;
  return (last_nonzero - 1) / 2;
}

// Accumulates sum_{eta=first}^{...} term(eta). Stops when two consecutive
// terms are negligible, when the Hamiltonian has no further nonzero odd
// derivative, or at policy.eta_max (then converged reflects the last term).
template <class TermFn>
SeriesResult accumulate(const TruncationPolicy& policy, int first, int extent,
                        TermFn term) {
  SeriesResult r;
  const int stop = std::min(policy.eta_max, extent);
  int small_run = 0;
  bool exhausted = true;
  for (int eta = first; eta <= stop; ++eta) {
    const double t = term(eta);
    r.value += t;
    ++r.diagnostics.terms_used;
    r.diagnostics.last_term_magnitude = std::abs(t);
    const double tol =
        std::max(policy.term_rel_tol * std::abs(r.value), policy.term_abs_tol);
    if (std::abs(t) <= tol) {
      if (++small_run >= 2) {
        exhausted = false;
        break;
      }
    } else {
      small_run = 0;
    }
  }
  if (exhausted && stop < extent) {
    // Cut by eta_max with nonzero terms remaining.
    r.diagnostics.converged = small_run > 0;
  }
  return r;
}

// Sum of c_eta * Hside^{(2eta+1)} * d_u^{2eta+offset} W along one axis.
// `exponent` is the gaussian exponent along u and `weight` the value W(x,k),
// so the eta = 0 current is exactly the classical product H' * W.
SeriesResult flow_series(const HamiltonianSide& side, double exponent, double u,
                         double weight, int offset, double sign,
                         const TruncationPolicy& policy) {
  policy.validate();
  const int extent = eta_extent(side.last_nonzero);
  const int last_eta = std::min(policy.eta_max, extent);
  if (last_eta < 0) return {};
  const double root = std::sqrt(exponent);
  std::array<double, kMaxHermiteOrder + 1> h{};
  const std::size_t count = static_cast<std::size_t>(2 * last_eta + offset + 1);
  HermiteEvaluator().fill(root * u, std::span(h.data(), count), weight);
  const auto& c = series_weights();
  return accumulate(policy, 0, extent, [&](int eta) {
    const int n = 2 * eta + offset;
    // d_u^n exp(-a u^2) = (-sqrt(a))^n H_n(sqrt(a) u) exp(-a u^2)
    const double dw = ((n % 2 == 0) ? 1.0 : -1.0) * std::pow(root, n) * h[n];
    return sign * c[eta] * side.odd_derivative(2 * eta + 1) * dw;
  });
}

HamiltonianSide kinetic_side(const SeparableHamiltonian& h, double k) {
  return {h.kinetic, h.kinetic_last_nonzero_order(), k};
}

HamiltonianSide potential_side(const SeparableHamiltonian& h, double x) {
  return {h.potential, h.potential_last_nonzero_order(), x};
}

}  // namespace

void TruncationPolicy::validate() const {
  if (eta_max < 0) throw InputError("eta_max must be >= 0");
  if (eta_max > kMaxEta) {
    throw CapabilityError("eta_max " + std::to_string(eta_max) +
                          " exceeds supported maximum " +
                          std::to_string(kMaxEta));
  }
  if (!(term_rel_tol > 0.0) || !(term_abs_tol > 0.0)) {
    throw InputError("truncation tolerances must be positive");
  }
}

SeriesResult current_x_series(const GaussianEnsemble& w,
                              const SeparableHamiltonian& h, double x, double k,
                              const TruncationPolicy& policy) {
  require_finite_point(x, k);
  return flow_series(kinetic_side(h, k), w.a(), x, w(x, k), 0, 1.0, policy);
}

SeriesResult current_k_series(const GaussianEnsemble& w,
                              const SeparableHamiltonian& h, double x, double k,
                              const TruncationPolicy& policy) {
  require_finite_point(x, k);
  return flow_series(potential_side(h, x), w.b(), k, w(x, k), 0, -1.0,
                     policy);
}

SeriesResult div_jx_series(const GaussianEnsemble& w,
                           const SeparableHamiltonian& h, double x, double k,
                           const TruncationPolicy& policy) {
  require_finite_point(x, k);
  return flow_series(kinetic_side(h, k), w.a(), x, w(x, k), 1, 1.0, policy);
}

SeriesResult div_jk_series(const GaussianEnsemble& w,
                           const SeparableHamiltonian& h, double x, double k,
                           const TruncationPolicy& policy) {
  require_finite_point(x, k);
  return flow_series(potential_side(h, x), w.b(), k, w(x, k), 1, -1.0,
                     policy);
}

StationarityResult stationarity_quantifier(const GaussianEnsemble& w,
                                           const SeparableHamiltonian& h,
                                           double x, double k,
                                           const TruncationPolicy& policy) {
  const auto jx = div_jx_series(w, h, x, k, policy);
  const auto jk = div_jk_series(w, h, x, k, policy);
  return {jx.value + jk.value, jx.diagnostics, jk.diagnostics};
}

namespace {

// Factorized odd derivatives: T^{(2eta+1)}(u) = f_eff^{2eta+1} carrier(u).
struct Factorized {
  Complex frequency;
  Complex carrier;
};

Factorized factorize(const Term& t, double u) {
  const double f = t.frequency();
  const double amp = t.amplitude();
  switch (t.kind()) {
    case TermKind::Cosh:
      return {Complex(f, 0.0), Complex(amp * std::sinh(f * u), 0.0)};
    case TermKind::Cos:
      // (-1)^{eta+1} f^{2eta+1} sin = (i f)^{2eta+1} * (i sin)
      return {Complex(0.0, f), Complex(0.0, amp * std::sin(f * u))};
    case TermKind::Monomial:
      break;
  }
  throw UnsupportedTermError(
      "closed-form divergence needs cosh/cos terms; monomial terms must use "
      "the series path");
}

// sum_eta c_eta Hside^{(2eta+1)} d_u^{2eta+1} g(u) / g(u), g = exp(-a u^2),
// resummed: 2i carrier * gen(i f sqrt(a)/2, sqrt(a) u).
double resummed(const std::vector<Term>& terms, double a, double u,
                double side_value) {
  const double root = std::sqrt(a);
  Complex total = 0.0;
  for (const auto& t : terms) {
    const auto fz = factorize(t, side_value);
    const Complex param = Complex(0.0, 1.0) * fz.frequency * (0.5 * root);
    total += Complex(0.0, 2.0) * fz.carrier *
             odd_hermite_generating(param, root * u);
  }
  return total.real();
}

}  // namespace

double div_j_closed_form(const GaussianEnsemble& w,
                         const SeparableHamiltonian& h, double x, double k) {
  require_finite_point(x, k);
  if (!h.factorizable()) {
    throw UnsupportedTermError(
        "closed-form divergence needs cosh/cos terms; monomial terms must use "
        "the series path");
  }
  const double g = w(x, k);
  const double dx_jx = resummed(h.kinetic, w.a(), x, k);
  const double dk_jk = -resummed(h.potential, w.b(), k, x);
  return (dx_jx + dk_jk) * g;
}

ClassicalCurrents classical_currents(const GaussianEnsemble& w,
                                     const SeparableHamiltonian& h, double x,
                                     double k) {
  const auto v = classical_velocity(h, x, k);
  const double g = w(x, k);
  return {v.x * g, v.k * g};
}

double classical_divergence(const GaussianEnsemble& w,
                            const SeparableHamiltonian& h, double x, double k) {
  const auto v = classical_velocity(h, x, k);
  return v.x * w.partial(1, 0, x, k) + v.k * w.partial(0, 1, x, k);
}

bool liouvillianity_masked(const GaussianEnsemble& w, double x, double k) {
  return w(x, k) < kLiouvillianityMaskFraction * w.peak();
}

namespace {

// sum_{eta>=1} c_eta Hside^{(2eta+1)} d_u[(1/g) d_u^{2eta} g]. With
// (1/g) d_u^{2eta} g = a^eta H_{2eta}(sqrt(a) u) the quotient rule collapses to
//   d_u[...] = a^{eta+1/2} (2y H_{2eta}(y) - H_{2eta+1}(y)) = 4 eta a^{eta+1/2} H_{2eta-1}(y).
SeriesResult velocity_divergence_series(const HamiltonianSide& side, double a,
                                        double u, double sign,
                                        const TruncationPolicy& policy) {
  policy.validate();
  const int extent = eta_extent(side.last_nonzero);
  const int last_eta = std::min(policy.eta_max, extent);
  if (last_eta < 1) return {};
  const double root = std::sqrt(a);
  std::array<double, kMaxHermiteOrder + 1> h{};
  HermiteEvaluator().fill(root * u,
                          std::span(h.data(), static_cast<std::size_t>(2 * last_eta)));
  const auto& c = series_weights();
  return accumulate(policy, 1, extent, [&](int eta) {
    const double factor = 4.0 * eta * std::pow(a, eta + 0.5) * h[2 * eta - 1];
    return sign * c[eta] * side.odd_derivative(2 * eta + 1) * factor;
  });
}

}  // namespace

LiouvillianityResult liouvillianity_quantifier(const GaussianEnsemble& w,
                                               const SeparableHamiltonian& h,
                                               double x, double k,
                                               const TruncationPolicy& policy) {
  require_finite_point(x, k);
  if (liouvillianity_masked(w, x, k)) return {true, 0.0, {}, {}};
  const auto xs = velocity_divergence_series(kinetic_side(h, k), w.a(), x, 1.0,
                                             policy);
  const auto ks = velocity_divergence_series(potential_side(h, x), w.b(), k,
                                             -1.0, policy);
  return {false, xs.value + ks.value, xs.diagnostics, ks.diagnostics};
}

}  // namespace wflow
