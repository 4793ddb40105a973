#include "wflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "wflow/errors.hpp"

namespace wflow {
namespace {

// In-place 1-D complex FFT. FFTW planning is not thread-safe, so plan
// creation and destruction are serialized.
class Fft {
 public:
  enum class Direction { Forward, Backward };

  Fft(int n, Direction dir) : n_(n), buffer_(fftw_alloc_complex(static_cast<std::size_t>(n))) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(n, buffer_, buffer_,
                             dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                             FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::span<Complex> data() {
    return {reinterpret_cast<Complex*>(buffer_), static_cast<std::size_t>(n_)};
  }
  void execute() { fftw_execute(plan_); }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  fftw_complex* buffer_;
  fftw_plan plan_;
};

constexpr int kPadding = 2;

int wrap(int s, int n) { return ((s % n) + n) % n; }

// Upper bound of |K(k)| with every oscillating factor replaced by 1.
double kinetic_envelope(const SeparableHamiltonian& h, double k) {
  double e = 0.0;
  for (const auto& t : h.kinetic) {
    const double amp = std::abs(t.amplitude());
    switch (t.kind()) {
      case TermKind::Cosh: e += amp * std::cosh(t.frequency() * k); break;
      case TermKind::Cos: e += amp; break;
      case TermKind::Monomial: e += amp * std::pow(std::abs(k), t.power()); break;
    }
  }
  return e;
}

}  // namespace

SpectralGrid SpectralGrid::from_position_axis(const PhaseSpaceGrid& grid) {
  SpectralGrid g{grid.x.min, grid.x.max, grid.x.n};
  g.validate();
  return g;
}

double SpectralGrid::wavenumber(int m) const {
  const int signed_bin = m < n / 2 ? m : m - n;
  return 2.0 * std::numbers::pi * signed_bin / length();
}

void SpectralGrid::validate() const {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw InputError("spectral grid needs finite x_max > x_min");
  }
  if (n < PhaseSpaceGrid::kMinPoints || n % 2 != 0) {
    throw InputError("spectral grid needs an even point count >= " +
                     std::to_string(PhaseSpaceGrid::kMinPoints) + ", got " +
                     std::to_string(n));
  }
}

double l2_norm(std::span<const Complex> samples, double step) {
  double s = 0.0;
  for (const auto& v : samples) s += std::norm(v);
  return std::sqrt(s * step);
}

Wavefunction::Wavefunction(SpectralGrid grid, std::vector<Complex> samples,
                           double norm, double edge)
    : grid_(grid), samples_(std::move(samples)), input_norm_(norm),
      edge_fraction_(edge) {}

Wavefunction Wavefunction::from_samples(const SpectralGrid& grid,
                                        std::vector<Complex> samples) {
  grid.validate();
  if (samples.size() != static_cast<std::size_t>(grid.n)) {
    throw InputError("wavefunction sample count does not match the grid");
  }
  double peak = 0.0;
  for (const auto& v : samples) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InputError("wavefunction samples must be finite");
    }
    peak = std::max(peak, std::norm(v));
  }
  if (peak == 0.0) throw InputError("wavefunction is identically zero");
  const double edge =
      std::max(std::norm(samples.front()), std::norm(samples.back())) / peak;
  if (edge >= kTailFraction) {
    std::ostringstream msg;
    msg << "grid too small: edge density is " << edge
        << " of the peak, tail containment needs < " << kTailFraction
        << " on [" << grid.x_min << ", " << grid.x_max << "]";
    throw GridError(msg.str());
  }
  const double norm = l2_norm(samples, grid.step());
  for (auto& v : samples) v /= norm;
  return Wavefunction(grid, std::move(samples), norm, edge);
}

Wavefunction squeezed_vacuum_wavefunction(double zeta,
                                          const SpectralGrid& grid) {
  if (!std::isfinite(zeta)) throw InputError("zeta must be finite");
  grid.validate();
  const double a = std::exp(2.0 * zeta);
  const double amplitude = std::pow(a / std::numbers::pi, 0.25);
  std::vector<Complex> samples(static_cast<std::size_t>(grid.n));
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.position(j);
    samples[static_cast<std::size_t>(j)] = amplitude * std::exp(-0.5 * a * x * x);
  }
  return Wavefunction::from_samples(grid, std::move(samples));
}

std::vector<Complex> momentum_amplitudes(const Wavefunction& psi) {
  const auto& g = psi.grid();
  Fft fft(g.n, Fft::Direction::Forward);
  auto buf = fft.data();
  std::copy(psi.samples().begin(), psi.samples().end(), buf.begin());
  fft.execute();
  std::vector<Complex> phi(buf.begin(), buf.end());
  const double scale = g.step() / std::sqrt(2.0 * std::numbers::pi);
  for (int m = 0; m < g.n; ++m) {
    const double k = g.wavenumber(m);
    phi[static_cast<std::size_t>(m)] *= scale * std::polar(1.0, -k * g.x_min);
  }
  return phi;
}

WignerTransform wigner_transform(const Wavefunction& psi,
                                 double marginal_tolerance) {
  const auto& g = psi.grid();
  const int n = g.n;
  const double dx = g.step();
  const double dk = std::numbers::pi / g.length();
  const auto& s = psi.samples();

  const PhaseSpaceGrid field_grid{
      {g.x_min, g.x_min + (n - 1) * dx, n},
      {-dk * (n / 2), -dk * (n / 2) + (n - 1) * dk, n}};
  WignerTransform out{ScalarField(field_grid), 0.0, 0.0, 0.0, {}, {}};

  Fft fft(n, Fft::Direction::Backward);
  auto buf = fft.data();
  for (int j = 0; j < n; ++j) {
    std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
    const int reach = std::min(j, n - 1 - j);
    for (int m = -reach; m <= reach; ++m) {
      buf[static_cast<std::size_t>(wrap(m, n))] =
          s[static_cast<std::size_t>(j - m)] * std::conj(s[static_cast<std::size_t>(j + m)]);
    }
    // sum_m e^{+2 pi i l m / n} f_m  ==  sum_m e^{2 i k_l s_m} f_m
    fft.execute();
    for (int l = -n / 2; l < n / 2; ++l) {
      const Complex v = buf[static_cast<std::size_t>(wrap(l, n))] * (dx / std::numbers::pi);
      out.max_imag_residue = std::max(out.max_imag_residue, std::abs(v.imag()));
      out.field.set(j, l + n / 2, v.real());
    }
  }

  // Position marginal.
  out.position_density.resize(static_cast<std::size_t>(n));
  double density_peak = 0.0;
  for (int j = 0; j < n; ++j) {
    double integral = 0.0;
    for (int l = 0; l < n; ++l) integral += out.field.value(j, l) * dk;
    const double rho = std::norm(s[static_cast<std::size_t>(j)]);
    out.position_density[static_cast<std::size_t>(j)] = rho;
    density_peak = std::max(density_peak, rho);
    out.x_marginal_error = std::max(out.x_marginal_error, std::abs(integral - rho));
  }

  // Momentum marginal against |phi(k_l)|^2; k_l sits on a half-spaced
  // wavenumber grid, reached by zero padding to 2n.
  Fft padded(2 * n, Fft::Direction::Forward);
  auto pbuf = padded.data();
  std::fill(pbuf.begin(), pbuf.end(), Complex(0.0, 0.0));
  std::copy(s.begin(), s.end(), pbuf.begin());
  padded.execute();
  out.momentum_density.resize(static_cast<std::size_t>(n));
  double momentum_peak = 0.0;
  for (int l = -n / 2; l < n / 2; ++l) {
    const double phi2 = std::norm(pbuf[static_cast<std::size_t>(wrap(l, 2 * n))]) *
                        dx * dx / (2.0 * std::numbers::pi);
    double integral = 0.0;
    for (int j = 0; j < n; ++j) integral += out.field.value(j, l + n / 2) * dx;
    out.momentum_density[static_cast<std::size_t>(l + n / 2)] = phi2;
    momentum_peak = std::max(momentum_peak, phi2);
    out.k_marginal_error = std::max(out.k_marginal_error, std::abs(integral - phi2));
  }

  if (out.x_marginal_error > marginal_tolerance * density_peak ||
      out.k_marginal_error > marginal_tolerance * momentum_peak) {
    std::ostringstream msg;
    msg << "Wigner transform marginals disagree (position "
        << out.x_marginal_error << ", momentum " << out.k_marginal_error
        << "): grid resolution too coarse, aliasing detected";
    throw ResolutionError(msg.str());
  }
  return out;
}

OperatorApplication apply_kinetic(const SeparableHamiltonian& h,
                                  const Wavefunction& psi) {
  const auto& g = psi.grid();
  OperatorApplication out;
  out.samples.assign(static_cast<std::size_t>(g.n), Complex(0.0, 0.0));
  if (h.kinetic.empty()) return out;

  // Zero-padded periodic box of twice the length, so shifts generated by
  // K(p) do not wrap the state around the seam.
  const int n = kPadding * g.n;
  const SpectralGrid box{g.x_min, g.x_min + kPadding * g.length(), n};
  Fft forward(n, Fft::Direction::Forward);
  auto buf = forward.data();
  std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
  std::copy(psi.samples().begin(), psi.samples().end(), buf.begin());
  forward.execute();

  int peak_bin = 0;
  double peak = 0.0;
  for (int m = 0; m < n; ++m) {
    const double mag = std::abs(buf[static_cast<std::size_t>(m)]);
    if (mag > peak) {
      peak = mag;
      peak_bin = m;
    }
  }
  // Band limit: walk outward from the peak in signed-bin order. Stop at pure
  // round-off, or once the spectrum is small and the amplified spectrum
  // |psi_hat| * envelope(K) starts growing again (noise dominates).
  const auto magnitude = [&](int s) { return std::abs(buf[static_cast<std::size_t>(wrap(s, n))]); };
  const auto amplified = [&](int s) {
    return magnitude(s) * kinetic_envelope(h, box.wavenumber(wrap(s, n)));
  };
  const auto inside = [&](int s, int step) {
    const int next = s + step;
    if (magnitude(next) < kSpectralFloor * peak) return false;
    return !(magnitude(next) < kNoiseOnset * peak && amplified(next) > amplified(s));
  };
  const int peak_signed = peak_bin < n / 2 ? peak_bin : peak_bin - n;
  int hi = peak_signed;
  while (hi + 1 < n / 2 && inside(hi, +1)) ++hi;
  int lo = peak_signed;
  while (lo - 1 >= -n / 2 && inside(lo, -1)) --lo;
  out.band_hit_grid_edge = (hi == n / 2 - 1) || (lo == -n / 2);
  // Spectral level at which the band was cut; content below it is untrusted.
  const double cut_level = std::max(hi + 1 < n / 2 ? magnitude(hi + 1) : 0.0,
                                    lo - 1 >= -n / 2 ? magnitude(lo - 1) : 0.0);

  double kernel_energy = 0.0;
  double signal_energy = 0.0;
  for (int s = -n / 2; s < n / 2; ++s) {
    auto& v = buf[static_cast<std::size_t>(wrap(s, n))];
    if (s < lo || s > hi) {
      v = 0.0;
      continue;
    }
    const double k = box.wavenumber(wrap(s, n));
    const double kv = h.kinetic_value(k);
    v *= kv;
    kernel_energy += kv * kv;
    signal_energy += std::norm(v);
    out.band_limit = std::max(out.band_limit, std::abs(k));
  }
  const double noise_level =
      std::numeric_limits<double>::epsilon() * peak + cut_level;
  out.noise_estimate = signal_energy > 0.0
                           ? noise_level * std::sqrt(kernel_energy / signal_energy)
                           : 0.0;

  Fft backward(n, Fft::Direction::Backward);
  auto back = backward.data();
  std::copy(buf.begin(), buf.end(), back.begin());
  backward.execute();
  for (int j = 0; j < g.n; ++j) {
    out.samples[static_cast<std::size_t>(j)] = back[static_cast<std::size_t>(j)] / static_cast<double>(n);
  }
  out.norm = l2_norm(out.samples, g.step());
  out.precision_warning =
      out.noise_estimate > kPrecisionWarningLevel || out.band_hit_grid_edge;
  return out;
}

OperatorApplication apply_potential(const SeparableHamiltonian& h,
                                    const Wavefunction& psi) {
  const auto& g = psi.grid();
  OperatorApplication out;
  out.samples.resize(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j) {
    out.samples[static_cast<std::size_t>(j)] =
        h.potential_value(g.position(j)) * psi.samples()[static_cast<std::size_t>(j)];
  }
  out.norm = l2_norm(out.samples, g.step());
  return out;
}

OperatorApplication apply_operator_function(const SeparableHamiltonian& h,
                                            const Wavefunction& psi) {
  const OperatorApplication kin = apply_kinetic(h, psi);
  const OperatorApplication pot = apply_potential(h, psi);
  OperatorApplication out = kin;
  for (std::size_t j = 0; j < out.samples.size(); ++j) out.samples[j] += pot.samples[j];
  out.norm = l2_norm(out.samples, psi.grid().step());
  // Kinetic noise measured against the combined output.
  out.noise_estimate = out.norm > 0.0 ? kin.noise_estimate * kin.norm / out.norm
                                      : kin.noise_estimate;
  out.precision_warning = !h.kinetic.empty() &&
                          (out.noise_estimate > kPrecisionWarningLevel ||
                           out.band_hit_grid_edge);
  return out;
}

ZeroModeReport zero_mode_residual(const CamouflageParams& params,
                                  const SpectralGrid& grid,
                                  const LambdaOverride& override_) {
  const CamouflageParams p = with_override(params, override_);
  check_frequency_constraint(p);
  const SeparableHamiltonian h = build_hamiltonian(p);
  const Wavefunction psi = squeezed_vacuum_wavefunction(p.zeta, grid);
  const OperatorApplication kin = apply_kinetic(h, psi);
  const OperatorApplication pot = apply_potential(h, psi);
  std::vector<Complex> total(kin.samples.size());
  for (std::size_t j = 0; j < total.size(); ++j) total[j] = kin.samples[j] + pot.samples[j];
  ZeroModeReport r;
  r.kinetic_norm = kin.norm;
  r.potential_norm = pot.norm;
  r.total_norm = l2_norm(total, grid.step());
  const double scale = r.kinetic_norm + r.potential_norm;
  r.residual = scale > 0.0 ? r.total_norm / scale : 0.0;
  r.noise_estimate = scale > 0.0 ? kin.noise_estimate * kin.norm / scale : 0.0;
  r.band_limit = kin.band_limit;
  r.precision_warning = kin.precision_warning ||
                        r.noise_estimate > kPrecisionWarningLevel;
  return r;
}

}  // namespace wflow
