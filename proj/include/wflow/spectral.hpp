#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wflow/camouflage.hpp"
#include "wflow/grid.hpp"
#include "wflow/hamiltonian.hpp"

namespace wflow {

using Complex = std::complex<double>;

// Periodic position sampling for spectral work: x_j = x_min + j L / n,
// j = 0 .. n-1, with L = x_max - x_min.
struct SpectralGrid {
  double x_min = -12.0;
  double x_max = 12.0;
  int n = 2048;

  // [-12, 12] with 2048 points.
  static SpectralGrid default_grid() { return {}; }
  static SpectralGrid from_position_axis(const PhaseSpaceGrid& grid);

  double length() const { return x_max - x_min; }
  double step() const { return length() / n; }
  double position(int j) const { return x_min + j * step(); }
  // Wavenumber of FFT bin m (bins above n/2 are negative).
  double wavenumber(int m) const;

  void validate() const;
};

// Complex samples normalized to unit discrete L2 norm.
class Wavefunction {
 public:
  // Probability density at either edge must stay below this fraction of the
  // peak density.
  static constexpr double kTailFraction = 1e-12;

  // Normalizes; throws GridError when the tail is not contained.
  static Wavefunction from_samples(const SpectralGrid& grid,
                                   std::vector<Complex> samples);

  const SpectralGrid& grid() const { return grid_; }
  const std::vector<Complex>& samples() const { return samples_; }
  // Discrete norm sum |psi_j|^2 dx, before normalization.
  double input_norm() const { return input_norm_; }
  double edge_fraction() const { return edge_fraction_; }

 private:
  Wavefunction(SpectralGrid grid, std::vector<Complex> samples, double norm,
               double edge);

  SpectralGrid grid_;
  std::vector<Complex> samples_;
  double input_norm_;
  double edge_fraction_;
};

// psi(x) = (e^{2zeta}/pi)^{1/4} exp(-e^{2zeta} x^2 / 2), whose Wigner function
// is the squeezed gaussian G_zeta.
Wavefunction squeezed_vacuum_wavefunction(double zeta, const SpectralGrid& grid);

double l2_norm(std::span<const Complex> samples, double step);

// phi(k) = (2 pi)^{-1/2} sum_j dx e^{-i k x_j} psi_j on the FFT wavenumbers.
std::vector<Complex> momentum_amplitudes(const Wavefunction& psi);

struct WignerTransform {
  // x axis: the wavefunction positions; k axis: k_l = l pi / L,
  // l = -n/2 .. n/2 - 1.
  ScalarField field;
  double max_imag_residue = 0.0;
  double x_marginal_error = 0.0;  // max |int W dk - |psi|^2|
  double k_marginal_error = 0.0;  // max |int W dx - |phi|^2|
  std::vector<double> position_density;
  std::vector<double> momentum_density;  // |phi(k_l)|^2 on the field's k axis
};

// W(x,k) = (1/pi) int ds e^{2iks} psi(x-s) psi*(x+s), by FFT along s.
// Throws ResolutionError when a marginal misses its density by more than
// marginal_tolerance times the density peak (aliasing).
WignerTransform wigner_transform(const Wavefunction& psi,
                                 double marginal_tolerance = 1e-8);

struct OperatorApplication {
  std::vector<Complex> samples;
  double norm = 0.0;
  // (eps * max|psi_hat| + spectral level at the band cut)
  //   * ||K on the kept band|| / ||output||.
  double noise_estimate = 0.0;
  // Largest |k| kept by the spectral band limit.
  double band_limit = 0.0;
  bool band_hit_grid_edge = false;
  bool precision_warning = false;
};

// Relative noise level above which apply_* raise precision_warning.
inline constexpr double kPrecisionWarningLevel = 1e-8;
// Modes beyond the first one (walking out from the spectral peak) that drops
// below this fraction of the peak are treated as round-off and discarded.
inline constexpr double kSpectralFloor = 1e-15;
// Below this fraction of the peak, growth of |psi_hat| * |K| marks the onset
// of amplified noise and ends the band.
inline constexpr double kNoiseOnset = 1e-10;

// K(p) psi with p = -i d/dx, applied in momentum space.
OperatorApplication apply_kinetic(const SeparableHamiltonian& h,
                                  const Wavefunction& psi);
// V(x) psi, pointwise.
OperatorApplication apply_potential(const SeparableHamiltonian& h,
                                    const Wavefunction& psi);
// (K(p) + V(x)) psi.
OperatorApplication apply_operator_function(const SeparableHamiltonian& h,
                                            const Wavefunction& psi);

struct ZeroModeReport {
  double residual = 0.0;  // ||H psi|| / (||K psi|| + ||V psi||)
  double kinetic_norm = 0.0;
  double potential_norm = 0.0;
  double total_norm = 0.0;
  double noise_estimate = 0.0;
  double band_limit = 0.0;
  bool precision_warning = false;
};

ZeroModeReport zero_mode_residual(const CamouflageParams& params,
                                  const SpectralGrid& grid = {},
                                  const LambdaOverride& override_ = {});

}  // namespace wflow
