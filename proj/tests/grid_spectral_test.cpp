#include <atomic>
#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wflow/camouflage.hpp"
#include "wflow/errors.hpp"
#include "wflow/grid.hpp"
#include "wflow/spectral.hpp"
#include "wflow/wigner_flow.hpp"

using namespace wflow;
using oracle::pi;

TEST(PhaseSpaceGrid, Construction) {
  const PhaseSpaceGrid g = PhaseSpaceGrid::default_phase_space();
  EXPECT_EQ(g.x.n, 256);
  EXPECT_EQ(g.k.n, 256);
  EXPECT_EQ(g.x.min, -8.0);
  EXPECT_EQ(g.k.max, 8.0);
  EXPECT_DOUBLE_EQ(g.x.at(255), 8.0);
  EXPECT_EQ(g.index(2, 3), 2u * 256u + 3u);
  EXPECT_THROW(PhaseSpaceGrid::symmetric(4, 4, 8, 64), InputError);
  EXPECT_THROW(PhaseSpaceGrid::symmetric(-1, 4, 64, 64), InputError);
}

TEST(FieldSweep, ConstantAndMasked) {
  const PhaseSpaceGrid g = PhaseSpaceGrid::symmetric(2, 3, 17, 33);
  const ScalarField c = field_sweep([](double, double) { return 2.5; }, g);
  for (double v : c.values()) EXPECT_EQ(v, 2.5);
  EXPECT_EQ(c.values().size(), g.size());
  const ScalarField m = field_sweep(
      [](double x, double) -> std::optional<double> {
        if (x > 0) return std::nullopt;
        return x;
      },
      g);
  EXPECT_EQ(m.masked_count(), 8u * 33u);
  const FieldExtremum e = m.max_abs();
  EXPECT_TRUE(e.found);
  EXPECT_EQ(e.value, -2.0);
  EXPECT_EQ(e.x, -2.0);
}

TEST(FieldSweep, StationarityAndLiouvillianitySweeps) {
  const PhaseSpaceGrid g = PhaseSpaceGrid::symmetric(6, 6, 64, 64);
  const CamouflageParams p = simplified_parameters(0.3, 1.5);
  const SeparableHamiltonian h = build_hamiltonian(p);
  const GaussianEnsemble w = matched_ensemble(p);
  const ScalarField div =
      field_sweep([&](double x, double k) { return stationarity_quantifier(w, h, x, k).value; }, g);
  EXPECT_LE(div.max_abs().value, 1e-10);
  EXPECT_GE(div.max_abs().value, -1e-10);
  const GaussianEnsemble iso = GaussianEnsemble::alpha_form(0.8);
  const ScalarField lv = field_sweep(
      [&](double x, double k) -> std::optional<double> {
        const auto r = liouvillianity_quantifier(iso, SeparableHamiltonian::harmonic(), x, k);
        if (r.masked) return std::nullopt;
        return r.value;
      },
      g);
  for (int i = 0; i < g.x.n; ++i) {
    for (int j = 0; j < g.k.n; ++j) {
      if (!lv.masked(i, j)) {
        EXPECT_EQ(lv.value(i, j), 0.0);
      }
    }
  }
}

TEST(ParallelRows, VisitsEachRowOnceAndPropagatesErrors) {
  std::vector<std::atomic<int>> hits(101);
  parallel_rows(101, [&](int i) { hits[static_cast<std::size_t>(i)]++; }, 4);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_rows(
                   10, [](int i) {
                     if (i == 7) throw std::runtime_error("row 7");
                   },
                   3),
               std::runtime_error);
}

TEST(Wavefunction, SqueezedVacuum) {
  const SpectralGrid g = SpectralGrid::default_grid();
  const Wavefunction psi = squeezed_vacuum_wavefunction(0.0, g);
  EXPECT_NEAR(l2_norm(psi.samples(), g.step()), 1.0, 1e-12);
  EXPECT_NEAR(psi.input_norm(), 1.0, 1e-12);
  for (int j = 0; j < g.n; j += 97) {
    const double x = g.position(j);
    EXPECT_NEAR(psi.samples()[j].real(), std::pow(pi, -0.25) * std::exp(-x * x / 2), 1e-15);
  }
  const double zeta = 0.5;
  const Wavefunction sq = squeezed_vacuum_wavefunction(zeta, g);
  double m2 = 0.0;
  for (int j = 0; j < g.n; ++j) m2 += g.position(j) * g.position(j) * std::norm(sq.samples()[j]) * g.step();
  EXPECT_NEAR(m2, 1 / (2 * std::exp(1.0)), 1e-8);
}

TEST(Wavefunction, TailContainment) {
  EXPECT_THROW(squeezed_vacuum_wavefunction(-2.0, SpectralGrid::default_grid()), GridError);
  std::vector<Complex> flat(64, Complex(1.0, 0.0));
  EXPECT_THROW(Wavefunction::from_samples({-1, 1, 64}, flat), GridError);
}

TEST(Transforms, RoundTripThroughMomentumSpace) {
  const SpectralGrid g{-10.0, 10.0, 256};
  std::vector<Complex> raw(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j) {
    const double x = g.position(j);
    raw[j] = std::exp(-(x - 0.7) * (x - 0.7)) * std::polar(1.0, 1.3 * x);
  }
  const Wavefunction psi = Wavefunction::from_samples(g, raw);
  const std::vector<Complex> phi = momentum_amplitudes(psi);
  const double dk = 2 * pi / g.length();
  double err = 0.0;
  for (int j = 0; j < g.n; ++j) {
    Complex back = 0.0;
    for (int m = 0; m < g.n; ++m) back += phi[m] * std::polar(1.0, g.wavenumber(m) * g.position(j));
    back *= dk / std::sqrt(2 * pi);
    err = std::max(err, std::abs(back - psi.samples()[j]));
  }
  EXPECT_LE(err, 1e-12);
}

TEST(Transforms, GroundStateMomentumAmplitudes) {
  const SpectralGrid g = SpectralGrid::default_grid();
  const std::vector<Complex> phi = momentum_amplitudes(squeezed_vacuum_wavefunction(0.0, g));
  for (int m = 0; m < g.n; m += 13) {
    const double k = g.wavenumber(m);
    EXPECT_NEAR(std::abs(phi[m] - std::pow(pi, -0.25) * std::exp(-k * k / 2)), 0.0, 1e-13);
  }
}

namespace {

void check_wigner(double zeta, const SpectralGrid& g) {
  const WignerTransform t = wigner_transform(squeezed_vacuum_wavefunction(zeta, g));
  const double a = std::exp(2 * zeta), b = 1 / a;
  const PhaseSpaceGrid& fg = t.field.grid();
  double err = 0.0;
  for (int i = 0; i < fg.x.n; ++i) {
    for (int j = 0; j < fg.k.n; ++j) {
      err = std::max(err, std::abs(t.field.value(i, j) - oracle::gaussian(a, b, fg.x.at(i), fg.k.at(j))));
    }
  }
  EXPECT_LE(err, 1e-8) << "zeta=" << zeta;
  EXPECT_LE(t.max_imag_residue, 1e-12);

  // Marginals by direct quadrature against the analytic densities.
  double ex = 0.0, ek = 0.0;
  for (int i = 0; i < fg.x.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < fg.k.n; ++j) s += t.field.value(i, j) * fg.k.step();
    const double x = fg.x.at(i);
    ex = std::max(ex, std::abs(s - std::sqrt(a / pi) * std::exp(-a * x * x)));
  }
  for (int j = 0; j < fg.k.n; ++j) {
    double s = 0.0;
    for (int i = 0; i < fg.x.n; ++i) s += t.field.value(i, j) * fg.x.step();
    const double k = fg.k.at(j);
    ek = std::max(ek, std::abs(s - std::sqrt(b / pi) * std::exp(-b * k * k)));
  }
  EXPECT_LE(ex, 1e-8) << "zeta=" << zeta;
  EXPECT_LE(ek, 1e-8) << "zeta=" << zeta;
  EXPECT_LE(t.x_marginal_error, 1e-8);
  EXPECT_LE(t.k_marginal_error, 1e-8);
}

}  // namespace

TEST(WignerTransform, GroundState) { check_wigner(0.0, {-12.0, 12.0, 512}); }

TEST(WignerTransform, SqueezedStates) {
  for (double zeta : {-0.8, 0.8}) check_wigner(zeta, {-16.0, 16.0, 1024});
}

TEST(WignerTransform, AliasingIsDetected) {
  // A narrow state on a coarse grid aliases in momentum.
  EXPECT_THROW(wigner_transform(squeezed_vacuum_wavefunction(1.5, {-12.0, 12.0, 64})), ResolutionError);
}

TEST(OperatorFunction, HarmonicGroundState) {
  const SpectralGrid g = SpectralGrid::default_grid();
  const Wavefunction psi = squeezed_vacuum_wavefunction(0.0, g);
  const OperatorApplication out = apply_operator_function(SeparableHamiltonian::harmonic(), psi);
  std::vector<Complex> diff(out.samples.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = out.samples[j] - 0.5 * psi.samples()[j];
  EXPECT_LE(l2_norm(diff, g.step()), 1e-10);
}

TEST(OperatorFunction, ImaginaryShiftIdentity) {
  const SpectralGrid g = SpectralGrid::default_grid();
  const Wavefunction psi = squeezed_vacuum_wavefunction(0.0, g);
  const OperatorApplication out = apply_kinetic({{Term::cosh(1.0, 1.0)}, {}}, psi);
  double err = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double x = g.position(j);
    // cosh(p) psi0 = [psi0(x - i) + psi0(x + i)] / 2
    const auto psi0 = [](Complex z) { return std::pow(pi, -0.25) * std::exp(-z * z / 2.0); };
    const Complex want = (psi0({x, -1.0}) + psi0({x, 1.0})) / 2.0;
    err = std::max(err, std::abs(out.samples[j] - want));
    err = std::max(err, std::abs(out.samples[j] - std::exp(0.5) * std::cos(x) * psi.samples()[j]));
  }
  EXPECT_LE(err, 1e-8);
  EXPECT_FALSE(out.precision_warning);
}

TEST(OperatorFunction, RealShiftIdentity) {
  const SpectralGrid g = SpectralGrid::default_grid();
  const Wavefunction psi = squeezed_vacuum_wavefunction(0.0, g);
  const OperatorApplication out = apply_kinetic({{Term::cos(1.0, 1.0)}, {}}, psi);
  const auto psi0 = [](double x) { return std::pow(pi, -0.25) * std::exp(-x * x / 2); };
  double err = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double x = g.position(j);
    const double avg = (psi0(x + 1) + psi0(x - 1)) / 2;
    err = std::max(err, std::abs(out.samples[j] - avg));
    err = std::max(err, std::abs(out.samples[j] - std::exp(-0.5) * std::cosh(x) * psi0(x)));
  }
  EXPECT_LE(err, 1e-8);
}

TEST(ZeroMode, ConstrainedAndPerturbed) {
  const CamouflageParams p = simplified_parameters(0.0, 1.0);
  const ZeroModeReport z = zero_mode_residual(p);
  EXPECT_LE(z.residual, 1e-8);
  EXPECT_FALSE(z.precision_warning);
  EXPECT_GT(z.kinetic_norm, 0.1);
  const ZeroModeReport off = zero_mode_residual(p, {}, {std::nullopt, p.lambda2 + 0.1});
  EXPECT_GE(off.residual, 1e-3);
  EXPECT_LE(zero_mode_residual(simplified_parameters(0.6, 2.0)).residual, 1e-7);
}

TEST(ZeroMode, PerturbationResidualMatchesCosContribution) {
  // H psi = 0.1 cos(x) psi, so ||H psi|| = 0.1 ||cos(x) psi0||.
  const CamouflageParams p = simplified_parameters(0.0, 1.0);
  const ZeroModeReport off = zero_mode_residual(p, {}, {std::nullopt, p.lambda2 + 0.1});
  const double cos_norm = std::sqrt((1 + std::exp(-1.0)) / 2);  // <cos^2 x> for psi0
  EXPECT_NEAR(off.residual * (off.kinetic_norm + off.potential_norm), 0.1 * cos_norm, 1e-10);
}

TEST(ZeroMode, ResolutionConvergence) {
  for (double zeta : {0.0, 0.6, 1.0}) {
    const CamouflageParams p = simplified_parameters(zeta, 1.0);
    // Doubling starts once the spacing resolves the state width e^{-|zeta|}.
    int start = 32;
    while (24.0 / start > std::exp(-std::abs(zeta))) start *= 2;
    double prev = zero_mode_residual(p, {-12.0, 12.0, start}).residual;
    for (int n = 2 * start; n <= 2048 && prev > 1e-8; n *= 2) {
      const double next = zero_mode_residual(p, {-12.0, 12.0, n}).residual;
      EXPECT_TRUE(next <= prev / 10 || next <= 1e-8) << "zeta=" << zeta << " n=" << n << " " << prev << " -> " << next;
      prev = next;
    }
    EXPECT_LE(prev, 1e-8) << "zeta=" << zeta;
  }
}
