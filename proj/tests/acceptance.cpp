// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wflow/camouflage.hpp"
#include "wflow/commands.hpp"
#include "wflow/spectral.hpp"
#include "wflow/wigner_flow.hpp"

using namespace wflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

double gaussian(double a, double b, double x, double k) {
  return std::sqrt(a * b) / kPi * std::exp(-a * x * x - b * k * k);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const double kZetas[] = {-0.5, 0.0, 0.5};
const double kGammas[] = {0.5, 1.0, 2.0};

// 1. Stationarity of the camouflage flow by three paths.
Outcome stationarity() {
  const auto start = std::chrono::steady_clock::now();
  const PhaseSpaceGrid grid = PhaseSpaceGrid::symmetric(6, 6, 256, 256);
  double worst = 0.0;
  bool ok = true;
  for (double zeta : kZetas) {
    for (double gamma : kGammas) {
      const StationarityCertificate c =
          stationarity_certificate(simplified_parameters(zeta, gamma), grid, TruncationPolicy{30, 1e-14, 1e-300});
      worst = std::max({worst, c.closed_form.max_abs, c.generating.max_abs, c.series.max_abs});
      ok = ok && c.closed_form.max_abs <= 1e-10 && c.generating.max_abs <= 1e-10 && c.series.max_abs <= 1e-10 &&
           c.series_nonconverged == 0;
    }
  }
  const double t = seconds_since(start);
  return {ok && t <= 60.0, "max|divJ| " + fmt("%.3e", worst) + " (<= 1e-10), runtime " + fmt("%.2f", t) + " s (<= 60 s)"};
}

// 2. The perturbed amplitude reproduces the analytic residual bracket.
Outcome necessity() {
  const PhaseSpaceGrid grid = PhaseSpaceGrid::symmetric(6, 6, 256, 256);
  const CamouflageParams p = simplified_parameters(0.0, 1.0);
  const StationarityCertificate c =
      stationarity_certificate(p, grid, {}, kDefaultCertificateTolerance, {std::nullopt, p.lambda2 + 0.1});
  const double a = std::exp(2 * p.zeta), b = 1 / a;
  double want = 0.0;
  for (int i = 0; i < grid.x.n; ++i) {
    for (int j = 0; j < grid.k.n; ++j) {
      const double x = grid.x.at(i), k = grid.k.at(j);
      want = std::max(want, 2 * std::abs(std::sinh(p.mu1 * k) * std::sin(p.nu2 * x)) * 0.1 *
                                std::exp(-p.nu2 * p.mu1 / 4) * gaussian(a, b, x, k));
    }
  }
  double worst = 0.0;
  for (double got : {c.closed_form.max_abs, c.generating.max_abs, c.series.max_abs}) {
    worst = std::max(worst, std::abs(got - want) / want);
  }
  return {worst <= 1e-8, "analytic max " + fmt("%.12e", want) + ", worst relative deviation " + fmt("%.3e", worst) +
                             " (<= 1e-8)"};
}

// 3. The squeezed vacuum is annihilated by the camouflage Hamiltonian.
Outcome zero_mode() {
  const auto start = std::chrono::steady_clock::now();
  const SpectralGrid grid{-12.0, 12.0, 2048};
  double worst = 0.0;
  double weakest_perturbed = INFINITY;
  for (double zeta : kZetas) {
    for (double gamma : kGammas) {
      const CamouflageParams p = simplified_parameters(zeta, gamma);
      worst = std::max(worst, zero_mode_residual(p, grid).residual);
      weakest_perturbed =
          std::min(weakest_perturbed, zero_mode_residual(p, grid, {std::nullopt, p.lambda2 + 0.1}).residual);
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-8 && weakest_perturbed > 1e-3 && t <= 10.0,
          "max residual " + fmt("%.3e", worst) + " (<= 1e-8), min perturbed " + fmt("%.3e", weakest_perturbed) +
              " (> 1e-3), runtime " + fmt("%.2f", t) + " s (<= 10 s)"};
}

// 4. eta = 0 is the Liouville flow; quadratic Hamiltonians stop there.
Outcome classical_limit() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-3, 3), amp(-2, 2), freq(0.3, 1.6), expo(0.4, 2.5);
  const SeparableHamiltonian h{{Term::cosh(amp(gen), freq(gen)), Term::cos(amp(gen), freq(gen)), Term::monomial(0.5, 2),
                                Term::monomial(amp(gen), 5)},
                               {Term::cos(amp(gen), freq(gen)), Term::cosh(amp(gen), freq(gen)), Term::monomial(0.3, 4)}};
  const GaussianEnsemble w = GaussianEnsemble::general(expo(gen), expo(gen));
  // dK/dk and dV/dx written out term by term.
  const auto dK = [&](double k) {
    double s = 0;
    for (const Term& t : h.kinetic) {
      const double A = t.amplitude(), f = t.frequency();
      switch (t.kind()) {
        case TermKind::Cosh: s += A * f * std::sinh(f * k); break;
        case TermKind::Cos: s += -A * f * std::sin(f * k); break;
        case TermKind::Monomial: s += t.power() ? A * t.power() * std::pow(k, t.power() - 1) : 0.0; break;
      }
    }
    return s;
  };
  const auto dV = [&](double x) {
    double s = 0;
    for (const Term& t : h.potential) {
      const double A = t.amplitude(), f = t.frequency();
      switch (t.kind()) {
        case TermKind::Cosh: s += A * f * std::sinh(f * x); break;
        case TermKind::Cos: s += -A * f * std::sin(f * x); break;
        case TermKind::Monomial: s += t.power() ? A * t.power() * std::pow(x, t.power() - 1) : 0.0; break;
      }
    }
    return s;
  };
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen), k = u(gen);
    const double W = gaussian(w.a(), w.b(), x, k);
    const double jx = dK(k) * W, jk = -dV(x) * W;
    const double gx = current_x_series(w, h, x, k, TruncationPolicy::classical()).value;
    const double gk = current_k_series(w, h, x, k, TruncationPolicy::classical()).value;
    worst = std::max({worst, std::abs(gx - jx) / std::abs(jx), std::abs(gk - jk) / std::abs(jk)});
  }

  bool exact = true;
  const SeparableHamiltonian quad{{Term::monomial(0.7, 2)}, {Term::monomial(1.3, 2), Term::monomial(-0.4, 1)}};
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen), k = u(gen);
    const SeriesResult jx = current_x_series(w, quad, x, k);
    const SeriesResult jk = current_k_series(w, quad, x, k);
    const ClassicalCurrents c = classical_currents(w, quad, x, k);
    exact = exact && jx.value == c.x && jk.value == c.k && jx.diagnostics.terms_used == 1 &&
            jk.diagnostics.terms_used == 1;
  }
  return {worst <= 1e-15 && exact, "max relative deviation " + fmt("%.3e", worst) +
                                       " (<= 1e-15); quadratic series exact with one term: " + (exact ? "yes" : "no")};
}

// 5. Truncated series against the resummed closed forms.
Outcome series_closed_form() {
  const double freqs[] = {0.5, 1.0, std::exp(0.6), std::exp(-0.6)};
  const GaussianEnsemble ensembles[] = {GaussianEnsemble::alpha_form(1.0), GaussianEnsemble::alpha_form(0.8),
                                        GaussianEnsemble::squeezed(0.5), GaussianEnsemble::squeezed(-0.5)};
  double worst = 0.0;
  bool converged = true;
  for (const GaussianEnsemble& w : ensembles) {
    for (double f : freqs) {
      for (const Term& t : {Term::cosh(1.0, f), Term::cos(1.0, f)}) {
        const SeparableHamiltonian kin{{t}, {}}, pot{{}, {t}};
        for (int i = 0; i < 17; ++i) {
          for (int j = 0; j < 17; ++j) {
            const double x = -4 + 0.5 * i, k = -4 + 0.5 * j;
            const SeriesResult sx = div_jx_series(w, kin, x, k, TruncationPolicy{30, 1e-14, 1e-300});
            const SeriesResult sk = div_jk_series(w, pot, x, k, TruncationPolicy{30, 1e-14, 1e-300});
            const double cx = div_j_closed_form(w, kin, x, k);
            const double ck = div_j_closed_form(w, pot, x, k);
            converged = converged && sx.diagnostics.converged && sk.diagnostics.converged;
            worst = std::max({worst, std::abs(sx.value - cx) / (1 + std::abs(cx)),
                              std::abs(sk.value - ck) / (1 + std::abs(ck))});
          }
        }
      }
    }
  }
  return {worst <= 1e-10 && converged, "max |series - closed|/(1+|closed|) " + fmt("%.3e", worst) + " (<= 1e-10)"};
}

// Reads the exported x, k, Jx, Jk, divJ columns.
struct FieldTable {
  int nx = 0, nk = 0;
  std::vector<double> x, k, jx, jk, div;
};

FieldTable read_fields(const std::filesystem::path& csv, int nx, int nk) {
  FieldTable t;
  t.nx = nx;
  t.nk = nk;
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    t.x.push_back(v[0]);
    t.k.push_back(v[1]);
    t.jx.push_back(v[2]);
    t.jk.push_back(v[3]);
    t.div.push_back(v[4]);
  }
  return t;
}

// Max |FD divergence - divJ| over interior nodes in [-3,3]^2.
double continuity_error(const FieldTable& t) {
  const auto at = [&](const std::vector<double>& f, int i, int j) { return f[static_cast<std::size_t>(i * t.nk + j)]; };
  const double hx = at(t.x, 1, 0) - at(t.x, 0, 0);
  const double hk = at(t.k, 0, 1) - at(t.k, 0, 0);
  double err = 0.0;
  for (int i = 1; i + 1 < t.nx; ++i) {
    for (int j = 1; j + 1 < t.nk; ++j) {
      if (std::abs(at(t.x, i, j)) > 3 + 1e-12 || std::abs(at(t.k, i, j)) > 3 + 1e-12) continue;
      const double fd = (at(t.jx, i + 1, j) - at(t.jx, i - 1, j)) / (2 * hx) +
                        (at(t.jk, i, j + 1) - at(t.jk, i, j - 1)) / (2 * hk);
      err = std::max(err, std::abs(fd - at(t.div, i, j)));
    }
  }
  return err;
}

// 6. Continuity: exported currents differentiate to the exported divergence.
Outcome continuity() {
  const std::filesystem::path root = std::filesystem::current_path() / "acceptance_out";
  const std::string doc =
      "[hamiltonian]\n"
      "kinetic = [\"cosh 0.4 1.1\", \"cos 1 0.8\", \"monomial 0.5 2\"]\n"
      "potential = [\"cos -1.2 1.3\", \"cosh -0.3 0.9\"]\n"
      "[ensemble]\nform = \"zeta\"\nzeta = 0.3\n";
  std::vector<double> errors;
  for (int n : {65, 129, 257}) {
    ConfigOverrides o;
    o.grid = std::to_string(n) + "," + std::to_string(n) + ",4,4";
    o.output_dir = root / ("continuity_" + std::to_string(n));
    const CommandResult r = cmd_flow_field(parse_config(doc, o));
    if (r.exit_code != kExitOk) return {false, "flow-field export failed"};
    errors.push_back(continuity_error(read_fields(*o.output_dir / "flow_field.csv", n, n)));
  }
  const double r1 = errors[0] / errors[1], r2 = errors[1] / errors[2];
  return {r1 >= 3.5 && r2 >= 3.5, "errors " + fmt("%.3e", errors[0]) + ", " + fmt("%.3e", errors[1]) + ", " +
                                      fmt("%.3e", errors[2]) + "; ratios " + fmt("%.3f", r1) + ", " + fmt("%.3f", r2) +
                                      " (>= 3.5)"};
}

// 7. Weyl transform of psi_zeta against the analytic gaussian.
Outcome wigner_fidelity() {
  const SpectralGrid grid{-16.0, 16.0, 2048};
  double field_err = 0.0, marginal_err = 0.0, imag = 0.0;
  for (double zeta : {-0.8, 0.0, 0.8}) {
    const WignerTransform t = wigner_transform(squeezed_vacuum_wavefunction(zeta, grid), INFINITY);
    const double a = std::exp(2 * zeta), b = 1 / a;
    const PhaseSpaceGrid& g = t.field.grid();
    for (int i = 0; i < g.x.n; ++i) {
      double sx = 0.0;
      for (int j = 0; j < g.k.n; ++j) {
        field_err = std::max(field_err, std::abs(t.field.value(i, j) - gaussian(a, b, g.x.at(i), g.k.at(j))));
        sx += t.field.value(i, j) * g.k.step();
      }
      const double x = g.x.at(i);
      marginal_err = std::max(marginal_err, std::abs(sx - std::sqrt(a / kPi) * std::exp(-a * x * x)));
    }
    for (int j = 0; j < g.k.n; ++j) {
      double sk = 0.0;
      for (int i = 0; i < g.x.n; ++i) sk += t.field.value(i, j) * g.x.step();
      const double k = g.k.at(j);
      marginal_err = std::max(marginal_err, std::abs(sk - std::sqrt(b / kPi) * std::exp(-b * k * k)));
    }
    imag = std::max(imag, t.max_imag_residue);
  }
  return {field_err <= 1e-8 && marginal_err <= 1e-8, "max |W - G_zeta| " + fmt("%.3e", field_err) +
                                                         ", max marginal error " + fmt("%.3e", marginal_err) +
                                                         " (<= 1e-8), imaginary residue " + fmt("%.1e", imag)};
}

// 8. Direct Liouvillianity series against the quotient-rule assembly.
Outcome liouvillianity() {
  const SeparableHamiltonian h{{Term::cosh(0.6, 1.2), Term::cos(1.0, 0.7), Term::monomial(0.5, 2)},
                               {Term::cos(-0.9, 1.4), Term::cosh(-0.2, 1.0), Term::monomial(0.1, 4)}};
  const GaussianEnsemble w = GaussianEnsemble::squeezed(0.3);
  const PhaseSpaceGrid grid = PhaseSpaceGrid::symmetric(8, 8, 81, 81);
  double worst = 0.0;
  std::size_t unmasked = 0;
  for (int i = 0; i < grid.x.n; ++i) {
    for (int j = 0; j < grid.k.n; ++j) {
      const double x = grid.x.at(i), k = grid.k.at(j);
      const LiouvillianityResult r = liouvillianity_quantifier(w, h, x, k);
      if (r.masked) continue;
      ++unmasked;
      const double W = gaussian(w.a(), w.b(), x, k);
      const double jx = current_x_series(w, h, x, k).value;
      const double jk = current_k_series(w, h, x, k).value;
      const double div = stationarity_quantifier(w, h, x, k).value;
      const double gx = -2 * w.a() * x * W, gk = -2 * w.b() * k * W;
      const double want = (W * div - jx * gx - jk * gk) / (W * W);
      const double scale = (std::abs(W * div) + std::abs(jx * gx) + std::abs(jk * gk)) / (W * W);
      if (scale > 0) worst = std::max(worst, std::abs(r.value - want) / scale);
    }
  }
  double quadratic = 0.0;
  const SeparableHamiltonian harmonic = SeparableHamiltonian::harmonic(1.3, 0.6);
  for (int i = 0; i < grid.x.n; ++i) {
    for (int j = 0; j < grid.k.n; ++j) {
      const LiouvillianityResult r = liouvillianity_quantifier(w, harmonic, grid.x.at(i), grid.k.at(j));
      if (!r.masked) quadratic = std::max(quadratic, std::abs(r.value));
    }
  }
  return {worst <= 1e-9 && quadratic == 0.0, "max relative deviation " + fmt("%.3e", worst) + " over " +
                                                 std::to_string(unmasked) + " unmasked points (<= 1e-9), quadratic max " +
                                                 fmt("%.1e", quadratic) + " (== 0)"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 camouflage stationarity, three paths", stationarity},
      {"2 necessity of the amplitude constraint", necessity},
      {"3 zero mode of the camouflage Hamiltonian", zero_mode},
      {"4 classical limit", classical_limit},
      {"5 series vs closed form", series_closed_form},
      {"6 continuity consistency", continuity},
      {"7 Wigner transform fidelity", wigner_fidelity},
      {"8 Liouvillianity identity", liouvillianity},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
