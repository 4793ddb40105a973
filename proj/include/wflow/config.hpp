#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "camouflage.hpp"
#include "gaussian.hpp"
#include "grid.hpp"
#include "hamiltonian.hpp"
#include "spectral.hpp"
#include "wigner_flow.hpp"

namespace wflow {

// Camouflage block: either the simplified one-parameter family
// (zeta, gamma) or the general family (zeta, gamma1, gamma2, nu1, nu2).
struct CamouflageSpec {
  bool simplified = true;
  double zeta = 0.0;
  double gamma = 1.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double nu1 = 1.0;
  double nu2 = 1.0;
  std::optional<double> lambda1_override;
  std::optional<double> lambda2_override;
  double lambda1_offset = 0.0;
  double lambda2_offset = 0.0;

  bool perturbed() const {
    return lambda1_override || lambda2_override || lambda1_offset != 0.0 ||
           lambda2_offset != 0.0;
  }
};

struct EnsembleSpec {
  enum class Form { Alpha, Zeta, General };
  bool given = false;
  Form form = Form::Alpha;
  double alpha = 1.0;
  double zeta = 0.0;
  double a = 1.0;
  double b = 1.0;
};

struct RunConfig {
  // Exactly one of these is the Hamiltonian source.
  std::optional<SeparableHamiltonian> hamiltonian;
  std::optional<CamouflageSpec> camouflage;
  bool scan = false;

  EnsembleSpec ensemble;
  PhaseSpaceGrid grid = PhaseSpaceGrid::default_phase_space();
  SqueezeBound squeeze;
  SpectralGrid spectral = SpectralGrid::default_grid();
  TruncationPolicy truncation;
  double certificate_tolerance = kDefaultCertificateTolerance;
  double zero_mode_tolerance = 1e-8;
  std::vector<double> scan_zeta;
  std::vector<double> scan_gamma;
  std::filesystem::path output_dir = ".";
  std::string format = "csv";
};

// Command-line values that take precedence over the document.
struct ConfigOverrides {
  std::optional<std::string> grid;  // "nx,nk,xmax,kmax"
  std::optional<int> eta_max;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> format;
};

// Parses the key-value document:
//
//   # comment
//   [section]            key = value lines follow
//   section { k = v, k = v }
//   section = { k = v }
//
// Values are numbers, true/false, "strings" or [arrays]. Throws ConfigError
// naming unknown keys or the violated bound.
RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const ConfigOverrides& overrides = {});

// "cosh 1.5 0.5", "cos -1 2", "monomial 0.5 2" -> Term.
Term parse_term(const std::string& text);

// Resolved camouflage parameters with overrides applied.
CamouflageParams resolve_camouflage(const RunConfig& config);
// Unperturbed parameters plus the amplitude override.
CamouflageParams solved_camouflage(const RunConfig& config);
LambdaOverride camouflage_override(const RunConfig& config);

SeparableHamiltonian resolve_hamiltonian(const RunConfig& config);
GaussianEnsemble resolve_ensemble(const RunConfig& config);

}  // namespace wflow
