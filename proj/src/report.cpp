#include "wflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wflow/errors.hpp"

namespace wflow {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_term(const Term& term) {
  const std::string kind = to_string(term.kind());
  const std::string param = term.kind() == TermKind::Monomial
                                ? std::to_string(term.power())
                                : format_double(term.frequency());
  return kind + " " + format_double(term.amplitude()) + " " + param;
}

namespace {

Json term_list(const std::vector<Term>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) out.push_back(format_term(t));
  return out;
}

const char* ensemble_form_name(const RunConfig& c) {
  if (!c.ensemble.given) return c.camouflage ? "matched" : "alpha";
  switch (c.ensemble.form) {
    case EnsembleSpec::Form::Alpha: return "alpha";
    case EnsembleSpec::Form::Zeta: return "zeta";
    case EnsembleSpec::Form::General: return "general";
  }
  return "alpha";
}

}  // namespace

Json effective_config(const RunConfig& c) {
  Json j;
  if (c.hamiltonian) {
    j["source"] = "hamiltonian";
    j["kinetic_terms"] = term_list(c.hamiltonian->kinetic);
    j["potential_terms"] = term_list(c.hamiltonian->potential);
  } else if (c.camouflage) {
    const CamouflageSpec& s = *c.camouflage;
    j["source"] = "camouflage";
    j["camouflage_form"] = s.simplified ? "simplified" : "general";
    j["zeta"] = s.zeta;
    if (s.simplified) {
      j["gamma"] = s.gamma;
    }
    const CamouflageParams p = resolve_camouflage(c);
    j["gamma1"] = p.gamma1;
    j["gamma2"] = p.gamma2;
    j["nu1"] = p.nu1;
    j["nu2"] = p.nu2;
    j["mu1"] = p.mu1;
    j["mu2"] = p.mu2;
    j["lambda1"] = p.lambda1;
    j["lambda2"] = p.lambda2;
    j["lambda1_offset"] = s.lambda1_offset;
    j["lambda2_offset"] = s.lambda2_offset;
    j["lambda_overridden"] = s.perturbed();
  } else if (c.scan) {
    j["source"] = "scan";
    j["scan_zeta"] = c.scan_zeta;
    j["scan_gamma"] = c.scan_gamma;
  }

  j["ensemble_form"] = ensemble_form_name(c);
  if (!c.scan) {
    const GaussianEnsemble w = resolve_ensemble(c);
    j["ensemble_a"] = w.a();
    j["ensemble_b"] = w.b();
  }

  j["grid_nx"] = c.grid.x.n;
  j["grid_nk"] = c.grid.k.n;
  j["grid_x_min"] = c.grid.x.min;
  j["grid_x_max"] = c.grid.x.max;
  j["grid_k_min"] = c.grid.k.min;
  j["grid_k_max"] = c.grid.k.max;
  j["max_abs_zeta"] = c.squeeze.max_abs_zeta;
  j["allow_large_squeeze"] = c.squeeze.allow_large_squeeze;
  j["spectral_n"] = c.spectral.n;
  j["spectral_x_min"] = c.spectral.x_min;
  j["spectral_x_max"] = c.spectral.x_max;
  j["eta_max"] = c.truncation.eta_max;
  j["term_rel_tol"] = c.truncation.term_rel_tol;
  j["term_abs_tol"] = c.truncation.term_abs_tol;
  j["certificate_tolerance"] = c.certificate_tolerance;
  j["zero_mode_tolerance"] = c.zero_mode_tolerance;
  j["output_dir"] = c.output_dir.string();
  j["format"] = c.format;
  return j;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw ContractViolation("CSV row has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

namespace {

void append_cell(std::string& out, const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) {
    out += cell;
    return;
  }
  out += '"';
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    append_cell(out, cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  append_row(out, columns_);
  for (const auto& row : rows_) append_row(out, row);
  return out;
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error("output directory " + dir.string() + " is not usable: " + ec.message());
  }
  const auto probe = dir / ".wflow_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw Error("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) prepare_output_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error("failed to write " + path.string());
}

}  // namespace wflow
