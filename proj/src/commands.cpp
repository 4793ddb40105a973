#include "wflow/commands.hpp"

#include <algorithm>
#include <cmath>

#include "wflow/errors.hpp"

namespace wflow {
namespace {

void put_maximum(Json& j, const std::string& name, const PathMaximum& m) {
  j["max_abs_" + name] = m.max_abs;
  j["argmax_" + name + "_x"] = m.x;
  j["argmax_" + name + "_k"] = m.k;
}

void put_certificate(Json& j, const StationarityCertificate& c) {
  j["tolerance"] = c.tolerance;
  put_maximum(j, "div_closed_form", c.closed_form);
  put_maximum(j, "div_generating", c.generating);
  put_maximum(j, "div_series", c.series);
  put_maximum(j, "classical_divergence", c.classical);
  j["max_pairwise_discrepancy"] = c.max_pairwise_discrepancy;
  j["coefficient_sinh_sin"] = c.coefficients.sinh_sin;
  j["coefficient_sin_sinh"] = c.coefficients.sin_sinh;
  j["points"] = c.points;
  j["series_nonconverged"] = c.series_nonconverged;
  Json pts = Json::array();
  for (const auto& [x, k] : c.nonconverged_points) pts.push_back({x, k});
  j["series_nonconverged_points"] = pts;
  j["series_terms_min"] = c.series_terms_min;
  j["series_terms_max"] = c.series_terms_max;
  j["series_terms_mean"] = c.series_terms_mean;
  j["certified"] = c.certified;
}

void put_zero_mode(Json& j, const ZeroModeReport& z, double tolerance) {
  j["zero_mode_residual"] = z.residual;
  j["zero_mode_tolerance"] = tolerance;
  j["zero_mode_kinetic_norm"] = z.kinetic_norm;
  j["zero_mode_potential_norm"] = z.potential_norm;
  j["zero_mode_total_norm"] = z.total_norm;
  j["zero_mode_noise_estimate"] = z.noise_estimate;
  j["zero_mode_band_limit"] = z.band_limit;
  j["zero_mode_precision_warning"] = z.precision_warning;
  j["zero_mode_passed"] = z.residual <= tolerance;
}

void put_params(Json& j, const CamouflageParams& p) {
  j["zeta"] = p.zeta;
  j["gamma1"] = p.gamma1;
  j["gamma2"] = p.gamma2;
  j["nu1"] = p.nu1;
  j["nu2"] = p.nu2;
  j["mu1"] = p.mu1;
  j["mu2"] = p.mu2;
  j["lambda1"] = p.lambda1;
  j["lambda2"] = p.lambda2;
}

std::filesystem::path emit(CommandResult& result, const RunConfig& config,
                           const std::string& name, const std::string& content) {
  const auto path = config.output_dir / name;
  write_file(path, content);
  result.files.push_back(path);
  return path;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

const RunConfig& require_camouflage(const RunConfig& config, const char* command) {
  if (!config.camouflage) {
    throw ConfigError(std::string(command) + " needs a [camouflage] block");
  }
  return config;
}

// Per-node output of the flow-field sweep.
struct FlowNode {
  double jx = 0.0;
  double jk = 0.0;
  double div = 0.0;
  double classical_div = 0.0;
  bool masked = false;
  double liouvillianity = 0.0;
  bool converged = true;
  int terms = 0;
};

}  // namespace

CommandResult cmd_flow_field(const RunConfig& config) {
  prepare_output_dir(config.output_dir);
  const SeparableHamiltonian h = resolve_hamiltonian(config);
  const GaussianEnsemble w = resolve_ensemble(config);
  const PhaseSpaceGrid& grid = config.grid;
  const TruncationPolicy& policy = config.truncation;
  grid.validate();
  policy.validate();

  Json warnings = Json::array();
  if (config.camouflage) {
    try {
      check_grid_resolution(resolve_camouflage(config), grid);
    } catch (const GridError& e) {
      warnings.push_back(e.what());
    }
  }

  std::vector<FlowNode> nodes(grid.size());
  parallel_rows(grid.x.n, [&](int i) {
    const double x = grid.x.at(i);
    for (int j = 0; j < grid.k.n; ++j) {
      const double k = grid.k.at(j);
      FlowNode& n = nodes[grid.index(i, j)];
      const SeriesResult jx = current_x_series(w, h, x, k, policy);
      const SeriesResult jk = current_k_series(w, h, x, k, policy);
      const StationarityResult div = stationarity_quantifier(w, h, x, k, policy);
      const LiouvillianityResult lv = liouvillianity_quantifier(w, h, x, k, policy);
      n.jx = jx.value;
      n.jk = jk.value;
      n.div = div.value;
      n.classical_div = classical_divergence(w, h, x, k);
      n.masked = lv.masked;
      n.liouvillianity = lv.value;
      n.converged = jx.diagnostics.converged && jk.diagnostics.converged &&
                    div.converged() && (lv.masked || lv.converged());
      n.terms = div.x_part.terms_used + div.k_part.terms_used;
    }
  });

  const std::vector<std::string> columns{"x",   "k",         "Jx",
                                         "Jk",  "divJ",      "divW_mask",
                                         "liouvillianity"};
  CsvTable table(columns);
  Json field = Json::object();
  for (const auto& c : columns) field[c] = Json::array();

  PathMaximum max_div, max_jx, max_jk, max_lv, max_classical;
  const auto track = [](PathMaximum& m, double v, double x, double k) {
    if (std::abs(v) > m.max_abs) m = {std::abs(v), x, k};
  };
  std::size_t masked = 0;
  std::size_t nonconverged = 0;
  int terms_max = 0;
  for (int i = 0; i < grid.x.n; ++i) {
    for (int j = 0; j < grid.k.n; ++j) {
      const double x = grid.x.at(i);
      const double k = grid.k.at(j);
      const FlowNode& n = nodes[grid.index(i, j)];
      const double lv = n.masked ? std::nan("") : n.liouvillianity;
      track(max_div, n.div, x, k);
      track(max_jx, n.jx, x, k);
      track(max_jk, n.jk, x, k);
      track(max_classical, n.classical_div, x, k);
      if (!n.masked) track(max_lv, n.liouvillianity, x, k);
      masked += n.masked;
      nonconverged += !n.converged;
      terms_max = std::max(terms_max, n.terms);
      if (config.format == "csv") {
        table.add_row({format_double(x), format_double(k), format_double(n.jx),
                       format_double(n.jk), format_double(n.div),
                       n.masked ? "1" : "0", format_double(lv)});
      } else {
        field["x"].push_back(x);
        field["k"].push_back(k);
        field["Jx"].push_back(n.jx);
        field["Jk"].push_back(n.jk);
        field["divJ"].push_back(n.div);
        field["divW_mask"].push_back(n.masked ? 1 : 0);
        field["liouvillianity"].push_back(lv);
      }
    }
  }

  CommandResult result;
  if (config.format == "csv") {
    emit(result, config, "flow_field.csv", table.str());
  } else {
    field["nx"] = grid.x.n;
    field["nk"] = grid.k.n;
    emit(result, config, "flow_field.json", field.dump() + "\n");
  }

  const double fraction =
      static_cast<double>(nonconverged) / static_cast<double>(grid.size());
  Json& s = result.summary;
  s["command"] = "flow-field";
  s["points"] = grid.size();
  put_maximum(s, "div_j", max_div);
  put_maximum(s, "jx", max_jx);
  put_maximum(s, "jk", max_jk);
  put_maximum(s, "liouvillianity", max_lv);
  put_maximum(s, "classical_divergence", max_classical);
  s["masked_points"] = masked;
  s["nonconverged_points"] = nonconverged;
  s["nonconverged_fraction"] = fraction;
  s["max_nonconverged_fraction"] = kMaxNonconvergedFraction;
  s["series_terms_max"] = terms_max;
  s["warnings"] = warnings;
  s["effective_config"] = effective_config(config);
  result.exit_code = fraction > kMaxNonconvergedFraction ? kExitNonconvergence : kExitOk;
  s["exit_code"] = result.exit_code;
  emit(result, config, "flow_field_summary.json", dump(s));
  return result;
}

CommandResult cmd_camouflage_verify(const RunConfig& config) {
  require_camouflage(config, "camouflage-verify");
  prepare_output_dir(config.output_dir);
  const CamouflageParams params = solved_camouflage(config);
  const LambdaOverride override_ = camouflage_override(config);

  CommandResult result;
  Json& s = result.summary;
  s["command"] = "camouflage-verify";
  put_params(s, with_override(params, override_));
  s["lambda_overridden"] = !override_.empty();
  Json warnings = Json::array();

  try {
    const StationarityCertificate cert = stationarity_certificate(
        params, config.grid, config.truncation, config.certificate_tolerance, override_);
    const ZeroModeReport zm = zero_mode_residual(params, config.spectral, override_);
    put_certificate(s, cert);
    put_zero_mode(s, zm, config.zero_mode_tolerance);
    if (zm.precision_warning) {
      warnings.push_back("zero-mode noise estimate " + format_double(zm.noise_estimate) +
                         " exceeds the precision warning level");
    }
    if (cert.series_nonconverged > 0) {
      warnings.push_back(std::to_string(cert.series_nonconverged) +
                         " grid points did not converge within eta_max");
    }
    const bool passed = cert.certified && zm.residual <= config.zero_mode_tolerance;
    s["status"] = passed ? "certified" : "failed";
    s["passed"] = passed;
    result.exit_code = passed ? kExitOk : kExitNotCertified;
  } catch (const GridError& e) {
    s["status"] = "refused";
    s["passed"] = false;
    s["reason"] = e.what();
    result.exit_code = kExitRefused;
  }
  s["warnings"] = warnings;
  s["effective_config"] = effective_config(config);
  s["exit_code"] = result.exit_code;
  emit(result, config, "camouflage_verify.json", dump(s));
  return result;
}

CommandResult cmd_scan(const RunConfig& config) {
  if (!config.scan) throw ConfigError("scan needs a [scan] block with zeta and gamma lists");
  prepare_output_dir(config.output_dir);

  const std::vector<std::string> columns{
      "zeta", "gamma", "status", "max_abs_div_closed_form", "max_abs_div_generating",
      "max_abs_div_series", "max_abs_classical_divergence", "zero_mode_residual",
      "series_terms_min", "series_terms_max", "series_terms_mean", "certified", "message"};
  CsvTable table(columns);
  Json rows = Json::array();
  std::size_t certified = 0;
  std::size_t refused = 0;

  for (const double zeta : config.scan_zeta) {
    for (const double gamma : config.scan_gamma) {
      Json row;
      row["zeta"] = zeta;
      row["gamma"] = gamma;
      try {
        const CamouflageParams p = simplified_parameters(zeta, gamma, config.squeeze);
        const StationarityCertificate cert = stationarity_certificate(
            p, config.grid, config.truncation, config.certificate_tolerance);
        const ZeroModeReport zm = zero_mode_residual(p, config.spectral);
        const bool ok = cert.certified && zm.residual <= config.zero_mode_tolerance;
        row["status"] = ok ? "certified" : "failed";
        row["max_abs_div_closed_form"] = cert.closed_form.max_abs;
        row["max_abs_div_generating"] = cert.generating.max_abs;
        row["max_abs_div_series"] = cert.series.max_abs;
        row["max_abs_classical_divergence"] = cert.classical.max_abs;
        row["zero_mode_residual"] = zm.residual;
        row["series_terms_min"] = cert.series_terms_min;
        row["series_terms_max"] = cert.series_terms_max;
        row["series_terms_mean"] = cert.series_terms_mean;
        row["certified"] = ok;
        row["message"] = zm.precision_warning ? "zero-mode precision warning" : "";
        certified += ok;
      } catch (const Error& e) {
        // InputError (squeeze bound) and GridError (density bound) refuse the
        // row; anything else is recorded as a failed computation.
        const bool bound = dynamic_cast<const InputError*>(&e) ||
                           dynamic_cast<const GridError*>(&e);
        row["status"] = bound ? "refused" : "error";
        row["certified"] = false;
        row["message"] = e.what();
        refused += bound;
      }
      const auto cell = [&](const char* key) {
        if (!row.contains(key)) return std::string();
        const Json& v = row[key];
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        return format_double(v.get<double>());
      };
      std::vector<std::string> cells;
      for (const auto& c : columns) cells.push_back(cell(c.c_str()));
      table.add_row(std::move(cells));
      rows.push_back(std::move(row));
    }
  }

  CommandResult result;
  if (config.format == "csv") {
    emit(result, config, "scan.csv", table.str());
  } else {
    emit(result, config, "scan.json", dump(Json{{"rows", rows}}));
  }
  Json& s = result.summary;
  s["command"] = "scan";
  s["rows"] = table.rows();
  s["certified_rows"] = certified;
  s["refused_rows"] = refused;
  s["effective_config"] = effective_config(config);
  s["exit_code"] = kExitOk;
  emit(result, config, "scan_summary.json", dump(s));
  return result;
}

CommandResult cmd_zero_mode(const RunConfig& config) {
  require_camouflage(config, "zero-mode");
  prepare_output_dir(config.output_dir);
  const CamouflageParams params = solved_camouflage(config);
  const LambdaOverride override_ = camouflage_override(config);
  const ZeroModeReport zm = zero_mode_residual(params, config.spectral, override_);

  CommandResult result;
  Json& s = result.summary;
  s["command"] = "zero-mode";
  put_params(s, with_override(params, override_));
  s["lambda_overridden"] = !override_.empty();
  put_zero_mode(s, zm, config.zero_mode_tolerance);
  s["effective_config"] = effective_config(config);
  s["exit_code"] = kExitOk;
  emit(result, config, "zero_mode.json", dump(s));
  return result;
}

}  // namespace wflow
