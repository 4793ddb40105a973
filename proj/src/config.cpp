#include "wflow/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "wflow/errors.hpp"

namespace wflow {
namespace {

// ---------------------------------------------------------------------------
// Document model

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, Array> data;
  int line = 0;
};

enum class Tok { Ident, Number, String, Equals, LBrace, RBrace, LBracket, RBracket, Comma, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  const auto fail = [&](const std::string& what) {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '\n') {
      out.push_back({Tok::Newline, "\n", line++});
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '=') {
      out.push_back({Tok::Equals, "=", line}), ++i;
    } else if (c == '{') {
      out.push_back({Tok::LBrace, "{", line}), ++i;
    } else if (c == '}') {
      out.push_back({Tok::RBrace, "}", line}), ++i;
    } else if (c == '[') {
      out.push_back({Tok::LBracket, "[", line}), ++i;
    } else if (c == ']') {
      out.push_back({Tok::RBracket, "]", line}), ++i;
    } else if (c == ',') {
      out.push_back({Tok::Comma, ",", line}), ++i;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') fail("unterminated string");
      out.push_back({Tok::String, text.substr(i + 1, j - i - 1), line});
      i = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      std::size_t j = i + 1;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '.' ||
              ((text[j] == '-' || text[j] == '+') && (text[j - 1] == 'e' || text[j - 1] == 'E')))) {
        ++j;
      }
      out.push_back({Tok::Number, text.substr(i, j - i), line});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({Tok::Ident, text.substr(i, j - i), line});
      i = j;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line});
  return out;
}

// Flat "section.key" -> value table. Top-level keys have no prefix.
using Table = std::map<std::string, Value>;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : t_(std::move(tokens)) {}

  Table parse() {
    std::string section;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Newline) {
        ++pos_;
        continue;
      }
      if (peek().kind == Tok::LBracket) {
        ++pos_;
        section = expect(Tok::Ident, "section name").text;
        expect(Tok::RBracket, "']'");
        end_of_statement();
        continue;
      }
      const Token name = expect(Tok::Ident, "key or block name");
      if (peek().kind == Tok::LBrace) {
        block(name.text);
      } else {
        expect(Tok::Equals, "'='");
        if (peek().kind == Tok::LBrace) {
          block(name.text);
        } else {
          put(qualify(section, name.text), value(), name.line);
        }
      }
      end_of_statement();
    }
    return std::move(table_);
  }

 private:
  const Token& peek() const { return t_[pos_]; }

  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw ConfigError("line " + std::to_string(peek().line) + ": expected " +
                        what + ", found '" + peek().text + "'");
    }
    return t_[pos_++];
  }

  void skip_newlines() {
    while (peek().kind == Tok::Newline) ++pos_;
  }

  void end_of_statement() {
    if (peek().kind != Tok::Newline && peek().kind != Tok::End) {
      throw ConfigError("line " + std::to_string(peek().line) +
                        ": unexpected '" + peek().text + "' after statement");
    }
  }

  static std::string qualify(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

  void put(const std::string& key, Value v, int line) {
    if (table_.count(key)) {
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    v.line = line;
    table_.emplace(key, std::move(v));
  }

  void block(const std::string& name) {
    expect(Tok::LBrace, "'{'");
    sections_.insert(name);
    skip_newlines();
    while (peek().kind != Tok::RBrace) {
      const Token key = expect(Tok::Ident, "key");
      expect(Tok::Equals, "'='");
      put(name + "." + key.text, value(), key.line);
      if (peek().kind == Tok::Comma) ++pos_;
      skip_newlines();
    }
    expect(Tok::RBrace, "'}'");
  }

  Value value() {
    const Token tok = t_[pos_++];
    switch (tok.kind) {
      case Tok::Number: {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(tok.text, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != tok.text.size() || !std::isfinite(v)) {
          throw ConfigError("line " + std::to_string(tok.line) + ": '" + tok.text +
                            "' is not a finite number");
        }
        return {v, tok.line};
      }
      case Tok::String:
        return {tok.text, tok.line};
      case Tok::Ident:
        if (tok.text == "true") return {true, tok.line};
        if (tok.text == "false") return {false, tok.line};
        break;
      case Tok::LBracket: {
        Array items;
        skip_newlines();
        while (peek().kind != Tok::RBracket) {
          items.push_back(value());
          skip_newlines();
          if (peek().kind == Tok::Comma) ++pos_;
          skip_newlines();
        }
        ++pos_;
        return {std::move(items), tok.line};
      }
      default:
        break;
    }
    throw ConfigError("line " + std::to_string(tok.line) + ": expected a value, found '" +
                      tok.text + "'");
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
  Table table_;
  std::set<std::string> sections_;
};

// ---------------------------------------------------------------------------
// Typed access with key bookkeeping

class Reader {
 public:
  explicit Reader(Table table) : table_(std::move(table)) {}

  bool has(const std::string& key) const { return table_.count(key) != 0; }

  bool has_section(const std::string& section) const {
    const std::string prefix = section + ".";
    for (const auto& [k, v] : table_) {
      if (k.rfind(prefix, 0) == 0) return true;
    }
    return false;
  }

  std::optional<double> number(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* d = std::get_if<double>(&v->data)) return *d;
    throw type_error(key, *v, "a number");
  }

  std::optional<int> integer(const std::string& key) {
    const auto d = number(key);
    if (!d) return std::nullopt;
    if (std::floor(*d) != *d || std::abs(*d) > 1e9) {
      throw ConfigError(where(key) + "'" + key + "' must be an integer");
    }
    return static_cast<int>(*d);
  }

  std::optional<bool> boolean(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* b = std::get_if<bool>(&v->data)) return *b;
    throw type_error(key, *v, "true or false");
  }

  std::optional<std::string> string(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&v->data)) return *s;
    throw type_error(key, *v, "a string");
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* d = std::get_if<double>(&v->data)) return std::vector<double>{*d};
    const auto* arr = std::get_if<Array>(&v->data);
    if (!arr) throw type_error(key, *v, "a number or array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) {
      const auto* d = std::get_if<double>(&item.data);
      if (!d) throw type_error(key, *v, "an array of numbers");
      out.push_back(*d);
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&v->data)) return std::vector<std::string>{*s};
    const auto* arr = std::get_if<Array>(&v->data);
    if (!arr) throw type_error(key, *v, "a string or array of strings");
    std::vector<std::string> out;
    for (const auto& item : *arr) {
      const auto* s = std::get_if<std::string>(&item.data);
      if (!s) throw type_error(key, *v, "an array of strings");
      out.push_back(*s);
    }
    return out;
  }

  // Keys present in the document but never read.
  std::vector<std::string> unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : table_) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }

  std::string where(const std::string& key) const {
    const auto it = table_.find(key);
    return it == table_.end() ? std::string() : "line " + std::to_string(it->second.line) + ": ";
  }

 private:
  const Value* find(const std::string& key) {
    used_.insert(key);
    const auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  ConfigError type_error(const std::string& key, const Value& v, const char* want) const {
    return ConfigError("line " + std::to_string(v.line) + ": '" + key + "' must be " + want);
  }

  Table table_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

PhaseSpaceGrid parse_grid_flag(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      require(used == item.size(), "");
    } catch (const std::exception&) {
      throw ConfigError("--grid expects nx,nk,xmax,kmax, got '" + text + "'");
    }
  }
  require(parts.size() == 4, "--grid expects nx,nk,xmax,kmax, got '" + text + "'");
  require(parts[0] == std::floor(parts[0]) && parts[1] == std::floor(parts[1]),
          "--grid point counts must be integers");
  try {
    return PhaseSpaceGrid::symmetric(parts[2], parts[3], static_cast<int>(parts[0]),
                                     static_cast<int>(parts[1]));
  } catch (const InputError& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  }
}

}  // namespace

Term parse_term(const std::string& text) {
  std::stringstream ss(text);
  std::string kind;
  double amplitude = 0.0;
  double parameter = 0.0;
  std::string rest;
  if (!(ss >> kind >> amplitude >> parameter) || (ss >> rest)) {
    throw ConfigError("term '" + text +
                      "' must read '<cosh|cos|monomial> <amplitude> <frequency|power>'");
  }
  try {
    if (kind == "cosh") return Term::cosh(amplitude, parameter);
    if (kind == "cos") return Term::cos(amplitude, parameter);
    if (kind == "monomial") {
      require(parameter == std::floor(parameter), "monomial power must be an integer in '" + text + "'");
      return Term::monomial(amplitude, static_cast<int>(parameter));
    }
  } catch (const InputError& e) {
    throw ConfigError("term '" + text + "': " + e.what());
  }
  throw ConfigError("term '" + text + "': unknown kind '" + kind + "'");
}

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  Reader in(Parser(tokenize(text)).parse());
  RunConfig cfg;

  // Hamiltonian source.
  const bool has_terms = in.has_section("hamiltonian");
  const bool has_camouflage = in.has_section("camouflage");
  const bool has_scan = in.has_section("scan");
  require(int(has_terms) + int(has_camouflage) + int(has_scan) <= 1,
          "exactly one Hamiltonian source is allowed: choose one of [hamiltonian], "
          "[camouflage] or [scan]");

  if (has_terms) {
    SeparableHamiltonian h;
    if (const auto preset = in.string("hamiltonian.preset")) {
      require(*preset == "harmonic", "hamiltonian.preset must be \"harmonic\"");
      h = SeparableHamiltonian::harmonic();
    }
    for (const auto& t : in.strings("hamiltonian.kinetic").value_or(std::vector<std::string>{})) {
      h.kinetic.push_back(parse_term(t));
    }
    for (const auto& t : in.strings("hamiltonian.potential").value_or(std::vector<std::string>{})) {
      h.potential.push_back(parse_term(t));
    }
    cfg.hamiltonian = std::move(h);
  }

  // Grid first: the squeeze bound depends on it.
  if (const auto v = in.integer("grid.nx")) cfg.grid.x.n = *v;
  if (const auto v = in.integer("grid.nk")) cfg.grid.k.n = *v;
  if (const auto v = in.number("grid.x_max")) cfg.grid.x = {-*v, *v, cfg.grid.x.n};
  if (const auto v = in.number("grid.k_max")) cfg.grid.k = {-*v, *v, cfg.grid.k.n};
  if (overrides.grid) cfg.grid = parse_grid_flag(*overrides.grid);
  try {
    cfg.grid.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  cfg.squeeze.allow_large_squeeze = in.boolean("grid.allow_large_squeeze").value_or(false);

  if (const auto v = in.integer("spectral.n")) cfg.spectral.n = *v;
  if (const auto v = in.number("spectral.x_max")) {
    cfg.spectral.x_min = -*v;
    cfg.spectral.x_max = *v;
  }
  try {
    cfg.spectral.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string("spectral: ") + e.what());
  }

  if (const auto v = in.integer("truncation.eta_max")) cfg.truncation.eta_max = *v;
  if (overrides.eta_max) cfg.truncation.eta_max = *overrides.eta_max;
  if (const auto v = in.number("truncation.term_rel_tol")) cfg.truncation.term_rel_tol = *v;
  if (const auto v = in.number("truncation.term_abs_tol")) cfg.truncation.term_abs_tol = *v;
  try {
    cfg.truncation.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("truncation: ") + e.what());
  }

  if (const auto v = in.number("certificate.tolerance")) cfg.certificate_tolerance = *v;
  if (const auto v = in.number("certificate.zero_mode_tolerance")) cfg.zero_mode_tolerance = *v;
  require(cfg.certificate_tolerance > 0.0 && cfg.zero_mode_tolerance > 0.0,
          "certificate tolerances must be positive");

  if (has_camouflage) {
    CamouflageSpec c;
    c.zeta = in.number("camouflage.zeta").value_or(0.0);
    const auto g1 = in.number("camouflage.gamma1");
    const auto g2 = in.number("camouflage.gamma2");
    const auto n1 = in.number("camouflage.nu1");
    const auto n2 = in.number("camouflage.nu2");
    const auto gamma = in.number("camouflage.gamma");
    const bool general = g1 || g2 || n1 || n2;
    if (general) {
      require(!gamma, "camouflage: give either gamma (simplified form) or "
                      "gamma1, gamma2, nu1, nu2 (general form), not both");
      require(g1 && g2 && n1 && n2,
              "camouflage: the general form needs all of gamma1, gamma2, nu1, nu2");
      c.simplified = false;
      c.gamma1 = *g1;
      c.gamma2 = *g2;
      c.nu1 = *n1;
      c.nu2 = *n2;
    } else {
      c.gamma = gamma.value_or(1.0);
    }
    c.lambda1_override = in.number("camouflage.lambda1_override");
    c.lambda2_override = in.number("camouflage.lambda2_override");
    c.lambda1_offset = in.number("camouflage.lambda1_offset").value_or(0.0);
    c.lambda2_offset = in.number("camouflage.lambda2_offset").value_or(0.0);
    cfg.camouflage = c;
    try {
      resolve_camouflage(cfg);
    } catch (const InputError& e) {
      throw ConfigError(std::string("camouflage: ") + e.what());
    }
  }

  if (has_scan) {
    cfg.scan = true;
    cfg.scan_zeta = in.numbers("scan.zeta").value_or(std::vector<double>{});
    cfg.scan_gamma = in.numbers("scan.gamma").value_or(std::vector<double>{});
    require(!cfg.scan_zeta.empty() && !cfg.scan_gamma.empty(),
            "scan needs non-empty zeta and gamma lists");
    require(cfg.scan_zeta.size() * cfg.scan_gamma.size() <= 10000,
            "scan is limited to 10000 (zeta, gamma) combinations");
  }

  if (const auto form = in.string("ensemble.form")) {
    cfg.ensemble.given = true;
    if (*form == "alpha") {
      cfg.ensemble.form = EnsembleSpec::Form::Alpha;
      cfg.ensemble.alpha = in.number("ensemble.alpha").value_or(1.0);
    } else if (*form == "zeta") {
      cfg.ensemble.form = EnsembleSpec::Form::Zeta;
      cfg.ensemble.zeta = in.number("ensemble.zeta").value_or(0.0);
    } else if (*form == "general") {
      cfg.ensemble.form = EnsembleSpec::Form::General;
      const auto a = in.number("ensemble.a");
      const auto b = in.number("ensemble.b");
      require(a && b, "ensemble: the general form needs both a and b");
      cfg.ensemble.a = *a;
      cfg.ensemble.b = *b;
    } else {
      throw ConfigError("ensemble.form must be \"alpha\", \"zeta\" or \"general\"");
    }
    try {
      resolve_ensemble(cfg);
    } catch (const InputError& e) {
      throw ConfigError(std::string("ensemble: ") + e.what());
    }
  }

  if (const auto v = in.string("output.dir")) cfg.output_dir = *v;
  if (const auto v = in.string("output.format")) cfg.format = *v;
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
  if (overrides.format) cfg.format = *overrides.format;
  require(cfg.format == "csv" || cfg.format == "json", "format must be csv or json");

  const auto unknown = in.unknown_keys();
  if (!unknown.empty()) {
    std::string msg = "unknown configuration keys:";
    for (std::size_t i = 0; i < unknown.size(); ++i) {
      const std::string where = in.where(unknown[i]);
      msg += (i ? ", '" : " '") + unknown[i] + "'";
      if (!where.empty()) msg += " (" + where.substr(0, where.size() - 2) + ")";
    }
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

CamouflageParams solved_camouflage(const RunConfig& config) {
  if (!config.camouflage) throw ConfigError("configuration has no [camouflage] block");
  const CamouflageSpec& c = *config.camouflage;
  return c.simplified ? simplified_parameters(c.zeta, c.gamma, config.squeeze)
                      : solve_constraints(c.zeta, c.gamma1, c.gamma2, c.nu1, c.nu2,
                                          config.squeeze);
}

LambdaOverride camouflage_override(const RunConfig& config) {
  if (!config.camouflage || !config.camouflage->perturbed()) return {};
  const CamouflageSpec& c = *config.camouflage;
  const CamouflageParams p = solved_camouflage(config);
  return {c.lambda1_override.value_or(p.lambda1) + c.lambda1_offset,
          c.lambda2_override.value_or(p.lambda2) + c.lambda2_offset};
}

CamouflageParams resolve_camouflage(const RunConfig& config) {
  return with_override(solved_camouflage(config), camouflage_override(config));
}

SeparableHamiltonian resolve_hamiltonian(const RunConfig& config) {
  if (config.hamiltonian) return *config.hamiltonian;
  if (config.camouflage) return build_hamiltonian(resolve_camouflage(config));
  throw ConfigError("configuration has no Hamiltonian source ([hamiltonian] or [camouflage])");
}

GaussianEnsemble resolve_ensemble(const RunConfig& config) {
  if (config.ensemble.given) {
    switch (config.ensemble.form) {
      case EnsembleSpec::Form::Alpha: return GaussianEnsemble::alpha_form(config.ensemble.alpha);
      case EnsembleSpec::Form::Zeta: return GaussianEnsemble::squeezed(config.ensemble.zeta);
      case EnsembleSpec::Form::General:
        return GaussianEnsemble::general(config.ensemble.a, config.ensemble.b);
    }
  }
  if (config.camouflage) return matched_ensemble(solved_camouflage(config));
  return GaussianEnsemble::alpha_form(1.0);
}

}  // namespace wflow
