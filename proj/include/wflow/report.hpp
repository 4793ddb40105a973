#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wflow/config.hpp"

namespace wflow {

using Json = nlohmann::ordered_json;

// "%.17g"; non-finite values print as nan / inf / -inf.
std::string format_double(double v);

// Term as it would appear in a config file, e.g. "cosh 1 0.5".
std::string format_term(const Term& term);

// Fully resolved configuration as a flat object.
Json effective_config(const RunConfig& config);

// Column-oriented table written as CSV with a header row. Cells are
// pre-formatted; text cells containing commas or quotes are quoted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Creates the parent directory if needed. Throws Error on failure.
void write_file(const std::filesystem::path& path, const std::string& content);
void prepare_output_dir(const std::filesystem::path& dir);

}  // namespace wflow
