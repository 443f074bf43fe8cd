#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace kerrcat::app {

/// Output problems surface as exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long long, std::string>;
using Row = std::vector<Cell>;

/// 17 significant digits; negative zero is written as 0.
std::string format_double(double v);
std::string format_cell(const Cell& c);

/// Rows sorted lexicographically (numbers numerically) before writing.
void sort_rows(std::vector<Row>& rows);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

/// Writes "# kerrcat <version> config_hash=<hash>", extra comment lines, the
/// column header and the rows.
void write_csv(const std::filesystem::path& path, const CsvTable& table,
               const std::string& config_hash, const std::vector<std::string>& comments = {});

/// Reads back a file written by write_csv (comments skipped).
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace kerrcat::app
