#include "kerrcat_app/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kerrcat/version.hpp"

namespace kerrcat::app {

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

namespace {

// variant ordering compares the index first, then the value; a column always
// holds one alternative so this is a plain per-column comparison
bool row_less(const Row& a, const Row& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void sort_rows(std::vector<Row>& rows) { std::stable_sort(rows.begin(), rows.end(), row_less); }

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table,
               const std::string& config_hash, const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# kerrcat " << kVersion << " config_hash=" << config_hash << '\n';
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (header) {
      t.columns = fields;
      header = false;
      continue;
    }
    Row row;
    for (const auto& s : fields) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end && *end == '\0' && !s.empty()) {
        row.emplace_back(v);
      } else {
        row.emplace_back(s);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace kerrcat::app
