#include "kleinsolv/dataset.hpp"

#include "kleinsolv/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kleinsolv::data {

namespace {

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  size_t i = s[0] == '-' ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Cell cell_from_text(const std::string& s) {
  if (is_integer_literal(s)) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno == 0 && end && *end == '\0') return Cell{static_cast<int64_t>(v)};
    return Cell{mpz_class(s)};
  }
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end && *end == '\0' && end != s.c_str()) return Cell{d};
  return Cell{s};
}

void check_csv_safe(const std::string& s) {
  if (s.find_first_of(",\"\n\r") != std::string::npos)
    throw NumericError("cell not representable in CSV: " + s);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

void write_json_cell(const Cell& c, std::ostream& os) {
  if (std::holds_alternative<int64_t>(c) || std::holds_alternative<double>(c))
    os << render_cell(c);
  else
    os << '"' << json_escape(render_cell(c)) << '"';
}

Cell cell_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Cell{j.get<int64_t>()};
  if (j.is_number_float()) return Cell{j.get<double>()};
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (is_integer_literal(s)) return Cell{mpz_class(s)};
    return Cell{s};
  }
  throw NumericError("unsupported JSON cell");
}

} // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw NumericError("non-finite value in output");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_cell(const Cell& c) {
  if (const auto* i = std::get_if<int64_t>(&c)) return std::to_string(*i);
  if (const auto* z = std::get_if<mpz_class>(&c)) return z->get_str();
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

void write_csv(const Dataset& d, std::ostream& os) {
  for (size_t i = 0; i < d.columns.size(); ++i) {
    check_csv_safe(d.columns[i]);
    os << (i ? "," : "") << d.columns[i];
  }
  os << "\n";
  for (const auto& row : d.rows) {
    if (row.size() != d.columns.size()) throw NumericError("row width mismatch");
    for (size_t i = 0; i < row.size(); ++i) {
      const std::string s = render_cell(row[i]);
      check_csv_safe(s);
      os << (i ? "," : "") << s;
    }
    os << "\n";
  }
}

void write_json(const Dataset& d, std::ostream& os) {
  os << "{\n  \"kind\": \"" << json_escape(d.kind) << "\",\n  \"meta\": {";
  for (size_t i = 0; i < d.meta.size(); ++i) {
    os << (i ? ", " : "") << '"' << json_escape(d.meta[i].first) << "\": ";
    write_json_cell(d.meta[i].second, os);
  }
  os << "},\n  \"columns\": [";
  for (size_t i = 0; i < d.columns.size(); ++i)
    os << (i ? ", " : "") << '"' << json_escape(d.columns[i]) << '"';
  os << "],\n  \"rows\": [";
  for (size_t r = 0; r < d.rows.size(); ++r) {
    if (d.rows[r].size() != d.columns.size()) throw NumericError("row width mismatch");
    os << (r ? ",\n    " : "\n    ") << "[";
    for (size_t i = 0; i < d.rows[r].size(); ++i) {
      os << (i ? ", " : "");
      write_json_cell(d.rows[r][i], os);
    }
    os << "]";
  }
  os << (d.rows.empty() ? "]" : "\n  ]") << "\n}\n";
}

std::string to_csv(const Dataset& d) {
  std::ostringstream os;
  write_csv(d, os);
  return os.str();
}

std::string to_json(const Dataset& d) {
  std::ostringstream os;
  write_json(d, os);
  return os.str();
}

Dataset read_csv(std::istream& is) {
  Dataset d;
  std::string line;
  if (!std::getline(is, line)) throw NumericError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream header(line);
  std::string field;
  while (std::getline(header, field, ',')) d.columns.push_back(field);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<Cell> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell_from_text(cell));
    if (row.size() != d.columns.size()) throw NumericError("row width mismatch");
    d.rows.push_back(std::move(row));
  }
  return d;
}

Dataset read_json(std::istream& is) {
  nlohmann::ordered_json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw NumericError(std::string("invalid JSON: ") + e.what());
  }
  Dataset d;
  d.kind = j.value("kind", std::string{});
  if (j.contains("meta"))
    for (const auto& [k, v] : j.at("meta").items()) d.meta.emplace_back(k, cell_from_json(v));
  for (const auto& c : j.at("columns")) d.columns.push_back(c.get<std::string>());
  for (const auto& row : j.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& c : row) cells.push_back(cell_from_json(c));
    if (cells.size() != d.columns.size()) throw NumericError("row width mismatch");
    d.rows.push_back(std::move(cells));
  }
  return d;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw NumericError("cannot write " + tmp.string());
    os << contents;
    os.flush();
    if (!os) throw NumericError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw NumericError("cannot rename into " + path + ": " + ec.message());
}

} // namespace kleinsolv::data
