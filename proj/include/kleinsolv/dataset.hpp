#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kleinsolv::data {

/// One table cell. Reals render at 17 significant digits; big integers render
/// as decimal strings so CSV and JSON round-trip losslessly.
using Cell = std::variant<int64_t, mpz_class, double, std::string>;

struct Dataset {
  std::string kind;
  std::vector<std::pair<std::string, Cell>> meta;  // JSON only
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v);  // %.17g
std::string render_cell(const Cell& c);

void write_csv(const Dataset& d, std::ostream& os);
void write_json(const Dataset& d, std::ostream& os);
std::string to_csv(const Dataset& d);
std::string to_json(const Dataset& d);

Dataset read_csv(std::istream& is);
Dataset read_json(std::istream& is);

/// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::string& path, const std::string& contents);

} // namespace kleinsolv::data
