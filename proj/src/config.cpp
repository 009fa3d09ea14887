#include "kleinsolv/config.hpp"

#include "kleinsolv/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace kleinsolv::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
}

long parse_long(const std::string& s) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + s + "'");
  }
}

nlohmann::json parse_json_array(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw ConfigError("expected a JSON array: " + text);
  return j;
}

std::complex<double> parse_complex(const std::string& raw) {
  // forms: "1.5", "2i", "1+2i", "-1-0.5i", "i", "-i"
  std::string s = raw;
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw ConfigError("empty complex literal");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  s.pop_back();
  // split at the sign separating real and imaginary parts (skip position 0
  // and signs following an exponent marker)
  for (size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      const std::string im = s.substr(k);
      return {parse_double(s.substr(0, k)),
              im == "+" ? 1.0 : im == "-" ? -1.0 : parse_double(im)};
    }
  }
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  return {0.0, parse_double(s)};
}

} // namespace

linalg::Mat parse_real_matrix(const std::string& text) {
  const auto j = parse_json_array(text);
  const auto rows = j.size();
  if (rows == 0) throw ConfigError("empty matrix");
  linalg::Mat m(rows, j[0].size());
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != j[0].size())
      throw ConfigError("ragged matrix literal");
    for (size_t k = 0; k < j[i].size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
  }
  if (m.rows() != m.cols()) throw ConfigError("matrix must be square");
  return m;
}

std::vector<std::vector<long>> parse_int_matrix(const std::string& text) {
  const auto j = parse_json_array(text);
  std::vector<std::vector<long>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ConfigError("ragged matrix literal");
    std::vector<long> row;
    for (const auto& c : r) {
      if (!c.is_number_integer()) throw ConfigError("integer matrix entries must be integers");
      row.push_back(c.get<long>());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.size() != rows[0].size()) throw ConfigError("matrix must be square");
  return rows;
}

linalg::Vec parse_real_vector(const std::string& text) {
  std::vector<double> vals;
  if (!text.empty() && text.front() == '[') {
    for (const auto& c : parse_json_array(text)) vals.push_back(c.get<double>());
  } else {
    for (const auto& piece : split(text, ',')) vals.push_back(parse_double(piece));
  }
  if (vals.empty()) throw ConfigError("empty vector");
  linalg::Vec v(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

linalg::CVec parse_complex_vector(const std::string& text) {
  const auto pieces = split(text, ',');
  if (pieces.empty()) throw ConfigError("empty vector");
  linalg::CVec v(static_cast<Eigen::Index>(pieces.size()));
  for (size_t i = 0; i < pieces.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_complex(pieces[i]);
  return v;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "preset") {
    preset = value;
  } else if (key == "B") {
    toral = linalg::IntMatrix::from_rows(parse_int_matrix(value));
  } else if (key == "M") {
    generator = parse_real_matrix(value);
  } else if (key == "tol") {
    tol = parse_double(value);
  } else if (key == "lattice-tol") {
    lattice_tol = parse_double(value);
  } else if (key == "n") {
    n_max = parse_long(value);
  } else if (key == "eps") {
    epsilon = parse_double(value);
  } else if (key == "x0") {
    if (value != "generic") x0 = parse_real_vector(value);
  } else if (key == "target") {
    if (value != "generic") target = parse_real_vector(value);
  } else if (key == "plane") {
    plane = value;
  } else if (key == "res") {
    resolution = static_cast<int>(parse_long(value));
  } else if (key == "window") {
    const auto parts = split(value, ':');
    if (parts.size() != 2) throw ConfigError("window must be lo:hi");
    window_lo = parse_double(parts[0]);
    window_hi = parse_double(parts[1]);
  } else if (key == "fix") {
    for (const auto& item : split(value, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("fix must be axis=value");
      fixed_coords.emplace_back(trim(item.substr(0, eq)), parse_double(trim(item.substr(eq + 1))));
    }
  } else if (key == "escape") {
    escape = value == "1" || value == "true";
  } else if (key == "escape-limit") {
    escape_limit = parse_long(value);
  } else if (key == "escape-radius") {
    escape_radius = parse_double(value);
  } else if (key == "sigma") {
    sigma = value == "I" ? std::optional<linalg::Mat>{} : std::optional<linalg::Mat>(parse_real_matrix(value));
  } else if (key == "h") {
    step = parse_double(value);
  } else if (key == "scan-lo") {
    scan_lo = parse_long(value);
  } else if (key == "scan-hi") {
    scan_hi = parse_long(value);
  } else if (key == "samples") {
    samples = parse_long(value);
  } else if (key == "seed") {
    seed = static_cast<unsigned long>(parse_long(value));
  } else if (key == "z1") {
    z1 = parse_complex_vector(value);
  } else if (key == "z2") {
    z2 = parse_complex_vector(value);
  } else if (key == "threads") {
    threads = static_cast<int>(parse_long(value));
  } else if (key == "out") {
    output = value;
  } else if (key == "format") {
    format = value;
  } else {
    throw ConfigError("unknown config key: '" + key + "'");
  }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void validate(ExperimentConfig& cfg) {
  static const std::set<std::string> commands = {"split",        "classify-grid", "orbit",
                                                 "fixed-points", "lattice-check", "norm-scan",
                                                 "psi-check",    "witness"};
  if (!commands.count(cfg.command)) throw ConfigError("unknown command: '" + cfg.command + "'");

  const int sources = (cfg.preset ? 1 : 0) + (cfg.toral ? 1 : 0) + (cfg.generator ? 1 : 0);
  if (sources != 1)
    throw ConfigError("exactly one matrix source (preset, B, or M) is required");
  if (cfg.preset && *cfg.preset != "cat2" && *cfg.preset != "cat3")
    throw ConfigError("unknown preset: '" + *cfg.preset + "' (expected cat2 or cat3)");

  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  if (!(cfg.lattice_tol > 0.0)) throw ConfigError("lattice-tol must be positive");
  if (cfg.resolution < 1) throw ConfigError("res must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
  if (!(cfg.window_lo < cfg.window_hi)) throw ConfigError("window must satisfy lo < hi");
  if (cfg.command == "orbit") {
    if (cfg.n_max < 0) throw ConfigError("n must be nonnegative");
    if (cfg.epsilon != 0.0 && !(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5))
      throw ConfigError("eps must lie in (0, 1/2]");
  }
  if (cfg.command == "fixed-points" && cfg.n_max < 1) throw ConfigError("n must be positive");
  if (cfg.command == "witness" && cfg.n_max < 1) throw ConfigError("n must be positive");
  if (cfg.command == "norm-scan") {
    if (cfg.scan_lo > cfg.scan_hi) throw ConfigError("scan range is empty");
    if (cfg.scan_lo <= 0 && 0 <= cfg.scan_hi) throw ConfigError("scan range must not contain 0");
  }
  if (cfg.command == "lattice-check" && !(cfg.step > 0.0))
    throw ConfigError("h must be positive");

  if (cfg.format.empty()) {
    const bool tabular = cfg.command == "classify-grid" || cfg.command == "orbit" ||
                         cfg.command == "fixed-points" || cfg.command == "norm-scan" ||
                         cfg.command == "witness";
    cfg.format = tabular ? "csv" : "json";
  }
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("format must be csv or json");
  const bool report_only = cfg.command == "split" || cfg.command == "lattice-check" ||
                           cfg.command == "psi-check";
  if (report_only && cfg.format != "json")
    throw ConfigError(cfg.command + " supports only json output");
}

} // namespace kleinsolv::cli
