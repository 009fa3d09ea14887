#pragma once

#include "kleinsolv/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kleinsolv::cli {

/// One experiment per invocation. Every field maps 1:1 to a CLI flag and to a
/// `key = value` line of a config file; flags override the file.
struct ExperimentConfig {
  std::string command;

  // matrix source: exactly one of preset / toral B / generator M
  std::optional<std::string> preset;
  std::optional<linalg::IntMatrix> toral;
  std::optional<linalg::Mat> generator;

  double tol = 1e-9;          // hyperbolicity / classification tolerance
  double lattice_tol = 1e-6;  // integrality tolerance of lattice-check

  long n_max = 100;
  double epsilon = 0.0;  // 0 disables the density report
  std::optional<linalg::Vec> x0;      // empty means the default generic point
  std::optional<linalg::Vec> target;  // ditto

  std::string plane = "ims0,imu0";
  int resolution = 64;
  double window_lo = -2.0;
  double window_hi = 2.0;
  std::vector<std::pair<std::string, double>> fixed_coords;
  bool escape = false;
  long escape_limit = 100;
  double escape_radius = 1e6;

  std::optional<linalg::Mat> sigma;
  double step = 1.0;  // the lattice time step h

  long scan_lo = 1;
  long scan_hi = 200;

  long samples = 1000;
  unsigned long seed = 12345;

  std::optional<linalg::CVec> z1;
  std::optional<linalg::CVec> z2;

  int threads = 1;
  std::string output;  // empty writes the document to stdout
  std::string format;  // csv | json; command-dependent default when empty

  /// Applies one `key = value` assignment (config file line or flag).
  void set(const std::string& key, const std::string& value);
};

linalg::Mat parse_real_matrix(const std::string& text);
std::vector<std::vector<long>> parse_int_matrix(const std::string& text);
linalg::Vec parse_real_vector(const std::string& text);
linalg::CVec parse_complex_vector(const std::string& text);

/// Reads `key = value` lines; '#' starts a comment.
void load_config_file(ExperimentConfig& cfg, const std::string& path);

/// Full validation; throws ConfigError. Fills per-command format defaults.
void validate(ExperimentConfig& cfg);

} // namespace kleinsolv::cli
