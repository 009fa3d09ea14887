#include "kleinsolv/config.hpp"
#include "kleinsolv/errors.hpp"
#include "kleinsolv/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

using kleinsolv::cli::ExperimentConfig;

struct Invocation {
  ExperimentConfig cfg;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> assignments;  // flags, applied after the file
};

void add_common(CLI::App* sub, Invocation& inv) {
  auto opt = [&inv, sub](const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&inv, key](const std::string& v) { inv.assignments.emplace_back(key, v); }, help);
  };
  sub->add_option("--config", inv.config_path, "key = value config file; flags override it");
  opt("--preset", "preset", "named example: cat2 or cat3");
  opt("--B", "B", "inline integer matrix, e.g. [[2,1],[1,1]]");
  opt("--M", "M", "inline real generator matrix");
  opt("--tol", "tol", "hyperbolicity / classification tolerance");
  opt("--out", "out", "output file (stdout when omitted)");
  opt("--format", "format", "csv or json");
  opt("--threads", "threads", "worker threads for grid sweeps");
  opt("--seed", "seed", "PRNG seed for sampled checks");
}

int dispatch(Invocation& inv, const std::string& command) {
  inv.cfg.command = command;
  if (!inv.config_path.empty()) kleinsolv::cli::load_config_file(inv.cfg, inv.config_path);
  for (const auto& [key, value] : inv.assignments) inv.cfg.set(key, value);
  kleinsolv::cli::validate(inv.cfg);
  kleinsolv::cli::run(inv.cfg, std::cout);
  return 0;
}

void print_error(const char* kind, const std::string& message) {
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c;
  }
  std::cerr << "{\"error\": {\"kind\": \"" << kind << "\", \"message\": \"" << escaped << "\"}}\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"discontinuity regions, limit sets and lattice dynamics of split "
               "solvable projective actions"};
  app.require_subcommand(1);

  Invocation inv;
  std::string pending;

  struct OptSpec {
    const char* flag;
    const char* key;
    const char* help;
  };
  struct SubSpec {
    const char* name;
    const char* help;
    std::vector<OptSpec> opts;
  };
  const std::vector<SubSpec> subs = {
      {"split", "stable/unstable splitting, spectrum and Lyapunov data", {}},
      {"classify-grid",
       "region labels over a 2-plane slice of the chart",
       {{"--plane", "plane", "two axes among re<k>, ims<k>, imu<k> (default ims0,imu0)"},
        {"--res", "res", "cells per axis"},
        {"--window", "window", "axis range lo:hi (default -2:2)"},
        {"--fix", "fix", "fix off-plane coordinates, e.g. imu0=0.5"},
        {"--escape", "escape", "count generator iterations until escape"},
        {"--escape-limit", "escape-limit", "iteration cap for --escape"},
        {"--escape-radius", "escape-radius", "escape radius for --escape"}}},
      {"orbit",
       "torus orbit of x0 with optional box-counting density",
       {{"--x0", "x0", "start point: 'generic' or a comma list"},
        {"--n", "n", "number of iterations"},
        {"--eps", "eps", "density resolution in (0, 1/2]"}}},
      {"fixed-points",
       "isotropy fixed points approximating a target",
       {{"--target", "target", "target point: 'generic' or a comma list"},
        {"--n", "n", "largest power in the sweep"}}},
      {"lattice-check",
       "integrality certificate for sigma exp(hM) sigma^-1",
       {{"--sigma", "sigma", "conjugating matrix (default identity)"},
        {"--step", "h", "time step h > 0"},
        {"--lattice-tol", "lattice-tol", "integrality tolerance"}}},
      {"norm-scan",
       "boundedness scan of |(I - B^n)^-1|",
       {{"--scan-lo", "scan-lo", "first power (nonzero)"},
        {"--scan-hi", "scan-hi", "last power (nonzero)"}}},
      {"psi-check",
       "sampled roundtrip and equivariance of the psi-minus chart",
       {{"--samples", "samples", "number of random samples"}}},
      {"witness",
       "divergence witness sequence between the two regions",
       {{"--z1", "z1", "point of U+ only, e.g. 0,i"},
        {"--z2", "z2", "point of U- only, e.g. i,0"},
        {"--n", "n", "number of witness steps"}}},
  };

  for (const auto& spec : subs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    add_common(sub, inv);
    for (const auto& opt : spec.opts) {
      const std::string key_copy = opt.key;
      if (std::string(opt.flag) == "--escape") {
        sub->add_flag_function(
            opt.flag, [&inv](int64_t) { inv.assignments.emplace_back("escape", "1"); }, opt.help);
      } else {
        sub->add_option_function<std::string>(
            opt.flag,
            [&inv, key_copy](const std::string& v) { inv.assignments.emplace_back(key_copy, v); },
            opt.help);
      }
    }
    sub->callback([&pending, name = std::string(spec.name)] { pending = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    print_error("config", e.what());
    return 2;
  }

  try {
    return dispatch(inv, pending);
  } catch (const kleinsolv::ConfigError& e) {
    print_error("config", e.what());
    return 2;
  } catch (const kleinsolv::NumericError& e) {
    print_error("numeric", e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
}
