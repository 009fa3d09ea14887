#pragma once

#include "kleinsolv/config.hpp"

#include <iosfwd>

namespace kleinsolv::cli {

/// Runs the configured experiment. The main document goes to cfg.output
/// (atomically) when set, otherwise to `out`; with a file output a one-line
/// JSON summary goes to `out`. Throws ConfigError / NumericError.
void run(const ExperimentConfig& cfg, std::ostream& out);

} // namespace kleinsolv::cli
