#pragma once

#include "config.hpp"

namespace heis::cli {

/// Each command writes a bundle under config.out and returns 0 on success or 2 when a
/// pass-type check fails. Configuration problems throw ConfigError.
int cmd_laguerre_table(const RunConfig& config);
int cmd_ingham(const RunConfig& config);
int cmd_carleman(const RunConfig& config);
int cmd_oracle(const RunConfig& config);

}  // namespace heis::cli
