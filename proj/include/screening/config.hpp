#pragma once

#include <optional>
#include <string>

#include "screening/discrimination.hpp"
#include "screening/types.hpp"

namespace screening {

// A fully resolved run description: model primitives, observation matrix,
// workforce partition, and the optional penalty block. Built by parse_config
// and consumed by every command.
struct RunConfig {
  ModelParams params;
  SharingMatrix matrix{1};
  WorkerPartition partition;
  std::optional<DiscriminationConfig> discrimination;
};

// Line-oriented `key = value` text. Blank lines and `#` comments are skipped;
// unknown or duplicate keys raise parse_error with the offending line number.
// `rho` takes a scalar; `rho_matrix` names a file holding a whitespace
// separated n-by-n grid. Every assembled object is validated before return.
RunConfig parse_config(const std::string& text);

// Reads the file and delegates to parse_config. Relative rho_matrix paths
// resolve against the current working directory.
RunConfig load_config(const std::string& path);

}  // namespace screening
