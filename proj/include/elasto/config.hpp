#pragma once

#include <string>
#include <string_view>

#include "elasto/discretization.hpp"
#include "elasto/initial_data.hpp"
#include "elasto/state.hpp"

namespace elasto {

struct RunConfig {
  GridSpec grid;
  SimParams params;
  InitialData initial;
  int output_every = 10;
  std::string out_dir = "out";
  /// 0 disables checkpoints.
  int checkpoint_every = 0;
  /// Nonzero replaces the CFL step.
  double fixed_dt = 0.0;

  /// Throws ValidationError naming the offending key.
  void validate() const;
};

/// Line-oriented `key = value` text with `#` comments. Unknown keys and
/// malformed values raise ParseError with the line number; out-of-range
/// values raise ValidationError with the key name.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Text that parse_config maps back to the same configuration.
std::string format_config(const RunConfig& config);

}  // namespace elasto
