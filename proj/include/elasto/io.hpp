#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "elasto/config.hpp"
#include "elasto/dynamics.hpp"
#include "elasto/energy.hpp"
#include "elasto/eulerian.hpp"

namespace elasto {

inline constexpr const char* kVersionTag = "elasto 0.1.0";

/// Header row plus one row per record, columns in series_columns() order,
/// values with 17 significant digits.
void write_series_csv(std::ostream& out, const NormSeries& series);
void write_series_csv(const std::string& path, const NormSeries& series);

/// Reads back the series; throws ParseError on a malformed file.
NormSeries read_series_csv(std::istream& in);
NormSeries read_series_csv(const std::string& path);

struct Checkpoint {
  GridSpec grid;
  SimParams params;
  DeformationState state;
};

/// Binary container: 8-byte magic "ELASTOCK", a version byte, grid and
/// parameter header, then eta~ and v as little-endian float64.
void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);

struct RunManifest {
  RunConfig config;
  double t_start = 0.0;
  double t_stop = 0.0;
  RunStatus status = RunStatus::completed;
  std::optional<double> failure_time;
  std::string message;
  long steps = 0;
  std::string wall_start;
  std::string wall_end;
};

void write_manifest(const std::string& path, const RunManifest& m);
/// Returns the parsed JSON text's status field; used by tests.
std::string read_manifest_status(const std::string& path);

/// One row per query point: x, rho, u, F (row-major), preimage y.
void write_snapshot_csv(const std::string& path, const EulerianSnapshot& snap);

/// UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace elasto
