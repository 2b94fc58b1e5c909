#pragma once

#include <exception>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elasto/config.hpp"

namespace elasto {

/// Process exit codes, one per error class.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitInvertibility = 3,
  kExitNonFinite = 4,
  kExitNewton = 5,
  kExitInsufficientData = 6,
  kExitCheckFailed = 7,
};

/// Maps an exception to its exit code.
int exit_code_for(const std::exception& e);

/// Runs `body`, printing any error to `err` and returning its exit code.
int guarded(const std::function<int()>& body, std::ostream& err);

/// Integrates the configured run, writing series.csv, manifest.json and
/// checkpoints into config.out_dir.
int cmd_run(const RunConfig& config, std::ostream& out);

struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  /// Residual on the doubled grid (fd2) or with half the step (jacobi).
  std::optional<double> refined;
  double tolerance = 0.0;
  bool pass = false;

  std::optional<double> ratio() const {
    if (!refined || *refined == 0.0) return std::nullopt;
    return residual / *refined;
  }
};

/// Residual checks of the geometric identities on the configured initial
/// data. Spectral grids compare max residuals against an absolute
/// tolerance; fd2 grids and the time-derivative identity are judged by the
/// error ratio under refinement.
std::vector<IdentityCheck> identity_suite(const RunConfig& config);
int cmd_verify_identities(const RunConfig& config, std::ostream& out);

int cmd_fit(const std::string& series_path, const std::string& quantity,
            std::optional<std::pair<double, double>> window, std::ostream& out);

/// Restores the checkpoint, integrates forward to each requested time and
/// writes a snapshot CSV plus a bound-ratio table per time into out_dir.
int cmd_reconstruct(const std::string& checkpoint_path, std::vector<double> times,
                    const std::string& out_dir, std::ostream& out);

/// "1,5,10" -> {1, 5, 10}; throws ValidationError.
std::vector<double> parse_time_list(const std::string& text);

}  // namespace elasto
