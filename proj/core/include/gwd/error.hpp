#pragma once

#include <stdexcept>
#include <string>

namespace gwd {

/// Invalid configuration, scenario, or operation preconditions. CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A solver halted: blow-up caps, non-finite values, or a corner iteration
/// that failed to converge. Carries the offending grid location. CLI exit code 2.
struct SolverFailure : std::runtime_error {
  enum class Kind { GradientBlowup, FieldCap, NonFinite, FixedPointDiverged };

  Kind kind;
  double theta = 0.0;
  double eta = 0.0;
  double v = 0.0;

  SolverFailure(Kind k, const std::string& msg, double th, double et, double vv)
      : std::runtime_error(msg), kind(k), theta(th), eta(et), v(vv) {}

  const char* kind_name() const {
    switch (kind) {
      case Kind::GradientBlowup: return "gradient-blowup";
      case Kind::FieldCap: return "field-cap";
      case Kind::NonFinite: return "non-finite";
      case Kind::FixedPointDiverged: return "fixed-point-diverged";
    }
    return "unknown";
  }
};

/// A verification run found a defect above its threshold. CLI exit code 3.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LogLevel { Off = 0, Error = 1, Info = 2, Debug = 3 };

/// Level parsed once from the GWD_LOG environment variable
/// ("off", "error", "info", "debug"; default "error").
LogLevel log_level();
bool log_enabled(LogLevel level);
void log_line(LogLevel level, const std::string& message);

}  // namespace gwd
