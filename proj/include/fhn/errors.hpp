#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration that is well-formed but not supported by a discretization.
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The tracking error reached the guard band of the performance funnel.
/// Raised from inside right-hand-side evaluations so the integrator can
/// reject the trial step; never caught silently.
class FunnelViolation : public std::runtime_error {
 public:
  FunnelViolation(double t, double error_norm, double phi, double guard_margin);

  double time() const noexcept { return t_; }
  double error_norm() const noexcept { return error_norm_; }
  double phi() const noexcept { return phi_; }
  double guard_margin() const noexcept { return guard_margin_; }

 private:
  double t_;
  double error_norm_;
  double phi_;
  double guard_margin_;
};

/// Adaptive integration gave up (too many consecutive rejections or the
/// step size fell below dt_min).
class IntegrationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The S1-S2 protocol did not leave sustained activity behind.
class ReentryNotEstablished : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed trajectory or snapshot file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration. `key` is the dotted key path, `line` is
/// 1-based (0 when the problem is not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what);

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace fhn
