#pragma once

#include <stdexcept>
#include <string>

namespace ceo {

// Simulation grid or detection settings that cannot produce a faithful result.
class ConfigurationError : public std::runtime_error {
 public:
  explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

// The 10x10 response matrix was (numerically) singular at a probe point.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& probe, double omega, const std::string& what)
      : std::runtime_error(what), probe_(probe), omega_(omega) {}
  const std::string& probe() const { return probe_; }
  double omega() const { return omega_; }

 private:
  std::string probe_;
  double omega_;
};

// Time-domain state grew beyond the instability bound (e.g. Stokes case past threshold).
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace ceo
