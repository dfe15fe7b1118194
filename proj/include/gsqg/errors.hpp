#pragma once

#include <stdexcept>
#include <string>

namespace gsqg {

/// Invalid or incomplete configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Machine-readable description of why a run stopped.
struct AbortRecord {
  enum class Reason { kCflViolation, kNonFinite, kBlowUp };
  Reason reason = Reason::kNonFinite;
  double t = 0.0;
  long long step_index = 0;
  double value = 0.0;  // offending CFL number or coefficient magnitude
  double limit = 0.0;
};

const char* to_string(AbortRecord::Reason r);

/// A run was aborted by the CFL check or the blow-up guard (CLI exit code 3).
class NumericalAbort : public std::runtime_error {
 public:
  explicit NumericalAbort(AbortRecord record);
  [[nodiscard]] const AbortRecord& record() const { return record_; }

 private:
  AbortRecord record_;
};

}  // namespace gsqg
