#include "gsqg/errors.hpp"

#include <cstdio>

namespace gsqg {

const char* to_string(AbortRecord::Reason r) {
  switch (r) {
    case AbortRecord::Reason::kCflViolation:
      return "cfl_violation";
    case AbortRecord::Reason::kNonFinite:
      return "non_finite";
    case AbortRecord::Reason::kBlowUp:
      return "blow_up";
  }
  return "unknown";
}

namespace {
std::string describe(const AbortRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "run aborted (%s) at t=%.17g step=%lld: value=%.6g limit=%.6g", to_string(r.reason), r.t,
                r.step_index, r.value, r.limit);
  return buf;
}
}  // namespace

NumericalAbort::NumericalAbort(AbortRecord record) : std::runtime_error(describe(record)), record_(record) {}

}  // namespace gsqg
