#pragma once

#include <stdexcept>
#include <string>

namespace critfan {

// Base class for all structured failures.  code() is the stable identifier
// used in CLI error output and tests; what() carries the human detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define CRITFAN_DEFINE_ERROR(Name)                       \
  class Name : public Error {                            \
   public:                                               \
    explicit Name(const std::string& detail)             \
        : Error(#Name, detail) {}                        \
  }

CRITFAN_DEFINE_ERROR(DimensionMismatch);
CRITFAN_DEFINE_ERROR(PointednessViolation);
CRITFAN_DEFINE_ERROR(NotInFan);
CRITFAN_DEFINE_ERROR(DeltaTooLarge);
CRITFAN_DEFINE_ERROR(RefinementObstruction);
CRITFAN_DEFINE_ERROR(UnsupportedGroup);
CRITFAN_DEFINE_ERROR(MixedSign);
CRITFAN_DEFINE_ERROR(CentralTorusActsTrivially);
CRITFAN_DEFINE_ERROR(IrregularKernel);
CRITFAN_DEFINE_ERROR(OutsideSupport);
CRITFAN_DEFINE_ERROR(OutsideRelint);
CRITFAN_DEFINE_ERROR(CriticalExponent);
CRITFAN_DEFINE_ERROR(QuadratureFailure);
CRITFAN_DEFINE_ERROR(Overflow);
CRITFAN_DEFINE_ERROR(GridTooShort);
CRITFAN_DEFINE_ERROR(UnsupportedForSimulation);
CRITFAN_DEFINE_ERROR(InvalidSpecFile);

#undef CRITFAN_DEFINE_ERROR

}  // namespace critfan
