#pragma once

#include <stdexcept>
#include <string>

namespace modop {

// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MODOP_DECLARE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

MODOP_DECLARE_ERROR(ShapeMismatch);
MODOP_DECLARE_ERROR(InvalidShape);
MODOP_DECLARE_ERROR(NotHermitian);
MODOP_DECLARE_ERROR(NotPositive);
MODOP_DECLARE_ERROR(SingularMatrix);
MODOP_DECLARE_ERROR(NoConvergence);
MODOP_DECLARE_ERROR(StructureViolation);
MODOP_DECLARE_ERROR(PreconditionFailed);
MODOP_DECLARE_ERROR(TransformSingular);
MODOP_DECLARE_ERROR(ConfigInvalid);
MODOP_DECLARE_ERROR(FormatError);

#undef MODOP_DECLARE_ERROR

}  // namespace modop
