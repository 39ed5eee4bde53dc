#pragma once

#include <stdexcept>
#include <string>

namespace spiralflow {

//! Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPIRALFLOW_DEFINE_ERROR(Name)      \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

SPIRALFLOW_DEFINE_ERROR(DegenerateDomain);
SPIRALFLOW_DEFINE_ERROR(HoleTooSmall);
SPIRALFLOW_DEFINE_ERROR(NotOnBoundary);
SPIRALFLOW_DEFINE_ERROR(NumericalFailure);
SPIRALFLOW_DEFINE_ERROR(SingularPoint);
SPIRALFLOW_DEFINE_ERROR(NotReady);
SPIRALFLOW_DEFINE_ERROR(Blowup);
SPIRALFLOW_DEFINE_ERROR(InsufficientData);
SPIRALFLOW_DEFINE_ERROR(HypothesisViolated);
SPIRALFLOW_DEFINE_ERROR(DegenerateLevelSet);
SPIRALFLOW_DEFINE_ERROR(UnknownScenario);
SPIRALFLOW_DEFINE_ERROR(ConfigError);
SPIRALFLOW_DEFINE_ERROR(SnapshotIOFailure);

#undef SPIRALFLOW_DEFINE_ERROR

}  // namespace spiralflow
