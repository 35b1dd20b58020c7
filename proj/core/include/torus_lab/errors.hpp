#pragma once

#include <stdexcept>
#include <string>

namespace torus_lab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TORUS_LAB_ERROR(Name)             \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

TORUS_LAB_ERROR(InvalidArgument);
TORUS_LAB_ERROR(InvalidMap);
TORUS_LAB_ERROR(NonConvergence);
TORUS_LAB_ERROR(InvalidCone);
TORUS_LAB_ERROR(ZeroVector);
TORUS_LAB_ERROR(EnumerationTooLarge);
TORUS_LAB_ERROR(ResolutionTooCoarse);
TORUS_LAB_ERROR(ConeExit);
TORUS_LAB_ERROR(ContractionFailure);
TORUS_LAB_ERROR(HypothesisViolated);
TORUS_LAB_ERROR(ConfigInvalid);
TORUS_LAB_ERROR(NewtonDivergence);

#undef TORUS_LAB_ERROR

}  // namespace torus_lab
