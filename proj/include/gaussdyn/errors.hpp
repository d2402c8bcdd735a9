#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gaussdyn {

/// Base error carrying a stable machine-readable name alongside the message.
/// The CLI serializes `name()` into its error JSON, so names must not change.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(message), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define GAUSSDYN_DEFINE_ERROR(NAME)                         \
  struct NAME : Error {                                     \
    explicit NAME(const std::string& message)               \
        : Error(#NAME, message) {}                          \
  }

GAUSSDYN_DEFINE_ERROR(DimensionMismatch);
GAUSSDYN_DEFINE_ERROR(NonPositiveFrequency);
GAUSSDYN_DEFINE_ERROR(NonIntegrableParams);
GAUSSDYN_DEFINE_ERROR(NonPhysicalState);
GAUSSDYN_DEFINE_ERROR(NonZeroMeans);
GAUSSDYN_DEFINE_ERROR(SingularParameterMap);
GAUSSDYN_DEFINE_ERROR(StepSizeUnderflow);
GAUSSDYN_DEFINE_ERROR(NonSymplecticFrame);
GAUSSDYN_DEFINE_ERROR(SingularDenominator);
GAUSSDYN_DEFINE_ERROR(CausticSingularity);
GAUSSDYN_DEFINE_ERROR(UnphysicalC);
GAUSSDYN_DEFINE_ERROR(ZeroOmega1);
GAUSSDYN_DEFINE_ERROR(NonSymmetricB);
GAUSSDYN_DEFINE_ERROR(DegenerateFrame);
GAUSSDYN_DEFINE_ERROR(QuadratureNotConverged);
GAUSSDYN_DEFINE_ERROR(ScenarioParseError);

#undef GAUSSDYN_DEFINE_ERROR

}  // namespace gaussdyn
