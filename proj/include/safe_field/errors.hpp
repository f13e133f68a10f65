#pragma once

#include <stdexcept>
#include <string>

namespace safe_field {

enum class ErrorKind {
  NonConvexInput,
  DegenerateInput,
  UnboundedPolytope,
  DisconnectedFreeSpace,
  NoPath,
  GoalNotVertex,
  LandmarkOutOfView,
  LandmarkNotVisible,
  DimensionMismatch,
  SynthesisInfeasible,
  SolverFailure,
  NumericalFailure,
  GoalObservationOffGrid,
  InfeasibleMeasurementSet,
  VerificationFailed,
  GridMismatch,
  SafetyViolation,
  LeftFreeSpace,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace safe_field
