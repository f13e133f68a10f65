#include "safe_field/errors.hpp"

namespace safe_field {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvexInput: return "NonConvexInput";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::UnboundedPolytope: return "UnboundedPolytope";
    case ErrorKind::DisconnectedFreeSpace: return "DisconnectedFreeSpace";
    case ErrorKind::NoPath: return "NoPath";
    case ErrorKind::GoalNotVertex: return "GoalNotVertex";
    case ErrorKind::LandmarkOutOfView: return "LandmarkOutOfView";
    case ErrorKind::LandmarkNotVisible: return "LandmarkNotVisible";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SynthesisInfeasible: return "SynthesisInfeasible";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::GoalObservationOffGrid: return "GoalObservationOffGrid";
    case ErrorKind::InfeasibleMeasurementSet: return "InfeasibleMeasurementSet";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SafetyViolation: return "SafetyViolation";
    case ErrorKind::LeftFreeSpace: return "LeftFreeSpace";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace safe_field
