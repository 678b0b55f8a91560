#ifndef SPECTATOR_ERRORS_H
#define SPECTATOR_ERRORS_H

#include <stdexcept>
#include <string>

namespace spectator {

enum class ErrorKind {
    InvalidArgument,
    InvalidAxis,
    Domain,
    RunawayParameter,
    DegenerateMeasurement,
    TallyCorruption,
    InvalidTarget,
    InfeasibleBudget,
    DegenerateCurvature,
    Config,
    Io,
};

/// Single exception type for the library; `kind` drives the C API status codes.
class SimError : public std::runtime_error {
   public:
    SimError(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

   private:
    ErrorKind kind_;
};

}  // namespace spectator

#endif
