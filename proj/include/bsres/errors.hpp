#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace bsres {

// Error categories map onto the CLI exit codes: validation -> 2,
// numerical budget -> 3, failed mathematical check -> 4.
enum class ErrorKind {
    Invalid = 1,
    Validation = 2,
    Numerical = 3,
    CheckFailed = 4,
    Io = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)) {}
    ErrorKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    ErrorKind kind_;
    std::string name_;
};

#define BSRES_DEFINE_ERROR(Name, Kind)                                        \
    struct Name : Error {                                                     \
        explicit Name(const std::string& what) : Error(Kind, #Name, what) {}  \
    };

BSRES_DEFINE_ERROR(InvalidArgument, ErrorKind::Invalid)
BSRES_DEFINE_ERROR(ValidationError, ErrorKind::Validation)
BSRES_DEFINE_ERROR(UnsupportedField, ErrorKind::Validation)
BSRES_DEFINE_ERROR(FlavorError, ErrorKind::Validation)
BSRES_DEFINE_ERROR(ConfigError, ErrorKind::Validation)
BSRES_DEFINE_ERROR(IntegrationFailure, ErrorKind::Numerical)
BSRES_DEFINE_ERROR(OutOfAsymptoticRange, ErrorKind::Invalid)
BSRES_DEFINE_ERROR(FitRangeError, ErrorKind::Numerical)
BSRES_DEFINE_ERROR(TruncationError, ErrorKind::Numerical)
BSRES_DEFINE_ERROR(ThresholdSingularity, ErrorKind::Invalid)
BSRES_DEFINE_ERROR(OutsideContinuationStrip, ErrorKind::Invalid)
BSRES_DEFINE_ERROR(OutsideDisk, ErrorKind::Invalid)
BSRES_DEFINE_ERROR(MapPole, ErrorKind::Invalid)
BSRES_DEFINE_ERROR(SingularAtNode, ErrorKind::Numerical)
BSRES_DEFINE_ERROR(ContourTooClose, ErrorKind::Numerical)
BSRES_DEFINE_ERROR(SubdivisionBudget, ErrorKind::Numerical)
BSRES_DEFINE_ERROR(MissingArtifact, ErrorKind::Io)
BSRES_DEFINE_ERROR(IoError, ErrorKind::Io)

#undef BSRES_DEFINE_ERROR

// number formatting for messages
inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace bsres
