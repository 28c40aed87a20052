#ifndef OPTTOPO_ERRORS_HPP
#define OPTTOPO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opttopo {

enum class ErrorCode {
    FileIo,
    ParseError,
    VersionMismatch,
    MissingInput,
    OutOfBounds,
    ZeroEffort,
    BadStepCount,
    BadStepSize,
    UnboundedDimension,
    DegenerateInterval,
    UnknownDimension,
    DuplicateDimension,
    BadModel,
    CycleDetected,
    DanglingFlow,
    Orphan,
    MultipleSinks,
    UnsupportedSplit,
    MissingWeight,
    Infeasible,
    EmptyTable,
    EmptyColumn,
    InsufficientRows,
    RankDeficient,
    CapExceeded,
    BadArgument,
};

const char* error_code_name(ErrorCode code);

/// Exit status used by the CLI for this error class; one distinct code per class.
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

} // namespace opttopo

#endif
