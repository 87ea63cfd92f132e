#ifndef OSFS_ERROR_HPP
#define OSFS_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace osfs {

enum class ErrorCode {
    MissingFile,
    MalformedRow,
    UnknownTargetColumn,
    NonNumericCell,
    EmptyMatrix,
    OutOfRange,
    DegenerateGraph,
    MissingTargets,
    TooFewSamples,
    DimensionMismatch,
    SizeMismatch,
    EmptySet,
    FedAfterDone,
    InsufficientSamples,
    LengthMismatch,
    ZeroMeanTarget,
    InvalidSpec,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library. The code is the stable part; the
// message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::size_t line = 0)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), line_(line)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    // 1-based input line for parse errors, 0 otherwise.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::size_t line_;
};

} // namespace osfs

#endif // OSFS_ERROR_HPP
