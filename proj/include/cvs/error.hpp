#pragma once

#include <stdexcept>
#include <string>

namespace cvs {

// Failure categories surfaced to callers. The CLI maps these to process
// exit codes: input-side problems exit with 2, broken internal invariants
// with 3.
enum class Errc {
    MissingFile,
    IoFailure,
    MalformedPgm,
    UnknownClassId,
    PaletteMismatch,
    DimensionMismatch,
    ShapeMismatch,
    LengthMismatch,
    DegenerateCluster,
    RayMiss,
    EmptySet,
    InvalidRegion,
    InvalidArgument,
    MissingTruth,
    InvalidSpec,
    InvariantViolation,
};

const char* errc_name(Errc code) noexcept;

// True for error kinds caused by bad input rather than a broken invariant.
bool errc_is_input_error(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace cvs
