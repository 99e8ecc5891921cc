#include "cvs/error.hpp"

namespace cvs {

const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::IoFailure: return "IoFailure";
    case Errc::MalformedPgm: return "MalformedPgm";
    case Errc::UnknownClassId: return "UnknownClassId";
    case Errc::PaletteMismatch: return "PaletteMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateCluster: return "DegenerateCluster";
    case Errc::RayMiss: return "RayMiss";
    case Errc::EmptySet: return "EmptySet";
    case Errc::InvalidRegion: return "InvalidRegion";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MissingTruth: return "MissingTruth";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvariantViolation: return "InvariantViolation";
    }
    return "UnknownError";
}

bool errc_is_input_error(Errc code) noexcept {
    return code != Errc::InvariantViolation;
}

} // namespace cvs
