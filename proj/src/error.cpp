#include "osfs/error.hpp"

namespace osfs {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownTargetColumn: return "UnknownTargetColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateGraph: return "DegenerateGraph";
    case ErrorCode::MissingTargets: return "MissingTargets";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::FedAfterDone: return "FedAfterDone";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroMeanTarget: return "ZeroMeanTarget";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

} // namespace osfs
