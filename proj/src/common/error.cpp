#include "sunset/error.hpp"

namespace sunset {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RequestRejected: return "RequestRejected";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MockExhausted: return "MockExhausted";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::WrongSectionCount: return "WrongSectionCount";
    case ErrorCode::WrongCount: return "WrongCount";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SectionEmpty: return "SectionEmpty";
    case ErrorCode::CheckpointCorrupt: return "CheckpointCorrupt";
    case ErrorCode::Interrupted: return "Interrupted";
    case ErrorCode::HoldoutTooLarge: return "HoldoutTooLarge";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EmptyEvidence: return "EmptyEvidence";
    case ErrorCode::Misformatted: return "Misformatted";
    case ErrorCode::ChunkOverflow: return "ChunkOverflow";
    case ErrorCode::UnparseableScore: return "UnparseableScore";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TooFewTexts: return "TooFewTexts";
    case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::DigestMismatch: return "DigestMismatch";
    }
    return "Unknown";
}

}  // namespace sunset
