#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sunset {

enum class ErrorCode {
    InvalidArgument,
    Io,
    // llm_client
    ExhaustedRetries,
    MalformedResponse,
    AuthError,
    RequestRejected,
    DimensionMismatch,
    MockExhausted,
    // genpipe
    EmptyBatch,
    ParseFailure,
    WrongSectionCount,
    WrongCount,
    LengthMismatch,
    SectionEmpty,
    CheckpointCorrupt,
    Interrupted,
    // corpus
    HoldoutTooLarge,
    SchemaError,
    // textmatch
    EmptyEvidence,
    // summarize
    Misformatted,
    ChunkOverflow,
    // evaluate
    UnparseableScore,
    EmptySamples,
    DegenerateInput,
    // diversity
    TooFewTexts,
    CorpusTooSmall,
    // cli
    DigestMismatch,
};

/// Stable machine-readable name, e.g. "ExhaustedRetries".
std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace sunset
