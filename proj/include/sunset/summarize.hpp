#pragma once

// Evidence-extracting inference: prompt construction, output parsing with
// re-sampling, and chunked divide-and-conquer summarization for contexts
// longer than the model window.

#include "sunset/llm_client.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sunset::summarize {

/// Per single model call.
inline constexpr std::size_t kMaxEvidence = 10;

struct SummaryOutput {
    std::vector<std::string> evidence;
    std::string response;  // [k] markers all within [1, evidence.size()]
    int attempts_used = 0;
    bool chunked = false;
    bool degraded = false;
    /// k of every marker dropped by the sanitizer, any stage.
    std::vector<std::size_t> stripped_citations;
    std::size_t evidence_truncated = 0;
};

std::string build_prompt(std::string_view question, std::string_view context);

struct Parsed {
    std::vector<std::string> evidence;
    std::string response;
};

/// Splits at the first line starting with "EVIDENCE:" and the first later
/// line starting with "RESPONSE:" (case-insensitive). Evidence lines lose a
/// leading "[k]"; lines without one are numbered by position.
/// Throws Misformatted.
Parsed parse_output(std::string_view raw);

struct GenerateOptions {
    int max_attempts = 5;
    double temperature = llm::kDefaultTemperature;
    double top_p = llm::kDefaultTopP;
    int max_tokens = llm::kDefaultMaxTokens;
};

/// Re-samples until the reply parses. After max_attempts misformatted
/// replies the last one becomes the response, evidence empty, degraded set.
SummaryOutput generate(std::string_view question, std::string_view context, llm::Client& client,
                       const GenerateOptions& options = {});

using TokenCounter = std::function<std::size_t(std::string_view)>;

/// ceil(chars / chars_per_token), chars counted as code points.
TokenCounter char_ratio_counter(double chars_per_token = 4.0);

/// Pieces whose concatenation is context, each within max_tokens by counter.
/// Cuts prefer blank lines, then line breaks, then whitespace; a piece with
/// none of those is cut at a code point boundary.
std::vector<std::string> chunk_context(std::string_view context, std::size_t max_tokens,
                                       const TokenCounter& counter);

struct LongOptions {
    std::size_t window_tokens = 128'000;
    double margin = 0.10;
    TokenCounter counter = char_ratio_counter();
    GenerateOptions generate;
    bool parallel_chunks = false;
};

/// Context token budget left once the prompt around it and the margin are
/// taken out of the window.
std::size_t context_budget(std::string_view question, const LongOptions& options);

/// generate() when the context fits; otherwise one generate() per chunk,
/// chunk citations shifted by the evidence count of earlier chunks, and a
/// combination call over the shifted summaries and the merged evidence.
SummaryOutput summarize_long(std::string_view question, std::string_view context, llm::Client& client,
                             const LongOptions& options = {});

/// One line of an inference run file.
struct InferRecord {
    std::string question_id;
    std::string context_id;
    std::string question;
    std::vector<std::string> evidence;
    std::string response;
    bool chunked = false;
    int attempts = 0;
    bool degraded = false;
};

InferRecord make_record(std::string question_id, std::string context_id, std::string question,
                        const SummaryOutput& out);
nlohmann::ordered_json to_json(const InferRecord& r);
/// Throws SchemaError.
InferRecord record_from_json(const nlohmann::json& j);

}  // namespace sunset::summarize
