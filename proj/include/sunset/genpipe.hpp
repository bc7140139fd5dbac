#pragma once

// Six-stage inductive generation: titles, outline, queries, summaries with
// planned evidence, sections written around that evidence, then refinement,
// citation and validation of each summary.

#include "sunset/corpus.hpp"
#include "sunset/llm_client.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sunset::genpipe {

using corpus::Outline;

struct Event {
    std::string stage;
    std::string document_id;
    std::string event;
    nlohmann::ordered_json detail;
};

/// Append-only event buffer; the pipeline flushes it per document.
class EventLog {
public:
    void add(std::string stage, std::string document_id, std::string event,
             nlohmann::ordered_json detail = nlohmann::ordered_json::object());
    [[nodiscard]] const std::vector<Event>& events() const noexcept { return events_; }
    [[nodiscard]] std::size_t count(std::string_view event) const;
    std::vector<Event> take();

private:
    std::vector<Event> events_;
};

nlohmann::ordered_json to_json(const Event& e);

struct StageConfig {
    std::size_t sections = 6;
    std::size_t queries = 5;
    int parse_attempts = 5;
    int min_evidence = 5;
    int max_evidence = 10;
    double temperature = 1.0;
    double title_temperature = 1.2;
    double validation_temperature = 0.0;
};

struct DraftQse {
    std::string question;
    std::string summary;
    std::vector<std::string> evidence;
    std::vector<int> chapters;  // 1-based, parallel to evidence
};

// Reply parsing, exposed for testing.

/// Contents of the first ``` fenced block (language tag dropped), or nothing
/// when the reply has no complete fence.
std::optional<std::string> fenced_block(std::string_view reply);

/// The JSON object in a reply, tolerating a code fence, prose around the
/// object and Python literal syntax (single quotes, True/False/None,
/// trailing or missing commas). Throws ParseFailure.
nlohmann::ordered_json parse_object(std::string_view reply);

/// Non-blank lines, trimmed, with list bullets ("- ", "1. ", "2) ") and
/// wrapping quotes removed.
std::vector<std::string> parse_lines(std::string_view reply);

/// Outline from a parsed reply. Throws WrongSectionCount or ParseFailure.
Outline outline_from_json(const nlohmann::ordered_json& object, std::string title, std::size_t sections);

/// Throws LengthMismatch, or ParseFailure for a chapter outside [1, sections].
DraftQse draft_from_json(const nlohmann::ordered_json& object, std::string question, std::size_t sections);

/// "Title: ...", then one "name: sketch" line per section.
std::string render_outline(const Outline& outline);

struct Repair {
    std::string original;
    std::optional<std::string> replacement;  // empty when the passage was dropped
    std::string source;                      // "model" or "lcs"
};

struct SectionResult {
    std::string text;
    std::vector<Repair> repairs;  // one per required passage that was not verbatim
};

/// The individual stages. Each takes the document id only for logging.
class Stages {
public:
    Stages(llm::Client& client, StageConfig config, EventLog& log)
        : client_(client), config_(config), log_(log) {}

    /// Throws EmptyBatch when nothing new comes back.
    std::vector<std::string> titles(std::size_t n, const std::vector<std::string>& prev);
    Outline outline(const std::string& title, const std::string& doc_id = {});
    std::vector<std::string> queries(const Outline& outline, const std::string& doc_id = {});
    DraftQse summary_evidence(const Outline& outline, const std::string& question, int n_evidence,
                              const std::string& doc_id = {});
    SectionResult section(const Outline& outline, std::size_t index, const std::vector<std::string>& required,
                          const std::string& doc_id = {});
    /// A passage that occurs in the section; replacement is empty when
    /// nothing usable could be found.
    Repair repair(const std::string& section, const std::string& passage, const std::string& doc_id = {});
    std::string refine(const std::string& book, const std::string& question, const std::string& summary,
                       const std::vector<std::string>& passages, const std::string& doc_id = {});
    std::string citances(const std::string& summary, const std::vector<std::string>& evidence,
                         const std::string& doc_id = {});
    bool validate(const std::string& book, const std::string& question, const std::string& summary,
                  const std::string& doc_id = {});
    /// One document from the single-prompt baseline.
    corpus::Document baseline(const std::vector<std::string>& avoid, const std::string& doc_id);

    [[nodiscard]] const StageConfig& config() const noexcept { return config_; }

private:
    std::string ask(const std::string& prompt, double temperature);
    template <class Parse>
    auto with_retries(const char* stage, const std::string& doc_id, const std::string& prompt,
                      double temperature, Parse parse) -> decltype(parse(std::string{}, 1));

    llm::Client& client_;
    StageConfig config_;
    EventLog& log_;
};

/// Everything one finished document contributes to the corpus.
struct DocumentResult {
    std::optional<corpus::Document> document;  // empty when the document was dropped
    std::vector<corpus::QseTuple> tuples;      // released (validated) tuples only
    std::size_t tuples_rejected = 0;           // NO verdicts
    std::size_t tuples_dropped = 0;            // hard drops before validation
};

/// Runs stages 2-6 for one title.
DocumentResult generate_document(Stages& stages, const std::string& doc_id, const std::string& title,
                                 std::uint64_t seed, EventLog& log);

struct PipelineConfig {
    std::size_t documents = 20;
    std::uint64_t seed = 0;
    StageConfig stages;
    /// Documents generated side by side. Runs against a mock script are
    /// only reproducible with 1.
    std::size_t workers = 1;
    std::filesystem::path out_dir;
    bool resume = false;
    /// Return after this many documents have been committed in this call
    /// (simulated interruption); 0 means no limit.
    std::size_t stop_after = 0;
    /// Checked at document boundaries.
    const std::atomic<bool>* stop = nullptr;
};

struct RunSummary {
    std::size_t documents_written = 0;
    std::size_t documents_dropped = 0;
    std::size_t tuples_released = 0;
    std::size_t tuples_rejected = 0;
    std::size_t tuples_dropped = 0;
    std::size_t completed = 0;  // document slots processed, across resumes
    bool interrupted = false;
};

inline constexpr std::string_view kLogFile = "pipeline_log.jsonl";
inline constexpr std::string_view kCheckpointFile = "checkpoint.json";

/// Writes documents.jsonl, tuples.jsonl, pipeline_log.jsonl and
/// checkpoint.json into config.out_dir. With resume set, continues from the
/// checkpoint there (a MockBackend is advanced past replies already used).
/// Throws AuthError, CheckpointCorrupt.
RunSummary run_pipeline(llm::Client& client, const PipelineConfig& config);

/// "doc-00001" style identifiers.
std::string document_id(std::size_t index);

/// Single-prompt baseline generator; returns one document per call made.
/// With diverse set, titles of earlier documents are listed as forbidden.
std::vector<corpus::Document> generate_baseline(llm::Client& client, std::size_t n, bool diverse,
                                                const StageConfig& config, EventLog& log);

}  // namespace sunset::genpipe
