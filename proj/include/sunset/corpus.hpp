#pragma once

// Documents, query/summary/evidence tuples and the training examples built
// from them. JSON Lines is the on-disk format throughout; field order is
// fixed so that re-saving a loaded corpus reproduces it byte for byte.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace sunset::corpus {

struct OutlineSection {
    std::string name;
    std::string sketch;
    friend bool operator==(const OutlineSection&, const OutlineSection&) = default;
};

struct Outline {
    std::string title;
    std::vector<OutlineSection> sections;
    friend bool operator==(const Outline&, const Outline&) = default;
};

struct Document {
    std::string id;
    std::string title;
    Outline outline;
    std::vector<std::string> sections;  // parallel to outline.sections
    friend bool operator==(const Document&, const Document&) = default;
};

struct QseTuple {
    std::string document_id;
    std::string question;
    std::string summary;
    std::vector<std::string> evidence;
    std::vector<int> evidence_sections;  // 1-based section of each evidence item
    bool validated = false;
    friend bool operator==(const QseTuple&, const QseTuple&) = default;
};

struct Corpus {
    std::vector<Document> documents;
    std::vector<QseTuple> tuples;
};

inline constexpr std::string_view kDocumentsFile = "documents.jsonl";
inline constexpr std::string_view kTuplesFile = "tuples.jsonl";
inline constexpr std::string_view kSectionSeparator = "\n\n";

nlohmann::ordered_json to_json(const Document& doc);
nlohmann::ordered_json to_json(const QseTuple& tuple);
Document document_from_json(const nlohmann::json& j);
QseTuple tuple_from_json(const nlohmann::json& j);

/// One compact JSON value per line, UTF-8 kept as is.
std::string to_line(const nlohmann::ordered_json& j);

/// Parse a JSON Lines file. Blank lines are skipped; a malformed line throws
/// SchemaError naming the file and line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// documents.jsonl + tuples.jsonl inside dir.
Corpus load(const std::filesystem::path& dir);
void save(const Corpus& corpus, const std::filesystem::path& dir);

/// Sections joined by kSectionSeparator.
std::string concatenate(const Document& doc);

/// Sections (and the outline entries with them) permuted by a seeded
/// Fisher-Yates shuffle. Different documents get different permutations
/// under the same seed. The id gains the suffix "#shuffle-<seed>".
Document shuffle_sections(const Document& doc, std::uint64_t seed);

/// Document-level split: holdout gets n documents drawn by seed, train the
/// rest, each keeping corpus order, tuples following their document.
/// Throws HoldoutTooLarge unless n < number of documents.
std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, std::size_t n, std::uint64_t seed);

struct TrainingMeta {
    std::string document_id;
    bool shuffled = false;
    std::uint64_t seed = 0;
};

struct TrainingExample {
    std::string prompt;
    std::string target;
    TrainingMeta meta;
};

nlohmann::ordered_json to_json(const TrainingExample& example);
TrainingExample example_from_json(const nlohmann::json& j);

/// "EVIDENCE:\n[1] e1\n...\nRESPONSE:\n<summary>"
std::string format_target(const std::vector<std::string>& evidence, std::string_view summary);

/// One example per tuple, in corpus order. Tuples whose document is missing
/// throw SchemaError.
std::vector<TrainingExample> export_training(const Corpus& corpus, bool shuffled, std::uint64_t seed);

/// Query record consumed by inference and evaluation.
struct QuestionRecord {
    std::string question_id;
    std::string context_id;
    std::string question;
    std::string reference_summary;
    std::vector<std::string> reference_evidence;
};

nlohmann::ordered_json to_json(const QuestionRecord& q);
QuestionRecord question_from_json(const nlohmann::json& j);

/// Writes questions.jsonl and docs/<context_id>.txt under dir.
void export_eval_set(const Corpus& corpus, bool shuffled, std::uint64_t seed,
                     const std::filesystem::path& dir);

}  // namespace sunset::corpus
