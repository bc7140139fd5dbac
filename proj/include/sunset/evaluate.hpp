#pragma once

// Measurement suite: autorater scores, citation precision/recall/F1, copy
// accuracy, evidence-position histograms, bootstrap intervals, correlation,
// and the run report that ties them together.

#include "sunset/embedder.hpp"
#include "sunset/llm_client.hpp"
#include "sunset/summarize.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sunset::evaluate {

enum class Dimension { Relevance, Consistency };

std::string_view to_string(Dimension d) noexcept;

struct RaterScore {
    Dimension dimension = Dimension::Relevance;
    int raw = 1;
    double normalized = 0.0;
};

/// (raw - 1) / 4 * 100.
double normalize_score(int raw);

/// First integer in the reply that lies in [1, 5].
std::optional<int> parse_score(std::string_view reply);

/// The rubric prompt, with every mention of the query removed when there is
/// none.
std::string rater_prompt(std::string_view source, std::string_view target, std::optional<std::string_view> query,
                         Dimension dimension);

using Rater = std::function<RaterScore(std::string_view source, std::string_view target,
                                       std::optional<std::string_view> query, Dimension dimension)>;

struct RaterOptions {
    double temperature = 0.0;
    int max_tokens = 16;
    std::string model;  // empty: the client's chat model
};

/// Asks once, re-asks once on an unparseable reply, then throws
/// UnparseableScore.
RaterScore rate(llm::Client& client, std::string_view source, std::string_view target,
                std::optional<std::string_view> query, Dimension dimension, const RaterOptions& options = {});

Rater llm_rater(llm::Client& client, RaterOptions options = {});

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// precision = S / n_citations, recall = S / n_sentences, harmonic f1;
/// zero where a denominator is zero.
Prf prf1(double score_sum, std::size_t n_citations, std::size_t n_sentences);

struct CitationReport {
    Dimension dimension = Dimension::Relevance;
    Prf prf;
    std::size_t n_citations = 0;
    std::size_t n_sentences = 0;
    std::size_t n_out_of_range = 0;
    /// Normalized score of every citation in reading order.
    std::vector<double> citation_scores;
    /// Citation count and score sum per sentence.
    std::vector<std::pair<std::size_t, double>> sentences;
    Interval precision_ci, recall_ci, f1_ci;
};

struct BootstrapOptions {
    std::size_t resamples = 10'000;
    std::uint64_t seed = 0;
};

/// Every (sentence, cited evidence) pair is rated with the evidence as the
/// source, the sentence (markers removed) as the target and no query.
/// Out-of-range citations score 0 and still count. Intervals resample
/// sentences.
CitationReport citation_prf1(std::string_view summary, const std::vector<std::string>& evidence,
                             const Rater& rater, Dimension dimension, const BootstrapOptions& boot = {});

struct CopyAccuracyRow {
    double exact_rate = 0.0;       // percent
    double half_match_rate = 0.0;  // percent
    std::size_t n_evidence = 0;
    bool undefined = false;  // no evidence at all; rates reported as 0
};

struct EvidenceSet {
    std::vector<std::string> evidence;
    std::string context;
};

CopyAccuracyRow copy_accuracy(const std::vector<EvidenceSet>& items, double threshold = 0.5);

struct PositionHistogram {
    std::size_t bin_count = 10;
    std::vector<std::size_t> counts;
    std::size_t total_matched = 0;
    std::size_t total_unmatched = 0;
};

/// Equal-width bin of a relative position in [0, 1]; 1.0 lands in the last.
std::size_t bin_of(double position, std::size_t bins);

PositionHistogram histogram_of(const std::vector<double>& positions, std::size_t bins);

PositionHistogram position_histogram(const std::vector<EvidenceSet>& items, std::size_t bins = 10,
                                     double threshold = 0.5);

struct ReferenceSet {
    std::string reference_summary;
    std::string context;
};

PositionHistogram reference_histogram(const std::vector<ReferenceSet>& items, const Embedder& embedder,
                                      std::size_t bins = 10);

/// Percentile bootstrap of the mean (2.5th and 97.5th percentiles, linear
/// interpolation between order statistics). Throws EmptySamples.
Interval bootstrap_ci(const std::vector<double>& samples, std::size_t resamples = 10'000, std::uint64_t seed = 0);

/// Throws DegenerateInput for unequal or short inputs or zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& xs);

struct EvalOptions {
    double overlap_threshold = 0.5;
    std::size_t bins = 10;
    BootstrapOptions bootstrap;
    /// With a rater: whole-response relevance/consistency and citation P/R/F1.
    std::optional<Rater> rater;
    /// With an embedder and references: the reference-location histogram.
    std::optional<Embedder> embedder;
};

struct EvalInputs {
    std::vector<summarize::InferRecord> records;
    std::map<std::string, std::string, std::less<>> contexts;    // context_id -> text
    std::map<std::string, std::string, std::less<>> references;  // question_id -> reference summary
};

/// Report for one run: a JSON document whose field order is fixed, so a
/// deterministic rater gives byte-identical output.
nlohmann::ordered_json evaluate_run(const EvalInputs& inputs, const EvalOptions& options);

std::string markdown_summary(const nlohmann::ordered_json& report);

/// bin_lo,bin_hi,count rows.
std::string histogram_csv(const nlohmann::ordered_json& histogram);

/// Writes report.json, report.md and histogram.csv (reference_histogram.csv
/// when present). Returns the files written.
std::vector<std::filesystem::path> write_report(const nlohmann::ordered_json& report,
                                                const std::filesystem::path& dir);

/// Side-by-side Markdown table of several reports.
std::string compare_reports(const std::vector<std::pair<std::string, nlohmann::ordered_json>>& reports);

/// Pearson correlation of per-question whole-response scores between two
/// reports on the same questions, for each dimension both carry.
nlohmann::ordered_json correlate_reports(const nlohmann::ordered_json& a, const nlohmann::ordered_json& b);

}  // namespace sunset::evaluate
