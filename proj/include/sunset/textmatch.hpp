#pragma once

// Measurement substrate for evidence copy fidelity and position analysis:
// text normalization, sentence segmentation, longest-common-substring
// matching and relative-position computation.
//
// Offsets and lengths reported by the matching functions count Unicode code
// points of the *normalized* text.

#include "sunset/embedder.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sunset::textmatch {

/// Bumped whenever normalize() changes behaviour; recorded in reports.
inline constexpr std::string_view kNormalizationVersion = "nfkc-ascii-punct-ws1";

inline constexpr double kDefaultOverlapThreshold = 0.5;

/// NFKC, typographic quotes/dashes folded to ASCII, every whitespace run
/// collapsed to one space, leading/trailing whitespace removed. Case is kept.
/// Idempotent.
std::string normalize(std::string_view text);

struct Sentence {
    std::string text;
    std::size_t offset = 0;  // byte offset into the input
};

/// Rule-based splitter: a boundary is [.?!] (plus trailing closers) followed
/// by whitespace and an uppercase letter or opening quote, unless the token
/// before the period is a known abbreviation or a single-letter initial.
/// Blank lines are boundaries too. Sentences carry no surrounding whitespace,
/// so the gaps between them are pure whitespace.
std::vector<Sentence> split_sentences(std::string_view text);

struct LcsResult {
    std::size_t length = 0;
    std::size_t offset_a = 0;
    std::size_t offset_b = 0;

    friend bool operator==(const LcsResult&, const LcsResult&) = default;
};

/// Suffix automaton over a fixed text. Built in linear time; each query walks
/// the other string once.
class SuffixAutomaton {
public:
    explicit SuffixAutomaton(std::u32string_view text);

    /// Longest common substring of query and the indexed text. Ties go to the
    /// smallest offset in the indexed text, then the smallest query offset.
    /// offset_a refers to query, offset_b to the indexed text.
    [[nodiscard]] LcsResult longest_common_substring(std::u32string_view query) const;

    [[nodiscard]] std::size_t state_count() const noexcept { return states_.size(); }

private:
    struct Edge {
        char32_t symbol;
        std::int32_t target;
    };
    struct State {
        std::int32_t len = 0;
        std::int32_t link = -1;
        std::int32_t first_end = -1;
        std::vector<Edge> edges;
    };

    [[nodiscard]] std::int32_t next(std::int32_t state, char32_t c) const noexcept;
    void set_edge(std::int32_t state, char32_t c, std::int32_t target);
    void extend(char32_t c, std::int32_t position);

    std::vector<State> states_;
    std::int32_t last_ = 0;
};

/// (length, offset_in_a, offset_in_b) over code points.
LcsResult longest_common_substring(std::u32string_view a, std::u32string_view b);
LcsResult longest_common_substring(std::string_view a, std::string_view b);

struct EvidenceMatch {
    std::size_t evidence_norm_len = 0;
    std::size_t lcs_len = 0;
    double overlap = 0.0;
    bool exact = false;
    std::size_t context_offset = 0;
    /// Matched-span midpoint over normalized context length; empty when the
    /// overlap is below the threshold.
    std::optional<double> relative_position;

    [[nodiscard]] bool matched() const noexcept { return relative_position.has_value(); }
};

/// A normalized context prepared for repeated evidence lookups. The suffix
/// automaton is built on first inexact lookup.
class ContextIndex {
public:
    explicit ContextIndex(std::string_view context);

    [[nodiscard]] EvidenceMatch match(std::string_view evidence,
                                      double threshold = kDefaultOverlapThreshold) const;

    /// Exact (normalized) containment test.
    [[nodiscard]] bool contains(std::string_view evidence) const;

    [[nodiscard]] const std::string& normalized() const noexcept { return normalized_; }
    [[nodiscard]] std::size_t length() const noexcept { return length_; }

    /// Longest common substring of text (normalized first) and the context,
    /// returned as normalized-context text. Empty when nothing is shared.
    [[nodiscard]] std::string longest_shared_passage(std::string_view text) const;

private:
    const SuffixAutomaton& automaton() const;

    std::string normalized_;
    std::u32string code_points_;
    std::size_t length_ = 0;
    mutable std::optional<SuffixAutomaton> automaton_;
};

/// Normalizes both sides and locates evidence in context.
/// Throws EmptyEvidence when the evidence normalizes to nothing.
EvidenceMatch match_evidence(std::string_view evidence, std::string_view context,
                             double threshold = kDefaultOverlapThreshold);

/// Relative position of every sentence of the normalized context
/// (sentence midpoint over normalized length).
std::vector<double> sentence_positions(std::string_view normalized_context,
                                       const std::vector<Sentence>& sentences);

/// For each reference sentence, the relative position of the context
/// sentence with the highest embedding cosine (earliest wins ties).
/// The embedder is called once with the context sentences followed by the
/// reference sentences.
std::vector<double> locate_reference_sentences(std::string_view reference_summary,
                                               std::string_view context,
                                               const Embedder& embedder);

}  // namespace sunset::textmatch
