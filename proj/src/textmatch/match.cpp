#include "sunset/textmatch.hpp"

#include "sunset/error.hpp"
#include "sunset/kernels.hpp"
#include "sunset/utf8.hpp"

namespace sunset::textmatch {

ContextIndex::ContextIndex(std::string_view context)
    : normalized_(normalize(context)),
      code_points_(utf8::decode(normalized_)),
      length_(code_points_.size()) {}

const SuffixAutomaton& ContextIndex::automaton() const {
    if (!automaton_) automaton_.emplace(code_points_);
    return *automaton_;
}

bool ContextIndex::contains(std::string_view evidence) const {
    const std::string needle = normalize(evidence);
    return !needle.empty() && kernels::find(normalized_, needle) != kernels::npos;
}

EvidenceMatch ContextIndex::match(std::string_view evidence, double threshold) const {
    const std::string needle = normalize(evidence);
    if (needle.empty()) fail(ErrorCode::EmptyEvidence, "evidence is empty after normalization");
    if (length_ == 0) fail(ErrorCode::InvalidArgument, "context is empty after normalization");

    EvidenceMatch m;
    m.evidence_norm_len = utf8::length(needle);

    if (const std::size_t at = kernels::find(normalized_, needle); at != kernels::npos) {
        m.exact = true;
        m.lcs_len = m.evidence_norm_len;
        m.overlap = 1.0;
        m.context_offset = utf8::length(std::string_view(normalized_).substr(0, at));
    } else {
        const LcsResult lcs = automaton().longest_common_substring(utf8::decode(needle));
        m.lcs_len = lcs.length;
        m.overlap = static_cast<double>(lcs.length) / static_cast<double>(m.evidence_norm_len);
        m.context_offset = lcs.offset_b;
    }
    if (m.lcs_len > 0 && m.overlap >= threshold) {
        const double midpoint =
            static_cast<double>(m.context_offset) + static_cast<double>(m.lcs_len) / 2.0;
        m.relative_position = midpoint / static_cast<double>(length_);
    }
    return m;
}

std::string ContextIndex::longest_shared_passage(std::string_view text) const {
    const std::string needle = normalize(text);
    if (needle.empty() || length_ == 0) return {};
    const LcsResult lcs = automaton().longest_common_substring(utf8::decode(needle));
    return utf8::encode(std::u32string_view(code_points_).substr(lcs.offset_b, lcs.length));
}

EvidenceMatch match_evidence(std::string_view evidence, std::string_view context, double threshold) {
    return ContextIndex(context).match(evidence, threshold);
}

std::vector<double> sentence_positions(std::string_view normalized_context,
                                       const std::vector<Sentence>& sentences) {
    std::vector<double> positions;
    positions.reserve(sentences.size());
    const auto total = static_cast<double>(utf8::length(normalized_context));
    for (const Sentence& s : sentences) {
        const auto start = static_cast<double>(utf8::length(normalized_context.substr(0, s.offset)));
        const auto len = static_cast<double>(utf8::length(s.text));
        positions.push_back(total > 0 ? (start + len / 2.0) / total : 0.0);
    }
    return positions;
}

std::vector<double> locate_reference_sentences(std::string_view reference_summary,
                                               std::string_view context,
                                               const Embedder& embedder) {
    const std::string norm_context = normalize(context);
    const std::vector<Sentence> context_sentences = split_sentences(norm_context);
    const std::vector<Sentence> reference_sentences = split_sentences(normalize(reference_summary));
    if (reference_sentences.empty() || context_sentences.empty()) return {};

    std::vector<std::string> batch;
    batch.reserve(context_sentences.size() + reference_sentences.size());
    for (const auto& s : context_sentences) batch.push_back(s.text);
    for (const auto& s : reference_sentences) batch.push_back(s.text);

    const std::vector<Embedding> vectors = embedder(batch);
    if (vectors.size() != batch.size()) {
        fail(ErrorCode::DimensionMismatch, "embedder returned " + std::to_string(vectors.size()) +
                                               " vectors for " + std::to_string(batch.size()) + " texts");
    }

    const std::vector<double> positions = sentence_positions(norm_context, context_sentences);
    const std::size_t n_ctx = context_sentences.size();
    std::vector<double> out;
    out.reserve(reference_sentences.size());
    for (std::size_t r = 0; r < reference_sentences.size(); ++r) {
        const Embedding& ref = vectors[n_ctx + r];
        std::size_t best = 0;
        double best_sim = -2.0;
        for (std::size_t c = 0; c < n_ctx; ++c) {
            if (vectors[c].size() != ref.size()) {
                fail(ErrorCode::DimensionMismatch, "embedding dimensions differ");
            }
            const double sim = kernels::cosine(vectors[c], ref);
            if (sim > best_sim) {
                best_sim = sim;
                best = c;
            }
        }
        out.push_back(positions[best]);
    }
    return out;
}

}  // namespace sunset::textmatch
