#pragma once

// Corpus diversity: type-token ratio, embedding dispersion, and topic
// diversity from an LDA model fitted by collapsed Gibbs sampling.

#include "sunset/embedder.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sunset::diversity {

/// Lowercased runs of ASCII letters and digits; bytes above 0x7F count as
/// word characters so non-ASCII words stay whole.
std::vector<std::string> word_tokens(std::string_view text);

const std::vector<std::string_view>& stop_words();
bool is_stop_word(std::string_view word);

struct LexicalStats {
    double ttr = 0.0;
    double mean_len_words = 0.0;
    std::size_t n_texts = 0;     // texts with at least one token
    std::size_t n_excluded = 0;  // texts without tokens
};

/// Mean of per-text TTR and mean token count, over texts with tokens.
LexicalStats lexical_stats(const std::vector<std::string>& texts);

/// Mean of 1 - cosine over unordered pairs. Throws TooFewTexts.
double embedding_dispersion(const std::vector<std::string>& texts, const Embedder& embedder);

struct BagOfWords {
    std::vector<std::string> vocabulary;          // sorted
    std::vector<std::vector<std::int32_t>> docs;  // word ids in text order
    [[nodiscard]] std::size_t token_count() const noexcept;
};

/// Tokenize, drop stop words, keep words in at least min_df documents.
BagOfWords bag_of_words(const std::vector<std::string>& docs, std::size_t min_df = 2);

struct LdaOptions {
    std::size_t k = 20;
    std::size_t iterations = 500;
    std::optional<double> alpha;  // default 50 / k
    double beta = 0.01;
    std::uint64_t seed = 0;
    std::size_t min_df = 2;
};

struct LdaModel {
    std::size_t k = 0;
    std::vector<std::string> vocabulary;
    std::vector<std::vector<std::int32_t>> topic_word_counts;  // k x |V|
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;

    /// Word ids of topic t by descending count, ties to the lower id.
    [[nodiscard]] std::vector<std::size_t> top_words(std::size_t t, std::size_t n) const;
};

/// Throws CorpusTooSmall unless the kept token count exceeds k.
LdaModel lda_fit(const BagOfWords& bow, const LdaOptions& options);
LdaModel lda_fit(const std::vector<std::string>& docs, const LdaOptions& options);

/// |union of per-topic top-n lists| / (k * n). Throws InvalidArgument when
/// n exceeds the vocabulary.
double topic_diversity(const LdaModel& model, std::size_t top_n);

struct DiversityOptions {
    LdaOptions lda;
    std::size_t top_n = 25;
};

/// Every metric plus the parameters and tokenization used. Dispersion is
/// included only with an embedder.
nlohmann::ordered_json diversity_report(const std::vector<std::string>& texts, const DiversityOptions& options,
                                        const std::optional<Embedder>& embedder = std::nullopt);

}  // namespace sunset::diversity
