#include "sunset/diversity.hpp"

#include "sunset/error.hpp"
#include "sunset/kernels.hpp"
#include "sunset/rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace sunset::diversity {

using nlohmann::ordered_json;

namespace {

bool is_word_char(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80; }

}  // namespace

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_char(c)) {
            cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool is_stop_word(std::string_view word) {
    const auto& words = stop_words();
    return std::binary_search(words.begin(), words.end(), word);
}

LexicalStats lexical_stats(const std::vector<std::string>& texts) {
    if (texts.empty()) fail(ErrorCode::InvalidArgument, "lexical_stats needs at least one text");
    LexicalStats s;
    double ttr_sum = 0.0;
    double len_sum = 0.0;
    for (const auto& t : texts) {
        const auto tokens = word_tokens(t);
        if (tokens.empty()) {
            ++s.n_excluded;
            continue;
        }
        const std::set<std::string> types(tokens.begin(), tokens.end());
        ttr_sum += static_cast<double>(types.size()) / static_cast<double>(tokens.size());
        len_sum += static_cast<double>(tokens.size());
        ++s.n_texts;
    }
    if (s.n_texts > 0) {
        s.ttr = ttr_sum / static_cast<double>(s.n_texts);
        s.mean_len_words = len_sum / static_cast<double>(s.n_texts);
    }
    return s;
}

double embedding_dispersion(const std::vector<std::string>& texts, const Embedder& embedder) {
    if (texts.size() < 2) fail(ErrorCode::TooFewTexts, "dispersion needs at least two texts");
    const auto vectors = embedder(texts);
    if (vectors.size() != texts.size()) fail(ErrorCode::DimensionMismatch, "embedder returned the wrong count");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            if (vectors[i].size() != vectors[j].size()) fail(ErrorCode::DimensionMismatch, "embedding dimensions differ");
            sum += 1.0 - kernels::cosine(vectors[i], vectors[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

std::size_t BagOfWords::token_count() const noexcept {
    std::size_t n = 0;
    for (const auto& d : docs) n += d.size();
    return n;
}

BagOfWords bag_of_words(const std::vector<std::string>& docs, std::size_t min_df) {
    std::vector<std::vector<std::string>> tokenized;
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        auto tokens = word_tokens(d);
        std::erase_if(tokens, [](const std::string& w) { return is_stop_word(w); });
        for (const auto& w : std::set<std::string>(tokens.begin(), tokens.end())) ++df[w];
        tokenized.push_back(std::move(tokens));
    }
    BagOfWords bow;
    std::map<std::string, std::int32_t> ids;
    for (const auto& [w, n] : df) {
        if (n < min_df) continue;
        ids[w] = static_cast<std::int32_t>(bow.vocabulary.size());
        bow.vocabulary.push_back(w);
    }
    for (const auto& tokens : tokenized) {
        std::vector<std::int32_t> doc;
        for (const auto& w : tokens) {
            const auto it = ids.find(w);
            if (it != ids.end()) doc.push_back(it->second);
        }
        bow.docs.push_back(std::move(doc));
    }
    return bow;
}

std::vector<std::size_t> LdaModel::top_words(std::size_t t, std::size_t n) const {
    const auto& row = topic_word_counts.at(t);
    std::vector<std::size_t> ids(row.size());
    std::iota(ids.begin(), ids.end(), 0);
    n = std::min(n, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](std::size_t a, std::size_t b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
    ids.resize(n);
    return ids;
}

LdaModel lda_fit(const BagOfWords& bow, const LdaOptions& options) {
    const std::size_t k = options.k;
    if (k == 0) fail(ErrorCode::InvalidArgument, "LDA needs at least one topic");
    const std::size_t tokens = bow.token_count();
    if (tokens <= k) {
        fail(ErrorCode::CorpusTooSmall, "corpus has " + std::to_string(tokens) + " usable tokens for " +
                                            std::to_string(k) + " topics");
    }
    const std::size_t v = bow.vocabulary.size();
    const double alpha = options.alpha.value_or(50.0 / static_cast<double>(k));
    const double beta = options.beta;
    if (!(alpha > 0.0) || !(beta > 0.0)) fail(ErrorCode::InvalidArgument, "LDA priors must be positive");
    const double vbeta = beta * static_cast<double>(v);

    // word-major counts so each token reads one contiguous row
    std::vector<std::int32_t> word_topic(v * k, 0);
    std::vector<std::int32_t> doc_topic(bow.docs.size() * k, 0);
    std::vector<std::int32_t> topic_total(k, 0);
    std::vector<std::vector<std::int32_t>> z(bow.docs.size());

    Rng rng(options.seed);
    for (std::size_t d = 0; d < bow.docs.size(); ++d) {
        z[d].resize(bow.docs[d].size());
        for (std::size_t i = 0; i < bow.docs[d].size(); ++i) {
            const auto t = static_cast<std::int32_t>(rng.below(k));
            const auto w = static_cast<std::size_t>(bow.docs[d][i]);
            z[d][i] = t;
            ++word_topic[w * k + static_cast<std::size_t>(t)];
            ++doc_topic[d * k + static_cast<std::size_t>(t)];
            ++topic_total[static_cast<std::size_t>(t)];
        }
    }

    std::vector<double> weights(k);
    for (std::size_t it = 0; it < options.iterations; ++it) {
        for (std::size_t d = 0; d < bow.docs.size(); ++d) {
            std::int32_t* dt = &doc_topic[d * k];
            for (std::size_t i = 0; i < bow.docs[d].size(); ++i) {
                const auto w = static_cast<std::size_t>(bow.docs[d][i]);
                std::int32_t* wt = &word_topic[w * k];
                auto t = static_cast<std::size_t>(z[d][i]);
                --wt[t];
                --dt[t];
                --topic_total[t];

                kernels::gibbs_weights({dt, k}, {wt, k}, topic_total, alpha, beta, vbeta, weights);
                double total = 0.0;
                for (double x : weights) total += x;
                double u = rng.uniform() * total;
                t = 0;
                while (t + 1 < k && u >= weights[t]) {
                    u -= weights[t];
                    ++t;
                }

                z[d][i] = static_cast<std::int32_t>(t);
                ++wt[t];
                ++dt[t];
                ++topic_total[t];
            }
        }
    }

    LdaModel m;
    m.k = k;
    m.vocabulary = bow.vocabulary;
    m.alpha = alpha;
    m.beta = beta;
    m.seed = options.seed;
    m.iterations = options.iterations;
    m.topic_word_counts.assign(k, std::vector<std::int32_t>(v, 0));
    for (std::size_t w = 0; w < v; ++w) {
        for (std::size_t t = 0; t < k; ++t) m.topic_word_counts[t][w] = word_topic[w * k + t];
    }
    return m;
}

LdaModel lda_fit(const std::vector<std::string>& docs, const LdaOptions& options) {
    return lda_fit(bag_of_words(docs, options.min_df), options);
}

double topic_diversity(const LdaModel& model, std::size_t top_n) {
    if (model.k == 0) fail(ErrorCode::InvalidArgument, "model has no topics");
    if (top_n == 0 || top_n > model.vocabulary.size()) {
        fail(ErrorCode::InvalidArgument, "top_n must lie in [1, vocabulary size]");
    }
    std::set<std::size_t> unique;
    for (std::size_t t = 0; t < model.k; ++t) {
        for (auto w : model.top_words(t, top_n)) unique.insert(w);
    }
    return static_cast<double>(unique.size()) / static_cast<double>(model.k * top_n);
}

ordered_json diversity_report(const std::vector<std::string>& texts, const DiversityOptions& options,
                              const std::optional<Embedder>& embedder) {
    ordered_json r;
    const auto lex = lexical_stats(texts);
    r["n_texts"] = texts.size();
    r["ttr"] = lex.ttr;
    r["mean_len_words"] = lex.mean_len_words;
    r["n_excluded_empty"] = lex.n_excluded;
    r["embedding_dispersion"] = embedder ? ordered_json(embedding_dispersion(texts, *embedder)) : ordered_json();

    const auto bow = bag_of_words(texts, options.lda.min_df);
    const auto model = lda_fit(bow, options.lda);
    const std::size_t top_n = std::min(options.top_n, bow.vocabulary.size());
    r["topic_diversity"] = topic_diversity(model, top_n);

    ordered_json topics = ordered_json::array();
    for (std::size_t t = 0; t < model.k; ++t) {
        ordered_json words = ordered_json::array();
        for (auto w : model.top_words(t, std::min<std::size_t>(10, top_n))) words.push_back(model.vocabulary[w]);
        topics.push_back(std::move(words));
    }
    r["lda"] = {{"k", model.k},
                {"iterations", model.iterations},
                {"alpha", model.alpha},
                {"beta", model.beta},
                {"seed", model.seed},
                {"min_df", options.lda.min_df},
                {"top_n", top_n},
                {"top_n_requested", options.top_n},
                {"vocabulary_size", bow.vocabulary.size()},
                {"tokens", bow.token_count()},
                {"fit", "corpus-level; a per-document reading of the topic count is possible and not used"}};
    r["tokenization"] = {{"case", "lower"},
                         {"split", "non-alphanumeric ASCII; bytes above 0x7F are word characters"},
                         {"stop_words", stop_words().size()},
                         {"stop_list", "Glasgow IR stop list"}};
    r["topics_top10"] = std::move(topics);
    return r;
}

}  // namespace sunset::diversity
