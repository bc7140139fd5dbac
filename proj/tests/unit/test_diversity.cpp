#include "doctest.h"

#include "sunset/diversity.hpp"
#include "sunset/error.hpp"
#include "sunset/kernels.hpp"
#include "sunset/rng.hpp"

#include <cmath>
#include <set>

using namespace sunset;
using namespace sunset::diversity;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

Embedder fixed(std::vector<Embedding> vectors) {
    return [vectors = std::move(vectors)](const std::vector<std::string>& texts) {
        REQUIRE(texts.size() == vectors.size());
        return vectors;
    };
}

LdaModel constructed(std::vector<std::vector<std::int32_t>> rows) {
    LdaModel m;
    m.k = rows.size();
    for (std::size_t w = 0; w < rows[0].size(); ++w) m.vocabulary.push_back("w" + std::to_string(w));
    m.topic_word_counts = std::move(rows);
    return m;
}

std::vector<std::string> two_clusters(std::uint64_t seed, std::size_t docs_per_cluster = 10) {
    Rng rng(seed);
    std::vector<std::string> docs;
    for (const char* stem : {"quartz", "violin"}) {
        for (std::size_t d = 0; d < docs_per_cluster; ++d) {
            std::string text;
            for (int i = 0; i < 60; ++i) text += std::string(stem) + std::to_string(rng.below(12)) + " ";
            docs.push_back(text);
        }
    }
    return docs;
}

}  // namespace

TEST_CASE("tokens") {
    CHECK(word_tokens("Hello, WORLD! e.g. 3rd") == std::vector<std::string>{"hello", "world", "e", "g", "3rd"});
    CHECK(word_tokens("caf\xC3\xA9 ok") == std::vector<std::string>{"caf\xC3\xA9", "ok"});
    CHECK(is_stop_word("the"));
    CHECK_FALSE(is_stop_word("quartz"));
    CHECK(std::is_sorted(stop_words().begin(), stop_words().end()));
}

TEST_CASE("lexical stats") {
    const auto s = lexical_stats({"a b a"});
    CHECK(s.ttr == doctest::Approx(2.0 / 3.0));
    CHECK(s.mean_len_words == 3.0);

    const auto distinct = lexical_stats({"a", "b"});
    CHECK(distinct.ttr == 1.0);
    CHECK(distinct.mean_len_words == 1.0);

    const auto blank = lexical_stats({"", "x y"});
    CHECK(blank.n_excluded == 1);
    CHECK(blank.n_texts == 1);
    CHECK(blank.ttr == 1.0);
}

TEST_CASE("embedding dispersion") {
    CHECK(embedding_dispersion({"x", "x"}, fixed({{1, 0}, {1, 0}})) == 0.0);
    CHECK(embedding_dispersion({"a", "b"}, fixed({{1, 0}, {0, 1}})) == 1.0);
    // cosines: (a,b) = 0.6, (a,c) = 0, (b,c) = 0.8
    const double expected = ((1 - 0.6) + (1 - 0.0) + (1 - 0.8)) / 3.0;
    CHECK(embedding_dispersion({"a", "b", "c"}, fixed({{1, 0}, {0.6, 0.8}, {0, 1}})) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(code_of([] { embedding_dispersion({"x"}, fixed({{1}})); }) == ErrorCode::TooFewTexts);
}

TEST_CASE("topic diversity on constructed models") {
    const std::vector<std::int32_t> row{5, 4, 3, 2, 1, 0, 0, 0};
    const auto same = constructed({row, row, row, row});
    CHECK(topic_diversity(same, 2) == 0.25);

    const auto disjoint = constructed({{9, 8, 0, 0, 0, 0}, {0, 0, 9, 8, 0, 0}, {0, 0, 0, 0, 9, 8}});
    CHECK(topic_diversity(disjoint, 2) == 1.0);

    const auto single = constructed({{3, 1, 2}});
    CHECK(topic_diversity(single, 3) == 1.0);

    CHECK(code_of([&] { topic_diversity(single, 4); }) == ErrorCode::InvalidArgument);
    CHECK(single.top_words(0, 3) == std::vector<std::size_t>{0, 2, 1});
}

TEST_CASE("bag of words drops stop words and rare words") {
    const auto bow = bag_of_words({"The quartz and the violin", "quartz violin harp", "quartz"}, 2);
    CHECK(bow.vocabulary == std::vector<std::string>{"quartz", "violin"});
    CHECK(bow.token_count() == 5);
    CHECK(bag_of_words({"quartz violin", "harp"}, 1).vocabulary.size() == 3);
}

TEST_CASE("LDA: token count conserved and deterministic") {
    const auto docs = two_clusters(1);
    LdaOptions o;
    o.k = 3;
    o.iterations = 50;
    o.seed = 5;
    o.min_df = 1;
    const auto bow = bag_of_words(docs, 1);
    const auto a = lda_fit(bow, o);
    const auto b = lda_fit(bow, o);
    CHECK(a.topic_word_counts == b.topic_word_counts);
    std::int64_t total = 0;
    for (const auto& row : a.topic_word_counts) {
        for (auto c : row) {
            CHECK(c >= 0);
            total += c;
        }
    }
    CHECK(total == static_cast<std::int64_t>(bow.token_count()));
    CHECK(a.alpha == doctest::Approx(50.0 / 3.0));

    o.seed = 6;
    CHECK(lda_fit(bow, o).topic_word_counts != a.topic_word_counts);
}

TEST_CASE("LDA: scalar and AVX2 kernels sample identically") {
    if (!kernels::isa_supported(kernels::Isa::Avx2)) return;
    const auto docs = two_clusters(2);
    LdaOptions o;
    o.k = 4;
    o.iterations = 30;
    o.min_df = 1;
    kernels::force_isa(kernels::Isa::Scalar);
    const auto scalar = lda_fit(docs, o);
    kernels::force_isa(kernels::Isa::Avx2);
    const auto simd = lda_fit(docs, o);
    CHECK(scalar.topic_word_counts == simd.topic_word_counts);
}

TEST_CASE("LDA: too few tokens") {
    LdaOptions o;
    o.k = 10;
    o.min_df = 1;
    CHECK(code_of([&] { lda_fit(std::vector<std::string>{"quartz violin harp"}, o); }) == ErrorCode::CorpusTooSmall);
}

TEST_CASE("LDA: two docs over disjoint vocabularies separate") {
    const std::vector<std::string> docs{"quartz basalt granite quartz basalt granite quartz basalt granite",
                                        "violin cello oboe violin cello oboe violin cello oboe"};
    LdaOptions o;
    o.k = 2;
    o.iterations = 200;
    o.alpha = 0.1;
    o.min_df = 1;
    o.seed = 3;
    const auto m = lda_fit(docs, o);
    // rocks: basalt, granite, quartz; instruments: cello, oboe, violin
    auto cluster = [&](const std::string& w) { return w == "basalt" || w == "granite" || w == "quartz"; };
    bool sep0 = true, sep1 = true;
    const auto t0 = m.top_words(0, 3), t1 = m.top_words(1, 3);
    for (auto w : t0) sep0 = sep0 && cluster(m.vocabulary[w]) == cluster(m.vocabulary[t0[0]]);
    for (auto w : t1) sep1 = sep1 && cluster(m.vocabulary[w]) == cluster(m.vocabulary[t1[0]]);
    CHECK(sep0);
    CHECK(sep1);
    CHECK(cluster(m.vocabulary[t0[0]]) != cluster(m.vocabulary[t1[0]]));
}

TEST_CASE("diversity report") {
    DiversityOptions o;
    o.lda.k = 2;
    o.lda.iterations = 20;
    o.lda.min_df = 1;
    o.top_n = 5;
    const auto r = diversity_report(two_clusters(4, 3), o);
    CHECK(r["n_texts"] == 6);
    CHECK(r["embedding_dispersion"].is_null());
    CHECK(r["lda"]["k"] == 2);
    CHECK(r["topic_diversity"].get<double>() >= 0.5);
    CHECK(r["topic_diversity"].get<double>() <= 1.0);
    CHECK(r["tokenization"]["stop_words"] == stop_words().size());
}
