// One PASS/FAIL line per acceptance criterion; exit status 1 when any fails.
// The live smoke run is SKIP unless SUNSET_LIVE_SMOKE=1 and an API key is set.

#include "sunset/citations.hpp"
#include "sunset/corpus.hpp"
#include "sunset/diversity.hpp"
#include "sunset/error.hpp"
#include "sunset/evaluate.hpp"
#include "sunset/genpipe.hpp"
#include "sunset/llm_client.hpp"
#include "sunset/prompts.hpp"
#include "sunset/rng.hpp"
#include "sunset/summarize.hpp"
#include "sunset/textmatch.hpp"
#include "sunset/utf8.hpp"
#include "support/mock_script.hpp"
#include "support/oracles.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

using namespace sunset;
namespace fs = std::filesystem;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

Verdict fail_with(std::string d) { return {Outcome::Fail, std::move(d)}; }
Verdict check(bool ok, std::string d) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(d)}; }

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << std::fixed << v;
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("sunset_accept_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---- LCS

Verdict lcs_oracle() {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> alphabet(2, 26);
    std::size_t mismatches = 0;
    constexpr std::size_t pairs = 10'000;
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t k = alphabet(rng);
        const auto a = testing::random_u32(rng, 200, k);
        const auto b = testing::random_u32(rng, 200, k);
        if (textmatch::longest_common_substring(a, b) != testing::lcs_dp(a, b)) ++mismatches;
    }

    std::mt19937_64 text_rng(7);
    std::string words = testing::random_words(text_rng, 30'000);
    const std::u32string context = utf8::decode(words).substr(0, 100'000);
    std::u32string evidence = context.substr(61'234, 500);
    evidence[250] = U'#';  // not a verbatim copy
    double best_ms = 1e9;
    textmatch::LcsResult r;
    for (int rep = 0; rep < 5; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const textmatch::SuffixAutomaton sam(context);
        r = sam.longest_common_substring(evidence);
        const auto t1 = std::chrono::steady_clock::now();
        best_ms = std::min(best_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    const bool ok = mismatches == 0 && best_ms < 50.0 && r.length == 250;
    return check(ok, std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches; 100000x500 in " +
                         fmt(best_ms, 2) + " ms (build + query, best of 5)");
}

// ---- copy accuracy and positions

struct Plant {
    std::string context;
    std::vector<std::string> evidence;
};

/// Evidence slices of `len` code points starting and ending on a word
/// character, with midpoints drawn from [lo, hi) of the context.
Plant plant(std::mt19937_64& rng, std::size_t words, std::size_t items, std::size_t len, double lo, double hi) {
    Plant p;
    p.context = testing::random_words(rng, words);
    const auto cps = utf8::decode(p.context);
    const double n = static_cast<double>(cps.size());
    std::uniform_real_distribution<double> mid(std::max(lo * n, len / 2.0), std::min(hi * n, n - len / 2.0));
    while (p.evidence.size() < items) {
        const auto start = static_cast<std::size_t>(mid(rng) - len / 2.0);
        const auto slice = cps.substr(start, len);
        if (slice.front() == U' ' || slice.back() == U' ') continue;
        p.evidence.push_back(utf8::encode(slice));
    }
    return p;
}

Verdict copy_accuracy_planted() {
    std::mt19937_64 rng(11);
    std::vector<evaluate::EvidenceSet> clean, corrupted;
    std::uniform_int_distribution<int> digit('0', '9');
    for (int c = 0; c < 20; ++c) {
        const auto p = plant(rng, 400, 5, 80, 0.0, 1.0);
        clean.push_back({p.evidence, p.context});
        evaluate::EvidenceSet bad{{}, p.context};
        for (const auto& e : p.evidence) {
            // first 40 code points kept, last 40 replaced by digits the context never contains
            auto cps = utf8::decode(e);
            for (std::size_t i = 40; i < cps.size(); ++i) cps[i] = static_cast<char32_t>(digit(rng));
            bad.evidence.push_back(utf8::encode(cps));
        }
        corrupted.push_back(std::move(bad));
    }
    const auto a = evaluate::copy_accuracy(clean, 0.5);
    const auto b = evaluate::copy_accuracy(corrupted, 0.5);
    double min_overlap = 1.0, max_overlap = 0.0;
    for (const auto& s : corrupted) {
        for (const auto& e : s.evidence) {
            const double o = textmatch::match_evidence(e, s.context).overlap;
            min_overlap = std::min(min_overlap, o);
            max_overlap = std::max(max_overlap, o);
        }
    }
    const bool ok = a.n_evidence == 100 && a.exact_rate == 100.0 && a.half_match_rate == 100.0 && b.exact_rate == 0.0 &&
                    b.half_match_rate == 100.0 && min_overlap == 0.5 && max_overlap == 0.5;
    return check(ok, "planted exact " + fmt(a.exact_rate, 1) + "% half " + fmt(a.half_match_rate, 1) +
                         "%; corrupted exact " + fmt(b.exact_rate, 1) + "% half " + fmt(b.half_match_rate, 1) +
                         "% (overlap " + fmt(min_overlap, 3) + ".." + fmt(max_overlap, 3) + ")");
}

Verdict position_recovery() {
    std::mt19937_64 rng(23);
    std::vector<evaluate::EvidenceSet> uniform, first;
    for (int c = 0; c < 100; ++c) {
        auto p = plant(rng, 700, 10, 60, 0.0, 1.0);
        uniform.push_back({p.evidence, p.context});
        p = plant(rng, 700, 10, 60, 0.0, 0.1);
        first.push_back({p.evidence, p.context});
    }
    const auto h = evaluate::position_histogram(uniform, 10, 0.5);
    const double expected = static_cast<double>(h.total_matched) / 10.0;
    double chi2 = 0.0;
    for (auto c : h.counts) chi2 += (c - expected) * (c - expected) / expected;
    const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(9.0), chi2));
    const auto f = evaluate::position_histogram(first, 10, 0.5);
    const bool ok = h.total_matched == 1000 && p > 0.01 && f.total_matched == 1000 && f.counts[0] == 1000;
    return check(ok, "uniform: chi2 " + fmt(chi2, 2) + " p " + fmt(p, 3) + " over " + std::to_string(h.total_matched) +
                         "; first decile: " + std::to_string(f.counts[0]) + "/" + std::to_string(f.total_matched) +
                         " in bin 0");
}

// ---- citations

evaluate::Rater table_rater(std::map<std::string, int> table) {
    return [table = std::move(table)](std::string_view source, std::string_view, std::optional<std::string_view>,
                                      evaluate::Dimension d) {
        const int raw = table.at(std::string(source));
        return evaluate::RaterScore{d, raw, evaluate::normalize_score(raw)};
    };
}

Verdict citation_arithmetic() {
    const auto w = evaluate::citation_prf1("First claim [1]. Second claim [2]. Third claim. Fourth claim.",
                                           {"ev one", "ev two"}, table_rater({{"ev one", 5}, {"ev two", 3}}),
                                           evaluate::Dimension::Relevance, {0, 0});
    const bool worked = w.prf.precision == 75.0 && w.prf.recall == 37.5 && w.prf.f1 == 50.0;

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> n_sent(1, 8), n_ev(1, 6), raw(1, 5), cites(0, 3);
    std::size_t violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const int ne = n_ev(rng);
        std::vector<std::string> evidence;
        std::map<std::string, int> table;
        for (int e = 0; e < ne; ++e) {
            evidence.push_back("evidence " + std::to_string(e));
            table[evidence.back()] = raw(rng);
        }
        std::string summary;
        const int ns = n_sent(rng);
        for (int s = 0; s < ns; ++s) {
            summary += "Sentence number " + std::to_string(s);
            const int nc = cites(rng);
            for (int c = 0; c < nc; ++c) {
                summary += " [" + std::to_string(std::uniform_int_distribution<int>(1, ne)(rng)) + "]";
            }
            summary += ". ";
        }
        const auto r = evaluate::citation_prf1(summary, evidence, table_rater(table), evaluate::Dimension::Consistency,
                                               {0, 0});
        const double lhs = r.prf.precision * static_cast<double>(r.n_citations);
        const double rhs = r.prf.recall * static_cast<double>(r.n_sentences);
        const bool identity = std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
        const double lo = std::min(r.prf.precision, r.prf.recall), hi = std::max(r.prf.precision, r.prf.recall);
        const bool bounded = r.prf.f1 >= lo - 1e-12 && r.prf.f1 <= hi + 1e-12;
        if (!identity || !bounded || r.n_sentences != static_cast<std::size_t>(ns)) ++violations;
    }
    return check(worked && violations == 0, "worked case P/R/F1 " + fmt(w.prf.precision, 1) + "/" +
                                                fmt(w.prf.recall, 1) + "/" + fmt(w.prf.f1, 1) + "; " +
                                                std::to_string(violations) + " violations in 1000 instances");
}

// ---- pipeline

struct RunFiles {
    genpipe::RunSummary summary;
    fs::path dir;
};

RunFiles run_mock(const std::string& name, std::size_t docs, std::size_t stop_after, bool resume,
                  const fs::path& reuse = {}) {
    testing::ScriptOptions o;
    o.documents = docs;
    o.rejected = {4};
    llm::ClientConfig cc;
    cc.retry.backoff_base = std::chrono::milliseconds(0);
    cc.retry.backoff_cap = std::chrono::milliseconds(0);
    llm::Client client(std::make_unique<llm::MockBackend>(testing::build_script(o)), cc);
    genpipe::PipelineConfig pc;
    pc.documents = docs;
    pc.seed = 42;
    pc.out_dir = reuse.empty() ? scratch(name) : reuse;
    pc.stop_after = stop_after;
    pc.resume = resume;
    return {genpipe::run_pipeline(client, pc), pc.out_dir};
}

Verdict pipeline_invariants() {
    const auto full = run_mock("full", 20, 0, false);
    const auto c = corpus::load(full.dir);
    std::map<std::string, const corpus::Document*> docs;
    for (const auto& d : c.documents) docs[d.id] = &d;
    std::size_t evidence = 0, not_verbatim = 0, bad_citations = 0;
    for (const auto& t : c.tuples) {
        const auto& doc = *docs.at(t.document_id);
        const std::string whole = corpus::concatenate(doc);
        for (std::size_t i = 0; i < t.evidence.size(); ++i) {
            ++evidence;
            const auto& section = doc.sections.at(static_cast<std::size_t>(t.evidence_sections.at(i) - 1));
            if (!textmatch::match_evidence(t.evidence[i], section).exact ||
                !textmatch::match_evidence(t.evidence[i], whole).exact) {
                ++not_verbatim;
            }
        }
        if (!citations::well_formed(t.summary, t.evidence.size())) ++bad_citations;
    }

    auto part = run_mock("part", 20, 7, false);
    const bool interrupted = part.summary.interrupted && part.summary.completed == 7;
    part = run_mock("part", 20, 0, true, part.dir);
    bool identical = true;
    for (auto f : {corpus::kDocumentsFile, corpus::kTuplesFile, genpipe::kLogFile}) {
        identical = identical && slurp(full.dir / f) == slurp(part.dir / f);
    }
    fs::remove_all(full.dir);
    fs::remove_all(part.dir);
    const bool ok = c.documents.size() == 20 && evidence > 0 && not_verbatim == 0 && bad_citations == 0 &&
                    interrupted && identical;
    return check(ok, std::to_string(c.documents.size()) + " documents, " + std::to_string(c.tuples.size()) +
                         " tuples, " + std::to_string(evidence) + " evidence items: " + std::to_string(not_verbatim) +
                         " not verbatim, " + std::to_string(bad_citations) + " out-of-range citations; resume after " +
                         "7 of 20 " + (identical ? "byte-identical" : "DIFFERS"));
}

std::string context_of(const corpus::TrainingExample& e) {
    const std::string tmpl(prompts::kInference);
    const auto slot = tmpl.find("{context}");
    const auto before = tmpl.substr(0, slot);
    const auto after = tmpl.substr(slot + 9);
    const auto tail = before.substr(before.find("{question_text}") + 15);
    const auto start = e.prompt.find(tail) + tail.size();
    return e.prompt.substr(start, e.prompt.rfind(after) - start);
}

Verdict shuffle_safety() {
    const auto run = run_mock("shuffle", 4, 0, false);
    const auto c = corpus::load(run.dir);
    fs::remove_all(run.dir);
    std::size_t lines = 0, failures = 0, multiset_failures = 0, reordered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto examples = corpus::export_training(c, true, seed);
        for (const auto& ex : examples) {
            const auto ctx = context_of(ex);
            for (const auto& e : summarize::parse_output(ex.target).evidence) {
                ++lines;
                if (!textmatch::match_evidence(e, ctx).exact) ++failures;
            }
        }
        for (const auto& d : c.documents) {
            const auto s = corpus::shuffle_sections(d, seed);
            auto a = d.sections, b = s.sections;
            reordered += a != b;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            auto oa = d.outline.sections, ob = s.outline.sections;
            auto by_name = [](const auto& x, const auto& y) { return x.name < y.name; };
            std::sort(oa.begin(), oa.end(), by_name);
            std::sort(ob.begin(), ob.end(), by_name);
            if (a != b || oa != ob) ++multiset_failures;
        }
    }
    return check(lines > 0 && failures == 0 && multiset_failures == 0,
                 "100 exports, " + std::to_string(lines) + " evidence lines, " + std::to_string(failures) +
                     " not in their context; " + std::to_string(multiset_failures) + " multiset changes (" +
                     std::to_string(reordered) + " of " + std::to_string(100 * c.documents.size()) + " reordered)");
}

// ---- topic diversity

diversity::LdaModel constructed(std::vector<std::vector<std::int32_t>> rows) {
    diversity::LdaModel m;
    m.k = rows.size();
    for (std::size_t w = 0; w < rows[0].size(); ++w) m.vocabulary.push_back("w" + std::to_string(w));
    m.topic_word_counts = std::move(rows);
    return m;
}

Verdict topic_diversity_bounds() {
    constexpr std::size_t k = 5, n = 4;
    std::vector<std::int32_t> row(40, 0);
    for (std::size_t w = 0; w < row.size(); ++w) row[w] = static_cast<std::int32_t>(40 - w);
    const double identical = diversity::topic_diversity(constructed(std::vector(k, row)), n);
    std::vector<std::vector<std::int32_t>> rows(k, std::vector<std::int32_t>(40, 0));
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < n; ++j) rows[t][t * n + j] = static_cast<std::int32_t>(10 - j);
    }
    const double disjoint = diversity::topic_diversity(constructed(rows), n);

    std::size_t separated = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(1000 + seed);
        std::vector<std::string> docs;
        for (const char* stem : {"quartz", "violin"}) {
            for (int d = 0; d < 10; ++d) {
                std::string text;
                for (int i = 0; i < 60; ++i) text += std::string(stem) + std::to_string(rng.below(12)) + " ";
                docs.push_back(text);
            }
        }
        diversity::LdaOptions o;
        o.k = 2;
        o.iterations = 500;
        o.seed = seed;
        const auto m = diversity::lda_fit(docs, o);
        auto cluster_of = [&](std::size_t t) {
            std::set<char> stems;
            for (auto w : m.top_words(t, 10)) stems.insert(m.vocabulary[w][0]);
            return stems.size() == 1 ? *stems.begin() : '?';
        };
        const char a = cluster_of(0), b = cluster_of(1);
        separated += a != '?' && b != '?' && a != b;
    }
    const bool ok = identical == 1.0 / k && disjoint == 1.0 && separated >= 19;
    return check(ok, "identical " + fmt(identical, 6) + " (1/k = " + fmt(1.0 / k, 6) + "), disjoint " +
                         fmt(disjoint, 6) + ", two clusters separated in " + std::to_string(separated) + "/20 seeds");
}

Verdict pearson_fixture() {
    const double r = evaluate::pearson({1, 2, 3, 4}, {2, 1, 4, 3});
    const double up = evaluate::pearson({1, 2, 3, 4, 5}, {3, 5, 7, 9, 11});
    const double down = evaluate::pearson({0.5, 1.5, 2.5, 7.0}, {-1.0, -3.0, -5.0, -14.0});
    return check(std::abs(r - 0.6) <= 1e-9 && up == 1.0 && down == -1.0,
                 "r = " + fmt(r, 9) + ", perfect " + fmt(up, 1) + " / " + fmt(down, 1));
}

// ---- live

Verdict live_smoke() {
    const char* opt_in = std::getenv("SUNSET_LIVE_SMOKE");
    const char* key = std::getenv("SUNSET_API_KEY");
    if (!opt_in || std::string(opt_in) != "1" || !key || !*key) {
        return {Outcome::Skip, "set SUNSET_LIVE_SMOKE=1 and SUNSET_API_KEY (optionally SUNSET_BASE_URL) to run"};
    }
    llm::HttpSettings http;
    http.api_key = key;
    if (const char* url = std::getenv("SUNSET_BASE_URL")) http.base_url = url;
    llm::ClientConfig cc;
    if (const char* model = std::getenv("SUNSET_LLM_MODEL")) cc.chat_model = model;
    llm::Client client(std::make_unique<llm::HttpBackend>(http), cc);
    genpipe::PipelineConfig pc;
    pc.documents = 3;
    pc.workers = 3;
    pc.out_dir = scratch("live");
    const auto t0 = std::chrono::steady_clock::now();
    genpipe::RunSummary s;
    try {
        s = genpipe::run_pipeline(client, pc);
    } catch (const Error& e) {
        return fail_with(std::string(to_string(e.code())) + ": " + e.what());
    }
    const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    const auto c = corpus::load(pc.out_dir);
    std::map<std::string, const corpus::Document*> docs;
    for (const auto& d : c.documents) docs[d.id] = &d;
    std::size_t not_verbatim = 0;
    for (const auto& t : c.tuples) {
        for (std::size_t i = 0; i < t.evidence.size(); ++i) {
            const auto& section = docs.at(t.document_id)->sections.at(static_cast<std::size_t>(t.evidence_sections[i] - 1));
            if (!textmatch::match_evidence(t.evidence[i], section).exact) ++not_verbatim;
        }
    }
    const double judged = static_cast<double>(s.tuples_released + s.tuples_rejected);
    const double pass_rate = judged > 0 ? 100.0 * static_cast<double>(s.tuples_released) / judged : 0.0;
    fs::remove_all(pc.out_dir);
    return check(pass_rate >= 80.0 && not_verbatim == 0 && minutes < 15.0,
                 fmt(pass_rate, 1) + "% of tuples validated, " + std::to_string(not_verbatim) + " not verbatim, " +
                     fmt(minutes, 1) + " min");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"LCS oracle equivalence", lcs_oracle},
        {"Copy-accuracy correctness", copy_accuracy_planted},
        {"Citation P/R/F1 arithmetic", citation_arithmetic},
        {"Lost-in-the-middle recovery", position_recovery},
        {"Pipeline verbatim invariant", pipeline_invariants},
        {"Shuffle safety", shuffle_safety},
        {"Topic diversity bounds", topic_diversity_bounds},
        {"Pearson fixture", pearson_fixture},
        {"Live smoke", live_smoke},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = fail_with(std::string("threw: ") + e.what());
        }
        const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
        failed += v.outcome == Outcome::Fail;
        std::cout << tag << "  " << name << ": " << v.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
