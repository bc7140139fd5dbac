#include "doctest.h"

#include "support/mock_script.hpp"
#include "support/oracles.hpp"

#include "sunset/citations.hpp"
#include "sunset/error.hpp"
#include "sunset/genpipe.hpp"
#include "sunset/prompts.hpp"
#include "sunset/textmatch.hpp"
#include "sunset/utf8.hpp"

#include <fstream>
#include <sstream>

using namespace sunset;
using namespace sunset::genpipe;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

llm::ClientConfig fast_config() {
    llm::ClientConfig c;
    c.retry.backoff_base = std::chrono::milliseconds(0);
    c.retry.backoff_cap = std::chrono::milliseconds(0);
    return c;
}

struct Harness {
    std::unique_ptr<llm::MockBackend> owner;
    llm::MockBackend* mock;
    llm::Client client;
    EventLog log;
    Stages stages;

    explicit Harness(std::vector<std::string> replies, StageConfig config = {})
        : owner(std::make_unique<llm::MockBackend>()),
          mock(owner.get()),
          client(std::move(owner), fast_config()),
          stages(client, config, log) {
        for (auto& r : replies) mock->push({{"content", std::move(r)}});
    }

    std::string last_prompt() const {
        const auto sent = mock->requests();
        REQUIRE(!sent.empty());
        return json::parse(sent.back().body)["messages"][0]["content"].get<std::string>();
    }
    double last_temperature() const {
        return json::parse(mock->requests().back().body)["temperature"].get<double>();
    }
};

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

Outline six_sections() {
    Outline o;
    o.title = "The Ghost Ship";
    for (int i = 1; i <= 6; ++i) o.sections.push_back({"Chapter " + std::to_string(i), "sketch " + std::to_string(i)});
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("sunset_genpipe_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("prompts: single-pass substitution") {
    CHECK(prompts::fill("q={question_text} c={context}", {{"question_text", "{context}"}, {"context", "X"}}) ==
          "q={context} c=X");
    CHECK(prompts::fill("{a}{b}{unknown}", {{"a", "1"}, {"b", "2"}}) == "12{unknown}");
    CHECK(prompts::fill("{", {}) == "{");
    CHECK(prompts::numbered({"a", "b"}) == "[1] a\n[2] b");
    CHECK(prompts::avoid_titles({}).empty());
    CHECK(prompts::avoid_titles({"X", "Y"}) == "Please do not use any of the following titles:\nX\nY");
}

TEST_CASE("prompts: templates carry the published wording") {
    CHECK(prompts::kTitles.find("Please write a list of 100 possible book titles.") != std::string_view::npos);
    CHECK(prompts::kOutline.find("The book should have 6 sections or chapters.") != std::string_view::npos);
    CHECK(prompts::kOutline.find("Please output the outline as a JSON object") != std::string_view::npos);
    CHECK(prompts::kQueries.find("Please write a list of 5 questions about the book") != std::string_view::npos);
    CHECK(prompts::kSummaryEvidence.find("please write exact quotes and passages") != std::string_view::npos);
    CHECK(prompts::kSection.find("You must include these passages verbatim (i.e., EXACTLY as is).") !=
          std::string_view::npos);
    CHECK(prompts::kRetrieval.find("Please retrieve the passage from the chapter which is CLOSEST") !=
          std::string_view::npos);
    CHECK(prompts::kRefine.find("Please rewrite this response so that it is totally accurate") !=
          std::string_view::npos);
    CHECK(prompts::kCitances.find("add citations to all citation-worthy statements") != std::string_view::npos);
    CHECK(prompts::kCitances.find("please cite them together (e.g., [1][2])") != std::string_view::npos);
    CHECK(prompts::kValidation.find("please simply respond with \"YES\"") != std::string_view::npos);
    CHECK(prompts::kInference.find("Please limit to only 10 pieces of evidence.") != std::string_view::npos);
    CHECK(prompts::kInference.find("EVIDENCE:\n[1] Extracted passage 1") != std::string_view::npos);
    CHECK(prompts::kCombine.find("combine these summaries into a single summary") != std::string_view::npos);
    CHECK(prompts::kRelevance.find("Assign a relevance score from 1 to 5.") != std::string_view::npos);
    CHECK(prompts::kConsistency.find("Assign a score for consistency") != std::string_view::npos);
    for (auto t : {prompts::kRelevanceNoQuery, prompts::kConsistencyNoQuery}) {
        CHECK(t.find("query") == std::string_view::npos);
        CHECK(t.find("{query}") == std::string_view::npos);
    }
}

TEST_CASE("citations: find, sanitize, renumber") {
    CHECK(citations::indices("a [1] b [12][3] [x] [] [4") == std::vector<std::size_t>{1, 12, 3});
    CHECK(citations::sanitize("A claim [1].", 2).text == "A claim [1].");
    const auto s = citations::sanitize("A claim [9].", 2);
    CHECK(s.text == "A claim.");
    CHECK(s.removed == std::vector<std::size_t>{9});
    CHECK(citations::sanitize("X [0] [1][2].", 2).text == "X [1][2].");
    CHECK(citations::renumber("a [1] b [2][3]", 2) == "a [3] b [4][5]");
    CHECK(citations::strip("a [1] b[2].") == "a b.");
    CHECK(citations::well_formed("x [1][2]", 2));
    CHECK_FALSE(citations::well_formed("x [3]", 2));
}

TEST_CASE("parse: fenced blocks") {
    CHECK(fenced_block("pre\n```\ncontent\n```\npost") == std::optional<std::string>("content"));
    CHECK(fenced_block("```python\n{'a': 1}\n```") == std::optional<std::string>("{'a': 1}"));
    CHECK(fenced_block("```\n\n```") == std::optional<std::string>(""));
    CHECK_FALSE(fenced_block("no fence").has_value());
    CHECK_FALSE(fenced_block("```\nunterminated").has_value());
}

TEST_CASE("parse: Python literals become JSON") {
    const auto j = parse_object("```python\n{'a': 'it\\'s \"q\"', 'b': [1, 2,], 'c': True, 'd': None,}\n```");
    CHECK(j["a"] == "it's \"q\"");
    CHECK(j["b"] == json::array({1, 2}));
    CHECK(j["c"] == true);
    CHECK(j["d"].is_null());
    // the published example omits the comma after the evidence list
    const auto k = parse_object("{'summary': 's', 'evidence': ['x', 'y']\n'chapter': [1, 4]}");
    CHECK(k["chapter"] == json::array({1, 4}));
    CHECK(code_of([] { parse_object("no object here"); }) == ErrorCode::ParseFailure);
    CHECK(code_of([] { parse_object("{'a': }"); }) == ErrorCode::ParseFailure);
}

TEST_CASE("parse: lines") {
    CHECK(parse_lines("1. A\n2) B\n- C\n* \"D\"\n\n  E  \n") == std::vector<std::string>{"A", "B", "C", "D", "E"});
}

TEST_CASE("titles: dedup against the batch and previous titles") {
    Harness h({"A\nB\nA"});
    CHECK(h.stages.titles(100, {"B"}) == std::vector<std::string>{"A"});
    CHECK(h.last_prompt().find("Please do not use any of the following titles:\nB") != std::string::npos);
    CHECK(h.last_temperature() == 1.2);
}

TEST_CASE("titles: 100 distinct lines") {
    std::string reply;
    for (int i = 0; i < 100; ++i) reply += "Title " + std::to_string(i) + "\n";
    Harness h({reply});
    CHECK(h.stages.titles(100, {}).size() == 100);
    CHECK(h.last_prompt().find("{prev_titles_prompt}") == std::string::npos);
}

TEST_CASE("titles: whitespace only is EmptyBatch") {
    Harness h({"  \n\t\n"});
    CHECK(code_of([&] { h.stages.titles(10, {}); }) == ErrorCode::EmptyBatch);
}

TEST_CASE("outline: JSON object keeps key order") {
    ordered_json obj;
    for (int i = 6; i >= 1; --i) obj["Section " + std::to_string(i)] = "about " + std::to_string(i);
    Harness h({obj.dump()});
    const auto o = h.stages.outline("My Book");
    REQUIRE(o.sections.size() == 6);
    CHECK(o.title == "My Book");
    CHECK(o.sections[0].name == "Section 6");
    CHECK(o.sections[5].sketch == "about 1");
    CHECK(h.last_prompt().find("This is the title of your book: My Book") != std::string::npos);
}

TEST_CASE("outline: five keys is WrongSectionCount") {
    ordered_json obj;
    for (int i = 1; i <= 5; ++i) obj["C" + std::to_string(i)] = "x";
    Harness h({obj.dump()});
    CHECK(code_of([&] { h.stages.outline("T"); }) == ErrorCode::WrongSectionCount);
    CHECK(h.mock->consumed() == 1);
}

TEST_CASE("outline: fenced Python literal parses like the direct JSON") {
    ordered_json obj;
    for (int i = 1; i <= 6; ++i) obj["Chapter " + std::to_string(i)] = "Chapter " + std::to_string(i) + " outline";
    std::string python = "```python\n{\n";
    for (int i = 1; i <= 6; ++i) {
        python += "'Chapter " + std::to_string(i) + "': 'Chapter " + std::to_string(i) + " outline',\n";
    }
    python += "}\n```";
    Harness direct({obj.dump()});
    Harness fenced({python});
    CHECK(direct.stages.outline("T") == fenced.stages.outline("T"));
}

TEST_CASE("outline: title key and wrapper object are tolerated") {
    ordered_json inner;
    for (int i = 1; i <= 6; ++i) inner["Ch" + std::to_string(i)] = "s";
    ordered_json obj = {{"title", "Whatever"}, {"chapters", inner}};
    Harness h({obj.dump()});
    CHECK(h.stages.outline("T").sections.size() == 6);
}

TEST_CASE("outline: parse failures are retried up to the budget") {
    ordered_json obj;
    for (int i = 1; i <= 6; ++i) obj["C" + std::to_string(i)] = "x";
    Harness ok({"garbage", "still garbage", obj.dump()});
    CHECK(ok.stages.outline("T").sections.size() == 6);
    CHECK(ok.log.count("parse_failure") == 2);

    Harness bad({"a", "b", "c", "d", "e", obj.dump()});
    CHECK(code_of([&] { bad.stages.outline("T"); }) == ErrorCode::ParseFailure);
    CHECK(bad.mock->consumed() == 5);
}

TEST_CASE("queries") {
    const auto o = six_sections();
    Harness five({"q1\nq2\nq3\nq4\nq5"});
    CHECK(five.stages.queries(o).size() == 5);
    CHECK(five.last_prompt().find("Title: The Ghost Ship\nChapter 1: sketch 1") != std::string::npos);

    Harness four({"q1\nq2\nq3\nq4"});
    CHECK(code_of([&] { four.stages.queries(o); }) == ErrorCode::WrongCount);

    Harness padded({"\nq1\n\nq2\n   \nq3\nq4\n\nq5\n\n"});
    CHECK(padded.stages.queries(o) == std::vector<std::string>{"q1", "q2", "q3", "q4", "q5"});
}

TEST_CASE("summary_evidence") {
    const auto o = six_sections();
    Harness ok({R"({"summary":"s","evidence":["e1","e2"],"chapter":[1,3]})"});
    const auto d = ok.stages.summary_evidence(o, "Q?", 7);
    CHECK(d.summary == "s");
    CHECK(d.evidence == std::vector<std::string>{"e1", "e2"});
    CHECK(d.chapters == std::vector<int>{1, 3});
    CHECK(ok.last_prompt().find("Please include at least\n7") == std::string::npos);
    CHECK(ok.last_prompt().find("Please include at least 7 of these passages") != std::string::npos);

    Harness coerced({R"({"summary":"s","evidence":["e1","e2"],"chapter":["Chapter 2", 4.0]})"});
    CHECK(coerced.stages.summary_evidence(o, "Q?", 5).chapters == std::vector<int>{2, 4});

    Harness short_list({R"({"summary":"s","evidence":["e1","e2"],"chapter":[1]})"});
    CHECK(code_of([&] { short_list.stages.summary_evidence(o, "Q?", 5); }) == ErrorCode::LengthMismatch);

    const std::string seven = R"({"summary":"s","evidence":["e1"],"chapter":[7]})";
    Harness out_of_range({seven, seven, seven, seven, seven});
    CHECK(code_of([&] { out_of_range.stages.summary_evidence(o, "Q?", 5); }) == ErrorCode::ParseFailure);
}

TEST_CASE("section: all passages verbatim needs no repair") {
    const auto o = six_sections();
    Harness h({"```\nIt began. The bell rang twice. Then silence fell over the bay.\n```"});
    const auto r = h.stages.section(o, 0, {"The bell rang twice.", "silence fell over the bay"});
    CHECK(r.repairs.empty());
    CHECK(h.mock->consumed() == 1);
    CHECK(h.last_prompt().find("Please write the following chapter of the book in its entirety:\n\nChapter 1") !=
          std::string::npos);
}

TEST_CASE("section: missing passage is repaired to a verbatim one") {
    const auto o = six_sections();
    const std::string text = "It began. The bell rang three times at dawn. Then silence.";
    Harness h({"```\n" + text + "\n```", "```\nThe bell rang three times at dawn.\n```"});
    const auto r = h.stages.section(o, 0, {"The bell rang twice at dawn."});
    REQUIRE(r.repairs.size() == 1);
    REQUIRE(r.repairs[0].replacement.has_value());
    CHECK(r.repairs[0].source == "model");
    CHECK(textmatch::match_evidence(*r.repairs[0].replacement, r.text).exact);
}

TEST_CASE("section: empty code block is SectionEmpty") {
    Harness h({"```\n\n```"});
    CHECK(code_of([&] { h.stages.section(six_sections(), 2, {}); }) == ErrorCode::SectionEmpty);
}

TEST_CASE("repair: verbatim reply is kept") {
    const std::string section = "The crew saw the Ghost Ship at midnight.";
    Harness h({"```\nthe Ghost Ship at midnight\n```"});
    const auto r = h.stages.repair(section, "a ship at night");
    CHECK(r.replacement == std::optional<std::string>("the Ghost Ship at midnight"));
    CHECK(r.source == "model");
}

TEST_CASE("repair: inexact reply falls back to the longest common substring") {
    const std::string section = "They whispered about the Ghost Ship all winter.";
    const std::string reply = "Sailors feared the Ghost Ships of old";
    Harness h({"```\n" + reply + "\n```"});
    const auto r = h.stages.repair(section, "whatever");
    REQUIRE(r.replacement.has_value());
    CHECK(r.source == "lcs");

    const auto a = utf8::decode(reply);
    const auto b = utf8::decode(section);
    const auto oracle = testing::lcs_dp(a, b);
    std::string expected = utf8::encode(a.substr(oracle.offset_a, oracle.length));
    expected.erase(0, expected.find_first_not_of(' '));
    expected.erase(expected.find_last_not_of(' ') + 1);
    CHECK(expected == "the Ghost Ship");
    CHECK(*r.replacement == expected);
    CHECK(textmatch::match_evidence(*r.replacement, section).exact);
}

TEST_CASE("repair: nothing shared drops the passage") {
    Harness h({"```\nxyz\n```"});
    const auto r = h.stages.repair("abc abc", "qqq");
    CHECK_FALSE(r.replacement.has_value());
    CHECK(h.log.count("evidence_dropped") == 1);
}

TEST_CASE("refine") {
    Harness fenced({"Sure:\n```\nBetter summary.\n```"});
    CHECK(fenced.stages.refine("book", "q", "s", {"p1", "p2"}) == "Better summary.");
    CHECK(fenced.last_prompt().find("p1\np2") != std::string::npos);

    Harness unfenced({"Plain answer.", "Plain answer again."});
    CHECK(unfenced.stages.refine("book", "q", "s", {}) == "Plain answer again.");
    CHECK(unfenced.mock->consumed() == 2);

    Harness empty({"", "", "", "", ""});
    CHECK(code_of([&] { empty.stages.refine("book", "q", "s", {}); }) == ErrorCode::ParseFailure);
}

TEST_CASE("citances") {
    Harness keep({"A claim [1]."});
    CHECK(keep.stages.citances("A claim.", {"e1", "e2"}) == "A claim [1].");
    CHECK(keep.last_prompt().find("[1] e1\n[2] e2") != std::string::npos);

    Harness strip({"A claim [9]."});
    CHECK(strip.stages.citances("A claim.", {"e1", "e2"}) == "A claim.");
    CHECK(strip.log.count("citation_stripped") == 1);

    Harness pair({"X [1][2]."});
    const auto out = pair.stages.citances("X.", {"e1", "e2"});
    CHECK(out == "X [1][2].");
    CHECK(citations::indices(out) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("validate") {
    Harness h({"YES", "No, because it misses chapter 3.", "yes.", "Maybe"});
    CHECK(h.stages.validate("b", "q", "s"));
    CHECK(h.last_temperature() == 0.0);
    CHECK_FALSE(h.stages.validate("b", "q", "s"));
    CHECK(h.stages.validate("b", "q", "s"));
    CHECK_FALSE(h.stages.validate("b", "q", "s"));
    CHECK(h.log.count("unparseable_verdict") == 1);
}

namespace {

struct Run {
    RunSummary summary;
    corpus::Corpus corpus;
    std::filesystem::path dir;
};

Run run_script(const std::string& name, const testing::ScriptOptions& opts, std::size_t stop_after = 0,
               bool resume = false, std::filesystem::path dir = {}) {
    if (dir.empty()) dir = scratch(name);
    auto mock = std::make_unique<llm::MockBackend>(testing::build_script(opts));
    llm::Client client(std::move(mock), fast_config());
    PipelineConfig cfg;
    cfg.documents = opts.documents;
    cfg.seed = 11;
    cfg.out_dir = dir;
    cfg.stop_after = stop_after;
    cfg.resume = resume;
    Run r;
    r.summary = run_pipeline(client, cfg);
    r.corpus = corpus::load(dir);
    r.dir = dir;
    return r;
}

}  // namespace

TEST_CASE("pipeline: one clean document") {
    testing::ScriptOptions o;
    o.documents = 1;
    o.model_repair_every = 0;
    o.lcs_repair_every = 0;
    const auto r = run_script("one", o);
    CHECK(r.summary.documents_written == 1);
    CHECK(r.corpus.documents.size() == 1);
    CHECK(r.corpus.tuples.size() == 5);
    CHECK(r.corpus.documents[0].id == "doc-00001");
    CHECK(r.corpus.documents[0].sections.size() == 6);
    for (const auto& t : r.corpus.tuples) CHECK(t.validated);
}

TEST_CASE("pipeline: NO verdicts filter tuples") {
    testing::ScriptOptions o;
    o.documents = 1;
    o.rejected = {2, 4};
    const auto r = run_script("reject", o);
    CHECK(r.corpus.documents.size() == 1);
    CHECK(r.corpus.tuples.size() == 3);
    CHECK(r.summary.tuples_rejected == 2);
}

TEST_CASE("pipeline: invariants over a repaired multi-document run") {
    testing::ScriptOptions o;
    o.documents = 6;
    o.rejected = {5};
    const auto r = run_script("multi", o);
    REQUIRE(r.corpus.documents.size() == 6);

    std::map<std::string, const corpus::Document*> docs;
    for (const auto& d : r.corpus.documents) docs[d.id] = &d;
    for (const auto& t : r.corpus.tuples) {
        const auto& doc = *docs.at(t.document_id);
        REQUIRE(t.evidence.size() == t.evidence_sections.size());
        for (std::size_t i = 0; i < t.evidence.size(); ++i) {
            const auto& section = doc.sections.at(static_cast<std::size_t>(t.evidence_sections[i] - 1));
            CHECK(textmatch::match_evidence(t.evidence[i], section).exact);
        }
        CHECK(citations::well_formed(t.summary, t.evidence.size()));
        CHECK(t.validated);
    }
    // monotone filtering: the gap is exactly the rejections plus hard drops
    CHECK(r.corpus.tuples.size() <= 5 * r.corpus.documents.size());
    CHECK(5 * r.corpus.documents.size() - r.corpus.tuples.size() ==
          r.summary.tuples_rejected + r.summary.tuples_dropped);

    const auto log = corpus::read_jsonl(r.dir / kLogFile);
    std::size_t model = 0, lcs = 0, stripped = 0;
    for (const auto& e : log) {
        model += e["event"] == "model_retrieved";
        lcs += e["event"] == "lcs_fallback";
        stripped += e["event"] == "citation_stripped";
    }
    CHECK(model == 3);
    CHECK(lcs == 2);
    CHECK(stripped == 30);
}

TEST_CASE("pipeline: same script and seed give identical files") {
    testing::ScriptOptions o;
    o.documents = 3;
    const auto a = run_script("det_a", o);
    const auto b = run_script("det_b", o);
    for (auto f : {corpus::kDocumentsFile, corpus::kTuplesFile, kLogFile, kCheckpointFile}) {
        CHECK(slurp(a.dir / f) == slurp(b.dir / f));
    }
}

TEST_CASE("pipeline: interrupted then resumed equals uninterrupted") {
    testing::ScriptOptions o;
    o.documents = 5;
    o.rejected = {3};
    const auto full = run_script("full", o);

    const auto dir = scratch("resumed");
    const auto first = run_script("", o, 3, false, dir);
    CHECK(first.summary.interrupted);
    CHECK(first.summary.completed == 3);
    CHECK(first.corpus.documents.size() == 3);
    const auto second = run_script("", o, 0, true, dir);
    CHECK_FALSE(second.summary.interrupted);
    CHECK(second.summary.completed == 5);
    CHECK(second.summary.tuples_released == full.summary.tuples_released);
    for (auto f : {corpus::kDocumentsFile, corpus::kTuplesFile, kLogFile, kCheckpointFile}) {
        CHECK(slurp(full.dir / f) == slurp(dir / f));
    }
}

TEST_CASE("pipeline: checkpoint from another configuration is rejected") {
    testing::ScriptOptions o;
    o.documents = 2;
    const auto dir = scratch("mismatch");
    run_script("", o, 1, false, dir);
    auto mock = std::make_unique<llm::MockBackend>(testing::build_script(o));
    llm::Client client(std::move(mock), fast_config());
    PipelineConfig cfg;
    cfg.documents = 2;
    cfg.seed = 12;
    cfg.out_dir = dir;
    cfg.resume = true;
    CHECK(code_of([&] { run_pipeline(client, cfg); }) == ErrorCode::CheckpointCorrupt);
}

TEST_CASE("pipeline: stop flag ends the run at a document boundary") {
    testing::ScriptOptions o;
    o.documents = 2;
    std::atomic<bool> stop{true};
    auto mock = std::make_unique<llm::MockBackend>(testing::build_script(o));
    llm::Client client(std::move(mock), fast_config());
    PipelineConfig cfg;
    cfg.documents = 2;
    cfg.out_dir = scratch("stop");
    cfg.stop = &stop;
    const auto s = run_pipeline(client, cfg);
    CHECK(s.interrupted);
    CHECK(s.completed == 0);
}

TEST_CASE("pipeline: auth failure aborts the run") {
    auto mock = std::make_unique<llm::MockBackend>(std::vector<json>{{{"status", 401}}});
    llm::Client client(std::move(mock), fast_config());
    PipelineConfig cfg;
    cfg.documents = 1;
    cfg.out_dir = scratch("auth");
    CHECK(code_of([&] { run_pipeline(client, cfg); }) == ErrorCode::AuthError);
}

TEST_CASE("pipeline: a broken outline drops only its document") {
    testing::ScriptOptions o;
    o.documents = 2;
    auto script = testing::build_script(o);
    // document 1's outline reply becomes five unparseable replies
    script[1] = {{"content", "nope"}};
    for (int i = 0; i < 4; ++i) script.insert(script.begin() + 2, json{{"content", "nope"}});
    // the rest of document 1's replies would now be misaligned, so drop them
    const std::size_t per_doc = testing::build_script({.documents = 1}).size() - 1;
    script.erase(script.begin() + 6, script.begin() + 6 + static_cast<long>(per_doc - 1));
    auto mock = std::make_unique<llm::MockBackend>(script);
    auto* raw = mock.get();
    llm::Client client(std::move(mock), fast_config());
    PipelineConfig cfg;
    cfg.documents = 2;
    cfg.out_dir = scratch("drop");
    const auto s = run_pipeline(client, cfg);
    CHECK(s.documents_dropped == 1);
    CHECK(s.documents_written == 1);
    CHECK(raw->remaining() == 0);
    const auto c = corpus::load(cfg.out_dir);
    REQUIRE(c.documents.size() == 1);
    CHECK(c.documents[0].id == "doc-00002");
}

TEST_CASE("baseline generator") {
    const std::string reply = R"({"title": "Lone Tide", "outline": "one part", "questions": ["q"],
        "summaries": ["s"], "document": "Full text here.", "evidence": ["Full text"]})";
    Harness h({reply, reply});
    llm::Client& client = h.client;
    const auto docs = generate_baseline(client, 2, true, {}, h.log);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "base-00001");
    CHECK(docs[1].sections[0] == "Full text here.");
    CHECK(h.last_prompt().find("Please do not use any of the following titles:\nLone Tide") != std::string::npos);
}
