#include "sunset/corpus.hpp"

#include "sunset/error.hpp"
#include "sunset/prompts.hpp"
#include "sunset/rng.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

namespace sunset::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const Document& doc) {
    ordered_json outline;
    outline["title"] = doc.outline.title;
    outline["sections"] = ordered_json::array();
    for (const auto& s : doc.outline.sections) {
        outline["sections"].push_back({{"name", s.name}, {"sketch", s.sketch}});
    }
    ordered_json j;
    j["id"] = doc.id;
    j["title"] = doc.title;
    j["outline"] = std::move(outline);
    j["sections"] = doc.sections;
    return j;
}

ordered_json to_json(const QseTuple& t) {
    ordered_json j;
    j["document_id"] = t.document_id;
    j["question"] = t.question;
    j["summary"] = t.summary;
    j["evidence"] = t.evidence;
    j["evidence_sections"] = t.evidence_sections;
    j["validated"] = t.validated;
    return j;
}

namespace {

template <class T>
T field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end()) fail(ErrorCode::SchemaError, std::string("missing field \"") + name + "\"");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        fail(ErrorCode::SchemaError, std::string("field \"") + name + "\" has the wrong type");
    }
}

}  // namespace

Document document_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::SchemaError, "document record is not an object");
    Document d;
    d.id = field<std::string>(j, "id");
    d.title = field<std::string>(j, "title");
    const json outline = field<json>(j, "outline");
    if (!outline.is_object()) fail(ErrorCode::SchemaError, "outline is not an object");
    d.outline.title = field<std::string>(outline, "title");
    for (const auto& s : field<json>(outline, "sections")) {
        d.outline.sections.push_back({field<std::string>(s, "name"), field<std::string>(s, "sketch")});
    }
    d.sections = field<std::vector<std::string>>(j, "sections");
    if (d.sections.size() != d.outline.sections.size()) {
        fail(ErrorCode::SchemaError, "document " + d.id + ": sections and outline differ in length");
    }
    return d;
}

QseTuple tuple_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::SchemaError, "tuple record is not an object");
    QseTuple t;
    t.document_id = field<std::string>(j, "document_id");
    t.question = field<std::string>(j, "question");
    t.summary = field<std::string>(j, "summary");
    t.evidence = field<std::vector<std::string>>(j, "evidence");
    if (j.contains("evidence_sections")) t.evidence_sections = field<std::vector<int>>(j, "evidence_sections");
    t.validated = field<bool>(j, "validated");
    return t;
}

std::string to_line(const ordered_json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    std::vector<json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            fail(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

namespace {

template <class Fn>
auto with_line(const std::filesystem::path& path, std::size_t line_no, Fn fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SchemaError) throw;
        fail(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace

Corpus load(const std::filesystem::path& dir) {
    Corpus c;
    const auto docs_path = dir / kDocumentsFile;
    const auto tuples_path = dir / kTuplesFile;
    const auto docs = read_jsonl(docs_path);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        c.documents.push_back(with_line(docs_path, i + 1, [&] { return document_from_json(docs[i]); }));
    }
    if (std::filesystem::exists(tuples_path)) {
        const auto tuples = read_jsonl(tuples_path);
        for (std::size_t i = 0; i < tuples.size(); ++i) {
            c.tuples.push_back(with_line(tuples_path, i + 1, [&] { return tuple_from_json(tuples[i]); }));
        }
    }
    return c;
}

void save(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string docs;
    for (const auto& d : corpus.documents) docs += to_line(to_json(d)) + "\n";
    std::string tuples;
    for (const auto& t : corpus.tuples) tuples += to_line(to_json(t)) + "\n";
    write_file(dir / kDocumentsFile, docs);
    write_file(dir / kTuplesFile, tuples);
}

std::string concatenate(const Document& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.sections.size(); ++i) {
        if (i) out += kSectionSeparator;
        out += doc.sections[i];
    }
    return out;
}

Document shuffle_sections(const Document& doc, std::uint64_t seed) {
    std::vector<std::size_t> order(doc.sections.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, fnv1a(doc.id)));
    rng.shuffle(std::span<std::size_t>(order));

    Document out;
    out.id = doc.id + "#shuffle-" + std::to_string(seed);
    out.title = doc.title;
    out.outline.title = doc.outline.title;
    for (std::size_t i : order) {
        out.sections.push_back(doc.sections[i]);
        if (i < doc.outline.sections.size()) out.outline.sections.push_back(doc.outline.sections[i]);
    }
    return out;
}

std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
    if (n >= corpus.documents.size()) {
        fail(ErrorCode::HoldoutTooLarge, "holdout of " + std::to_string(n) + " documents needs a corpus larger than " +
                                             std::to_string(corpus.documents.size()));
    }
    std::vector<std::size_t> order(corpus.documents.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<bool> held(corpus.documents.size(), false);
    for (std::size_t i = 0; i < n; ++i) held[order[i]] = true;

    std::pair<Corpus, Corpus> out;
    std::map<std::string, bool, std::less<>> held_ids;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        (held[i] ? out.second : out.first).documents.push_back(corpus.documents[i]);
        held_ids[corpus.documents[i].id] = held[i];
    }
    for (const auto& t : corpus.tuples) {
        const auto it = held_ids.find(t.document_id);
        if (it == held_ids.end()) fail(ErrorCode::SchemaError, "tuple refers to unknown document " + t.document_id);
        (it->second ? out.second : out.first).tuples.push_back(t);
    }
    return out;
}

ordered_json to_json(const TrainingExample& e) {
    ordered_json j;
    j["prompt"] = e.prompt;
    j["target"] = e.target;
    j["meta"] = {{"document_id", e.meta.document_id}, {"shuffled", e.meta.shuffled}, {"seed", e.meta.seed}};
    return j;
}

TrainingExample example_from_json(const json& j) {
    TrainingExample e;
    e.prompt = field<std::string>(j, "prompt");
    e.target = field<std::string>(j, "target");
    const json meta = field<json>(j, "meta");
    e.meta.document_id = field<std::string>(meta, "document_id");
    e.meta.shuffled = field<bool>(meta, "shuffled");
    e.meta.seed = field<std::uint64_t>(meta, "seed");
    return e;
}

std::string format_target(const std::vector<std::string>& evidence, std::string_view summary) {
    std::string out = "EVIDENCE:\n";
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        out += "[" + std::to_string(i + 1) + "] " + evidence[i] + "\n";
    }
    out += "RESPONSE:\n";
    out += summary;
    return out;
}

namespace {

std::map<std::string, const Document*, std::less<>> index_documents(const Corpus& corpus) {
    std::map<std::string, const Document*, std::less<>> by_id;
    for (const auto& d : corpus.documents) by_id[d.id] = &d;
    return by_id;
}

const Document& document_of(const std::map<std::string, const Document*, std::less<>>& by_id,
                            const QseTuple& t) {
    const auto it = by_id.find(t.document_id);
    if (it == by_id.end()) fail(ErrorCode::SchemaError, "tuple refers to unknown document " + t.document_id);
    return *it->second;
}

}  // namespace

std::vector<TrainingExample> export_training(const Corpus& corpus, bool shuffled, std::uint64_t seed) {
    const auto by_id = index_documents(corpus);
    std::map<std::string, std::string, std::less<>> contexts;
    std::vector<TrainingExample> out;
    out.reserve(corpus.tuples.size());
    for (const auto& t : corpus.tuples) {
        const Document& doc = document_of(by_id, t);
        auto ctx = contexts.find(doc.id);
        if (ctx == contexts.end()) {
            ctx = contexts.emplace(doc.id, concatenate(shuffled ? shuffle_sections(doc, seed) : doc)).first;
        }
        TrainingExample e;
        e.prompt = prompts::fill(prompts::kInference, {{"question_text", t.question}, {"context", ctx->second}});
        e.target = format_target(t.evidence, t.summary);
        e.meta = {doc.id, shuffled, seed};
        out.push_back(std::move(e));
    }
    return out;
}

ordered_json to_json(const QuestionRecord& q) {
    ordered_json j;
    j["question_id"] = q.question_id;
    j["context_id"] = q.context_id;
    j["question"] = q.question;
    j["reference_summary"] = q.reference_summary;
    j["reference_evidence"] = q.reference_evidence;
    return j;
}

QuestionRecord question_from_json(const json& j) {
    QuestionRecord q;
    q.question_id = field<std::string>(j, "question_id");
    q.context_id = field<std::string>(j, "context_id");
    q.question = field<std::string>(j, "question");
    if (j.contains("reference_summary")) q.reference_summary = field<std::string>(j, "reference_summary");
    if (j.contains("reference_evidence")) {
        q.reference_evidence = field<std::vector<std::string>>(j, "reference_evidence");
    }
    return q;
}

void export_eval_set(const Corpus& corpus, bool shuffled, std::uint64_t seed, const std::filesystem::path& dir) {
    const auto by_id = index_documents(corpus);
    std::filesystem::create_directories(dir / "docs");
    std::map<std::string, std::string, std::less<>> context_ids;
    std::map<std::string, std::size_t, std::less<>> per_doc;
    std::string questions;
    for (const auto& t : corpus.tuples) {
        const Document& doc = document_of(by_id, t);
        auto ctx = context_ids.find(doc.id);
        if (ctx == context_ids.end()) {
            const Document view = shuffled ? shuffle_sections(doc, seed) : doc;
            write_file(dir / "docs" / (view.id + ".txt"), concatenate(view));
            ctx = context_ids.emplace(doc.id, view.id).first;
        }
        QuestionRecord q;
        q.question_id = doc.id + "/q" + std::to_string(++per_doc[doc.id]);
        q.context_id = ctx->second;
        q.question = t.question;
        q.reference_summary = t.summary;
        q.reference_evidence = t.evidence;
        questions += to_line(to_json(q)) + "\n";
    }
    write_file(dir / "questions.jsonl", questions);
}

}  // namespace sunset::corpus
