#include "sunset/genpipe.hpp"

#include "sunset/citations.hpp"
#include "sunset/error.hpp"
#include "sunset/prompts.hpp"
#include "sunset/textmatch.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace sunset::genpipe {

using nlohmann::ordered_json;

void EventLog::add(std::string stage, std::string document_id, std::string event, ordered_json detail) {
    events_.push_back({std::move(stage), std::move(document_id), std::move(event), std::move(detail)});
}

std::size_t EventLog::count(std::string_view event) const {
    return static_cast<std::size_t>(
        std::count_if(events_.begin(), events_.end(), [&](const Event& e) { return e.event == event; }));
}

std::vector<Event> EventLog::take() {
    std::vector<Event> out;
    out.swap(events_);
    return out;
}

ordered_json to_json(const Event& e) {
    ordered_json j;
    j["stage"] = e.stage;
    j["document_id"] = e.document_id;
    j["event"] = e.event;
    j["detail"] = e.detail;
    return j;
}

namespace {

std::string trimmed(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(b, e - b + 1));
}

std::string join_lines(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += '\n';
        out += items[i];
    }
    return out;
}

}  // namespace

std::string Stages::ask(const std::string& prompt, double temperature) {
    return client_.complete(llm::ChatRequest::user(prompt, temperature)).content;
}

template <class Parse>
auto Stages::with_retries(const char* stage, const std::string& doc_id, const std::string& prompt,
                          double temperature, Parse parse) -> decltype(parse(std::string{}, 1)) {
    std::string last;
    for (int attempt = 1; attempt <= config_.parse_attempts; ++attempt) {
        const std::string reply = ask(prompt, temperature);
        try {
            return parse(reply, attempt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ParseFailure) throw;
            last = e.what();
            log_.add(stage, doc_id, "parse_failure", {{"attempt", attempt}, {"message", last}});
        }
    }
    fail(ErrorCode::ParseFailure, std::string(stage) + ": no usable reply after " +
                                      std::to_string(config_.parse_attempts) + " attempts; last: " + last);
}

std::vector<std::string> Stages::titles(std::size_t n, const std::vector<std::string>& prev) {
    if (n == 0 || n > 100) fail(ErrorCode::InvalidArgument, "titles per call must lie in [1, 100]");
    const std::string prompt =
        prompts::fill(prompts::kTitles, {{"prev_titles_prompt", prompts::avoid_titles(prev)}});
    const std::string reply = ask(prompt, config_.title_temperature);

    std::set<std::string> seen(prev.begin(), prev.end());
    std::vector<std::string> out;
    std::size_t duplicates = 0;
    for (auto& line : parse_lines(reply)) {
        if (out.size() == n) break;
        if (!seen.insert(line).second) {
            ++duplicates;
            continue;
        }
        out.push_back(std::move(line));
    }
    if (duplicates) log_.add("titles", "", "duplicates_removed", {{"count", duplicates}});
    if (out.empty()) fail(ErrorCode::EmptyBatch, "title reply contained no new titles");
    return out;
}

Outline Stages::outline(const std::string& title, const std::string& doc_id) {
    if (trimmed(title).empty()) fail(ErrorCode::InvalidArgument, "outline needs a title");
    const std::string prompt = prompts::fill(prompts::kOutline, {{"title", title}});
    return with_retries("outline", doc_id, prompt, config_.temperature, [&](const std::string& reply, int) {
        return outline_from_json(parse_object(reply), title, config_.sections);
    });
}

std::vector<std::string> Stages::queries(const Outline& outline, const std::string& doc_id) {
    const std::string prompt = prompts::fill(prompts::kQueries, {{"outline", render_outline(outline)}});
    auto lines = parse_lines(ask(prompt, config_.temperature));
    if (lines.size() != config_.queries) {
        log_.add("queries", doc_id, "wrong_count", {{"got", lines.size()}, {"expected", config_.queries}});
        fail(ErrorCode::WrongCount, "expected " + std::to_string(config_.queries) + " questions, got " +
                                        std::to_string(lines.size()));
    }
    return lines;
}

DraftQse Stages::summary_evidence(const Outline& outline, const std::string& question, int n_evidence,
                                  const std::string& doc_id) {
    if (n_evidence < 1) fail(ErrorCode::InvalidArgument, "n_evidence must be positive");
    const std::string prompt = prompts::fill(prompts::kSummaryEvidence, {{"outline", render_outline(outline)},
                                                                         {"question", question},
                                                                         {"n_evidence", std::to_string(n_evidence)}});
    DraftQse d = with_retries("summary_evidence", doc_id, prompt, config_.temperature,
                              [&](const std::string& reply, int) {
                                  return draft_from_json(parse_object(reply), question, outline.sections.size());
                              });
    if (d.evidence.size() < static_cast<std::size_t>(n_evidence)) {
        log_.add("summary_evidence", doc_id, "fewer_evidence_than_requested",
                 {{"requested", n_evidence}, {"got", d.evidence.size()}});
    }
    return d;
}

SectionResult Stages::section(const Outline& outline, std::size_t index, const std::vector<std::string>& required,
                              const std::string& doc_id) {
    if (index >= outline.sections.size()) fail(ErrorCode::InvalidArgument, "section index out of range");
    const std::string prompt = prompts::fill(prompts::kSection, {{"outline", render_outline(outline)},
                                                                 {"chapter", outline.sections[index].name},
                                                                 {"evidence", join_lines(required)}});
    SectionResult result;
    result.text = with_retries("section", doc_id, prompt, config_.temperature, [&](const std::string& reply,
                                                                                     int attempt) {
        if (const auto block = fenced_block(reply)) {
            if (block->empty()) fail(ErrorCode::SectionEmpty, "section " + std::to_string(index + 1) + " is empty");
            return *block;
        }
        std::string whole = trimmed(reply);
        if (whole.empty()) fail(ErrorCode::SectionEmpty, "section " + std::to_string(index + 1) + " is empty");
        if (attempt == 1) fail(ErrorCode::ParseFailure, "section reply has no code block");
        log_.add("section", doc_id, "unfenced_accepted", {{"section", index + 1}});
        return whole;
    });

    const textmatch::ContextIndex text(result.text);
    for (const auto& passage : required) {
        if (text.contains(passage)) continue;
        log_.add("section", doc_id, "evidence_missing", {{"section", index + 1}, {"passage", passage}});
        result.repairs.push_back(repair(result.text, passage, doc_id));
    }
    return result;
}

Repair Stages::repair(const std::string& section, const std::string& passage, const std::string& doc_id) {
    const std::string prompt = prompts::fill(prompts::kRetrieval, {{"chapter", section}, {"passage", passage}});
    const std::string reply = ask(prompt, config_.temperature);
    const auto block = fenced_block(reply);
    const std::string candidate = block ? *block : trimmed(reply);

    const textmatch::ContextIndex text(section);
    if (!candidate.empty() && text.contains(candidate)) {
        log_.add("repair", doc_id, "model_retrieved", {{"passage", passage}, {"replacement", candidate}});
        return {passage, candidate, "model"};
    }
    const std::string shared = trimmed(text.longest_shared_passage(candidate.empty() ? passage : candidate));
    if (shared.empty()) {
        log_.add("repair", doc_id, "evidence_dropped", {{"passage", passage}, {"reply", candidate}});
        return {passage, std::nullopt, "lcs"};
    }
    log_.add("repair", doc_id, "lcs_fallback", {{"passage", passage}, {"replacement", shared}});
    return {passage, shared, "lcs"};
}

std::string Stages::refine(const std::string& book, const std::string& question, const std::string& summary,
                           const std::vector<std::string>& passages, const std::string& doc_id) {
    const std::string prompt = prompts::fill(prompts::kRefine, {{"book", book},
                                                                {"question", question},
                                                                {"summary", summary},
                                                                {"passages", join_lines(passages)}});
    return with_retries("refine", doc_id, prompt, config_.temperature, [&](const std::string& reply, int attempt) {
        if (const auto block = fenced_block(reply)) {
            if (block->empty()) fail(ErrorCode::ParseFailure, "refined summary is empty");
            return *block;
        }
        std::string whole = trimmed(reply);
        if (whole.empty()) fail(ErrorCode::ParseFailure, "refined summary is empty");
        if (attempt == 1) fail(ErrorCode::ParseFailure, "refinement reply has no code block");
        log_.add("refine", doc_id, "unfenced_accepted");
        return whole;
    });
}

std::string Stages::citances(const std::string& summary, const std::vector<std::string>& evidence,
                             const std::string& doc_id) {
    const std::string prompt =
        prompts::fill(prompts::kCitances, {{"essay", summary}, {"evidence", prompts::numbered(evidence)}});
    const std::string reply = ask(prompt, config_.temperature);
    const auto block = fenced_block(reply);
    std::string text = block ? *block : trimmed(reply);
    if (text.empty()) {
        log_.add("citances", doc_id, "empty_reply");
        text = summary;
    }
    auto clean = citations::sanitize(text, evidence.size());
    if (!clean.removed.empty()) {
        log_.add("citances", doc_id, "citation_stripped", {{"removed", clean.removed}, {"n_evidence", evidence.size()}});
    }
    return clean.text;
}

bool Stages::validate(const std::string& book, const std::string& question, const std::string& summary,
                      const std::string& doc_id) {
    const std::string prompt =
        prompts::fill(prompts::kValidation, {{"book", book}, {"question", question}, {"summary", summary}});
    std::string verdict = trimmed(ask(prompt, config_.validation_temperature));
    for (char& c : verdict) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const bool yes = verdict.rfind("YES", 0) == 0;
    if (!yes && verdict.rfind("NO", 0) != 0) {
        log_.add("validate", doc_id, "unparseable_verdict", {{"reply", verdict.substr(0, 200)}});
    }
    return yes;
}

corpus::Document Stages::baseline(const std::vector<std::string>& avoid, const std::string& doc_id) {
    const std::string prompt =
        prompts::fill(prompts::kBaseline, {{"title_prompt", prompts::avoid_titles(avoid)}});
    return with_retries("baseline", doc_id, prompt, config_.temperature, [&](const std::string& reply, int) {
        const auto object = parse_object(reply);
        const auto title = object.find("title");
        const auto document = object.find("document");
        if (title == object.end() || !title->is_string() || document == object.end() || !document->is_string() ||
            trimmed(document->get<std::string>()).empty()) {
            fail(ErrorCode::ParseFailure, "baseline reply lacks a title or document");
        }
        corpus::Document d;
        d.id = doc_id;
        d.title = trimmed(title->get<std::string>());
        d.outline.title = d.title;
        std::string sketch;
        if (const auto o = object.find("outline"); o != object.end()) {
            sketch = o->is_string() ? o->get<std::string>() : o->dump();
        }
        d.outline.sections.push_back({"document", trimmed(sketch)});
        d.sections.push_back(trimmed(document->get<std::string>()));
        return d;
    });
}

}  // namespace sunset::genpipe
