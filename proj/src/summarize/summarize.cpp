#include "sunset/summarize.hpp"

#include "sunset/citations.hpp"
#include "sunset/error.hpp"
#include "sunset/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>
#include <utility>

namespace sunset::summarize {

namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(kSpace);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(kSpace);
    return s.substr(b, e - b + 1);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

struct Line {
    std::size_t begin;  // byte offset of the line
    std::size_t end;    // offset of '\n' or input end
};

std::vector<Line> lines_of(std::string_view s) {
    std::vector<Line> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto nl = s.find('\n', pos);
        if (nl == std::string_view::npos) nl = s.size();
        out.push_back({pos, nl});
        pos = nl + 1;
    }
    return out;
}

// Markdown emphasis and heading marks models like to put around the headers.
std::string_view strip_decoration(std::string_view line) {
    line = trim(line);
    while (!line.empty() && (line.front() == '*' || line.front() == '#' || line.front() == '_')) line.remove_prefix(1);
    return trim(line);
}

std::string_view after_header(std::string_view line, std::string_view header) {
    line = strip_decoration(line);
    line.remove_prefix(header.size());
    while (!line.empty() && (line.front() == '*' || line.front() == '_')) line.remove_prefix(1);
    return trim(line);
}

std::string strip_index(std::string_view line) {
    line = trim(line);
    if (!line.empty() && line.front() == '[') {
        std::size_t i = 1;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        if (i > 1 && i < line.size() && line[i] == ']') return std::string(trim(line.substr(i + 1)));
    }
    return std::string(line);
}

bool is_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

std::size_t count_code_points(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return !is_continuation(c); }));
}

void sanitize_into(SummaryOutput& out) {
    auto clean = citations::sanitize(out.response, out.evidence.size());
    out.response = std::move(clean.text);
    out.stripped_citations.insert(out.stripped_citations.end(), clean.removed.begin(), clean.removed.end());
}

llm::ChatRequest request_for(std::string prompt, const GenerateOptions& o) {
    auto r = llm::ChatRequest::user(std::move(prompt), o.temperature);
    r.top_p = o.top_p;
    r.max_tokens = o.max_tokens;
    return r;
}

}  // namespace

std::string build_prompt(std::string_view question, std::string_view context) {
    return prompts::fill(prompts::kInference,
                         {{"question_text", std::string(question)}, {"context", std::string(context)}});
}

Parsed parse_output(std::string_view raw) {
    const auto lines = lines_of(raw);
    std::size_t evidence_line = lines.size();
    std::size_t response_line = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto text = strip_decoration(raw.substr(lines[i].begin, lines[i].end - lines[i].begin));
        if (evidence_line == lines.size()) {
            if (starts_with_ci(text, "RESPONSE:")) fail(ErrorCode::Misformatted, "RESPONSE: precedes EVIDENCE:");
            if (starts_with_ci(text, "EVIDENCE:")) evidence_line = i;
        } else if (starts_with_ci(text, "RESPONSE:")) {
            response_line = i;
            break;
        }
    }
    if (evidence_line == lines.size()) fail(ErrorCode::Misformatted, "no EVIDENCE: block");
    if (response_line == lines.size()) fail(ErrorCode::Misformatted, "no RESPONSE: after the evidence");

    Parsed p;
    auto add_evidence = [&](std::string_view line) {
        auto item = strip_index(line);
        if (!item.empty()) p.evidence.push_back(std::move(item));
    };
    const auto line_at = [&](std::size_t i) { return raw.substr(lines[i].begin, lines[i].end - lines[i].begin); };
    add_evidence(after_header(line_at(evidence_line), "EVIDENCE:"));
    for (std::size_t i = evidence_line + 1; i < response_line; ++i) add_evidence(line_at(i));

    std::string response(after_header(line_at(response_line), "RESPONSE:"));
    if (response_line + 1 < lines.size()) {
        const auto rest = trim(raw.substr(lines[response_line + 1].begin));
        if (!rest.empty()) {
            if (!response.empty()) response += '\n';
            response += rest;
        }
    }
    if (response.empty()) fail(ErrorCode::Misformatted, "empty RESPONSE: block");
    p.response = std::move(response);
    return p;
}

SummaryOutput generate(std::string_view question, std::string_view context, llm::Client& client,
                       const GenerateOptions& options) {
    if (options.max_attempts < 1) fail(ErrorCode::InvalidArgument, "max_attempts must be at least 1");
    const std::string prompt = build_prompt(question, context);
    SummaryOutput out;
    std::string last;
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        last = client.complete(request_for(prompt, options)).content;
        out.attempts_used = attempt;
        try {
            auto parsed = parse_output(last);
            out.evidence = std::move(parsed.evidence);
            out.response = std::move(parsed.response);
            if (out.evidence.size() > kMaxEvidence) {
                out.evidence_truncated = out.evidence.size() - kMaxEvidence;
                out.evidence.resize(kMaxEvidence);
            }
            sanitize_into(out);
            return out;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Misformatted) throw;
        }
    }
    out.degraded = true;
    out.evidence.clear();
    out.response = std::string(trim(last));
    sanitize_into(out);
    return out;
}

TokenCounter char_ratio_counter(double chars_per_token) {
    if (!(chars_per_token > 0.0)) fail(ErrorCode::InvalidArgument, "chars_per_token must be positive");
    return [chars_per_token](std::string_view s) {
        return static_cast<std::size_t>(std::ceil(static_cast<double>(count_code_points(s)) / chars_per_token));
    };
}

namespace {

// Longest prefix of s (at a code point boundary) the counter accepts.
std::size_t longest_fitting_prefix(std::string_view s, std::size_t max_tokens, const TokenCounter& counter) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo + 1) / 2;
        while (mid < s.size() && is_continuation(s[mid])) ++mid;
        if (mid > hi) mid = hi;
        if (counter(s.substr(0, mid)) <= max_tokens) {
            lo = mid;
        } else {
            std::size_t back = mid - 1;
            while (back > lo && is_continuation(s[back])) --back;
            hi = back;
        }
    }
    return lo;
}

std::size_t preferred_cut(std::string_view prefix) {
    for (std::string_view sep : {std::string_view("\n\n"), std::string_view("\n")}) {
        const auto p = prefix.rfind(sep);
        if (p != std::string_view::npos && p > 0) return p + sep.size();
    }
    const auto p = prefix.find_last_of(" \t");
    if (p != std::string_view::npos && p > 0) return p + 1;
    return prefix.size();
}

}  // namespace

std::vector<std::string> chunk_context(std::string_view context, std::size_t max_tokens, const TokenCounter& counter) {
    if (max_tokens == 0) fail(ErrorCode::InvalidArgument, "chunk budget must be positive");
    std::vector<std::string> out;
    if (context.empty()) return {std::string()};
    if (counter(context) <= max_tokens) return {std::string(context)};

    // paragraph units, each carrying the blank lines that follow it
    std::vector<std::string_view> units;
    std::size_t pos = 0;
    while (pos < context.size()) {
        auto sep = context.find("\n\n", pos);
        if (sep == std::string_view::npos) {
            units.push_back(context.substr(pos));
            break;
        }
        auto end = sep;
        while (end < context.size() && context[end] == '\n') ++end;
        units.push_back(context.substr(pos, end - pos));
        pos = end;
    }

    std::string current;
    for (std::string_view unit : units) {
        if (counter(current + std::string(unit)) <= max_tokens) {
            current += unit;
            continue;
        }
        if (!current.empty()) out.push_back(std::exchange(current, {}));
        while (counter(unit) > max_tokens) {
            const auto fit = longest_fitting_prefix(unit, max_tokens, counter);
            if (fit == 0) fail(ErrorCode::ChunkOverflow, "a single character exceeds the chunk budget");
            const auto cut = preferred_cut(unit.substr(0, fit));
            out.emplace_back(unit.substr(0, cut));
            unit.remove_prefix(cut);
        }
        current = std::string(unit);
    }
    if (!current.empty()) out.push_back(std::move(current));

    for (const auto& c : out) {
        if (counter(c) > max_tokens) fail(ErrorCode::ChunkOverflow, "chunk exceeds its budget");
    }
    return out;
}

std::size_t context_budget(std::string_view question, const LongOptions& options) {
    const auto usable = static_cast<std::size_t>(std::floor(static_cast<double>(options.window_tokens) *
                                                            (1.0 - options.margin)));
    const auto overhead = options.counter(build_prompt(question, ""));
    if (usable <= overhead) fail(ErrorCode::InvalidArgument, "model window leaves no room for context");
    return usable - overhead;
}

SummaryOutput summarize_long(std::string_view question, std::string_view context, llm::Client& client,
                             const LongOptions& options) {
    const auto budget = context_budget(question, options);
    if (options.counter(context) <= budget) return generate(question, context, client, options.generate);

    const auto chunks = chunk_context(context, budget, options.counter);
    if (chunks.size() == 1) return generate(question, context, client, options.generate);

    std::vector<SummaryOutput> parts(chunks.size());
    if (options.parallel_chunks) {
        std::vector<std::future<SummaryOutput>> futures;
        for (const auto& c : chunks) {
            futures.push_back(std::async(std::launch::async, [&, &chunk = c] {
                return generate(question, chunk, client, options.generate);
            }));
        }
        for (std::size_t i = 0; i < chunks.size(); ++i) parts[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < chunks.size(); ++i) parts[i] = generate(question, chunks[i], client, options.generate);
    }

    SummaryOutput out;
    out.chunked = true;
    std::string summaries;
    for (auto& part : parts) {
        const std::size_t offset = out.evidence.size();
        out.attempts_used += part.attempts_used;
        out.degraded = out.degraded || part.degraded;
        out.evidence_truncated += part.evidence_truncated;
        out.stripped_citations.insert(out.stripped_citations.end(), part.stripped_citations.begin(),
                                      part.stripped_citations.end());
        for (auto& e : part.evidence) out.evidence.push_back(std::move(e));
        if (!summaries.empty()) summaries += "\n\n";
        summaries += citations::renumber(part.response, offset);
    }

    const std::string prompt = prompts::fill(prompts::kCombine, {{"question_text", std::string(question)},
                                                                 {"context", summaries},
                                                                 {"evidence", prompts::numbered(out.evidence)}});
    std::string combined;
    for (int attempt = 1; attempt <= options.generate.max_attempts && combined.empty(); ++attempt) {
        const auto reply = client.complete(request_for(prompt, options.generate)).content;
        ++out.attempts_used;
        try {
            combined = parse_output(reply).response;
        } catch (const Error&) {
            combined = std::string(trim(reply));
        }
    }
    if (combined.empty()) {
        out.degraded = true;
        combined = summaries;
    }
    out.response = std::move(combined);
    sanitize_into(out);
    return out;
}

InferRecord make_record(std::string question_id, std::string context_id, std::string question,
                        const SummaryOutput& out) {
    return {std::move(question_id), std::move(context_id), std::move(question), out.evidence, out.response,
            out.chunked, out.attempts_used, out.degraded};
}

nlohmann::ordered_json to_json(const InferRecord& r) {
    nlohmann::ordered_json j;
    j["question_id"] = r.question_id;
    j["context_id"] = r.context_id;
    j["question"] = r.question;
    j["evidence"] = r.evidence;
    j["response"] = r.response;
    j["chunked"] = r.chunked;
    j["attempts"] = r.attempts;
    j["degraded"] = r.degraded;
    return j;
}

InferRecord record_from_json(const nlohmann::json& j) {
    try {
        InferRecord r;
        r.question_id = j.at("question_id").get<std::string>();
        r.context_id = j.value("context_id", std::string());
        r.question = j.value("question", std::string());
        r.evidence = j.at("evidence").get<std::vector<std::string>>();
        r.response = j.at("response").get<std::string>();
        r.chunked = j.value("chunked", false);
        r.attempts = j.value("attempts", 0);
        r.degraded = j.value("degraded", false);
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::SchemaError, std::string("run record: ") + e.what());
    }
}

}  // namespace sunset::summarize
