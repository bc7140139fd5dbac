#include "sunset/genpipe.hpp"

#include "sunset/error.hpp"

#include <cctype>
#include <set>

namespace sunset::genpipe {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(kSpace);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(kSpace);
    return s.substr(b, e - b + 1);
}

bool is_tag_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '+' || c == '-';
}

bool is_number_char(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' || c == 'e' || c == 'E';
}

// Rewrites Python-literal syntax into JSON. Only used once strict parsing
// has failed.
std::string python_to_json(std::string_view in) {
    std::string out;
    out.reserve(in.size() + 16);
    bool after_value = false;

    auto drop_trailing_comma = [&] {
        auto p = out.find_last_not_of(kSpace);
        if (p != std::string::npos && out[p] == ',') out.erase(p, 1);
    };
    auto begin_value = [&] {
        if (after_value) out += ',';
    };

    std::size_t i = 0;
    while (i < in.size()) {
        const char c = in[i];
        if (c == '"' || c == '\'') {
            begin_value();
            const char quote = c;
            out += '"';
            ++i;
            while (i < in.size() && in[i] != quote) {
                if (in[i] == '\\' && i + 1 < in.size()) {
                    const char next = in[i + 1];
                    if (next == '\'') {
                        out += '\'';
                    } else {
                        out += '\\';
                        out += next;
                    }
                    i += 2;
                    continue;
                }
                if (in[i] == '"') {
                    out += "\\\"";
                } else if (in[i] == '\n') {
                    out += "\\n";
                } else if (in[i] == '\t') {
                    out += "\\t";
                } else if (in[i] != '\r') {
                    out += in[i];
                }
                ++i;
            }
            out += '"';
            ++i;
            after_value = true;
        } else if (c == '{' || c == '[') {
            begin_value();
            out += c;
            ++i;
            after_value = false;
        } else if (c == '}' || c == ']') {
            drop_trailing_comma();
            out += c;
            ++i;
            after_value = true;
        } else if (c == ':' || c == ',') {
            out += c;
            ++i;
            after_value = false;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
            begin_value();
            while (i < in.size() && is_number_char(in[i])) out += in[i++];
            after_value = true;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < in.size() && std::isalnum(static_cast<unsigned char>(in[j]))) ++j;
            const auto word = in.substr(i, j - i);
            begin_value();
            if (word == "True" || word == "true") {
                out += "true";
            } else if (word == "False" || word == "false") {
                out += "false";
            } else if (word == "None" || word == "null") {
                out += "null";
            } else {
                out += word;  // left for the parser to reject
            }
            i = j;
            after_value = true;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_title_key(std::string_view key) {
    const std::string k = lower(trim(key));
    return k == "title" || k == "book title" || k == "book_title";
}

std::string as_text(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_object()) {
        std::string out;
        for (const auto& [k, inner] : v.items()) {
            if (!out.empty()) out += ' ';
            out += as_text(inner);
        }
        return out;
    }
    if (v.is_array()) {
        std::string out;
        for (const auto& inner : v) {
            if (!out.empty()) out += ' ';
            out += as_text(inner);
        }
        return out;
    }
    return v.dump();
}

std::optional<long long> as_chapter(const ordered_json& v) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
        return std::nullopt;
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        const auto b = s.find_first_of("0123456789");
        if (b == std::string::npos) return std::nullopt;
        auto e = s.find_first_not_of("0123456789", b);
        if (e == std::string::npos) e = s.size();
        if (e - b > 9) return std::nullopt;
        return std::stoll(s.substr(b, e - b));
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> fenced_block(std::string_view reply) {
    const auto open = reply.find("```");
    if (open == std::string_view::npos) return std::nullopt;
    std::size_t start = open + 3;
    std::size_t tag_end = start;
    while (tag_end < reply.size() && is_tag_char(reply[tag_end])) ++tag_end;
    std::size_t eol = tag_end;
    while (eol < reply.size() && (reply[eol] == ' ' || reply[eol] == '\t' || reply[eol] == '\r')) ++eol;
    if (eol < reply.size() && reply[eol] == '\n') start = eol + 1;
    const auto close = reply.find("```", start);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(trim(reply.substr(start, close - start)));
}

ordered_json parse_object(std::string_view reply) {
    const auto fenced = fenced_block(reply);
    const std::string_view body = fenced ? std::string_view(*fenced) : reply;
    const auto open = body.find('{');
    const auto close = body.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        fail(ErrorCode::ParseFailure, "reply contains no JSON object");
    }
    const auto candidate = body.substr(open, close - open + 1);
    ordered_json parsed = ordered_json::parse(candidate, nullptr, false);
    if (parsed.is_discarded()) parsed = ordered_json::parse(python_to_json(candidate), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        fail(ErrorCode::ParseFailure, "reply object is neither JSON nor a Python literal");
    }
    return parsed;
}

std::vector<std::string> parse_lines(std::string_view reply) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= reply.size()) {
        auto nl = reply.find('\n', pos);
        if (nl == std::string_view::npos) nl = reply.size();
        std::string_view line = trim(reply.substr(pos, nl - pos));
        pos = nl + 1;

        if (line.size() >= 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') {
            line = trim(line.substr(2));
        } else {
            std::size_t d = 0;
            while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
            if (d > 0 && d + 1 < line.size() && (line[d] == '.' || line[d] == ')') && line[d + 1] == ' ') {
                line = trim(line.substr(d + 2));
            }
        }
        if (line.size() >= 2 && ((line.front() == '"' && line.back() == '"') ||
                                 (line.front() == '\'' && line.back() == '\''))) {
            line = trim(line.substr(1, line.size() - 2));
        }
        if (!line.empty()) out.emplace_back(line);
    }
    return out;
}

Outline outline_from_json(const ordered_json& object, std::string title, std::size_t sections) {
    if (!object.is_object()) fail(ErrorCode::ParseFailure, "outline is not a JSON object");
    ordered_json source = object;
    ordered_json kept;
    for (int depth = 0; depth < 3; ++depth) {
        kept = ordered_json::object();
        for (const auto& [k, v] : source.items()) {
            if (is_title_key(k) && v.is_string()) continue;
            kept[k] = v;
        }
        if (kept.size() == 1 && kept.begin().value().is_object()) {
            source = kept.begin().value();
            continue;
        }
        break;
    }

    Outline out;
    out.title = std::move(title);
    std::set<std::string> names;
    for (const auto& [k, v] : kept.items()) {
        std::string name(trim(k));
        if (name.empty()) fail(ErrorCode::ParseFailure, "outline has an empty section name");
        if (!names.insert(name).second) fail(ErrorCode::ParseFailure, "outline repeats section " + name);
        out.sections.push_back({std::move(name), std::string(trim(as_text(v)))});
    }
    if (out.sections.size() != sections) {
        fail(ErrorCode::WrongSectionCount, "outline has " + std::to_string(out.sections.size()) +
                                               " sections, expected " + std::to_string(sections));
    }
    return out;
}

DraftQse draft_from_json(const ordered_json& object, std::string question, std::size_t sections) {
    DraftQse d;
    d.question = std::move(question);

    const auto summary = object.find("summary");
    if (summary == object.end() || !summary->is_string() || trim(summary->get<std::string>()).empty()) {
        fail(ErrorCode::ParseFailure, "reply has no summary string");
    }
    d.summary = std::string(trim(summary->get<std::string>()));

    const auto evidence = object.find("evidence");
    if (evidence == object.end() || !evidence->is_array()) fail(ErrorCode::ParseFailure, "reply has no evidence list");
    for (const auto& e : *evidence) {
        if (!e.is_string() || trim(e.get<std::string>()).empty()) {
            fail(ErrorCode::ParseFailure, "evidence items must be non-empty strings");
        }
        d.evidence.emplace_back(trim(e.get<std::string>()));
    }
    if (d.evidence.empty()) fail(ErrorCode::ParseFailure, "evidence list is empty");

    auto chapter = object.find("chapter");
    if (chapter == object.end()) chapter = object.find("chapters");
    if (chapter == object.end() || !chapter->is_array()) fail(ErrorCode::ParseFailure, "reply has no chapter list");
    if (chapter->size() != d.evidence.size()) {
        fail(ErrorCode::LengthMismatch, std::to_string(d.evidence.size()) + " evidence items but " +
                                            std::to_string(chapter->size()) + " chapters");
    }
    for (const auto& c : *chapter) {
        const auto n = as_chapter(c);
        if (!n || *n < 1 || *n > static_cast<long long>(sections)) {
            fail(ErrorCode::ParseFailure, "chapter " + c.dump() + " is not in [1, " + std::to_string(sections) + "]");
        }
        d.chapters.push_back(static_cast<int>(*n));
    }
    return d;
}

std::string render_outline(const Outline& outline) {
    std::string out = "Title: " + outline.title;
    for (const auto& s : outline.sections) out += "\n" + s.name + ": " + s.sketch;
    return out;
}

}  // namespace sunset::genpipe
