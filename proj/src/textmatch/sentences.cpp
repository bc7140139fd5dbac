#include "sunset/textmatch.hpp"

#include "sunset/utf8.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <string>
#include <unordered_set>

namespace sunset::textmatch {

namespace {

const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> set{
        "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "rev", "hon", "gen", "gov",
        "sen", "rep", "lt", "col", "capt", "sgt", "cmdr", "adm", "maj", "pres", "vs", "etc",
        "e.g", "i.e", "cf", "viz", "al", "approx", "fig", "figs", "eq", "eqs", "no", "nos",
        "vol", "vols", "pp", "ch", "chap", "sec", "ed", "eds", "dept", "univ", "inc", "ltd",
        "co", "corp", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct",
        "nov", "dec", "mon", "tue", "wed", "thu", "fri", "sat", "sun", "ave", "blvd", "rd",
        "u.s", "u.k", "a.m", "p.m", "ph.d", "m.d", "b.a", "m.a", "est", "ca", "op", "cit",
    };
    return set;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool starts_with(std::string_view text, std::size_t pos, std::string_view what) {
    return text.substr(pos, what.size()) == what;
}

// Closing quotes and brackets that may follow the terminator.
std::size_t closer_length(std::string_view text, std::size_t pos) {
    const char c = text[pos];
    if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
    if (starts_with(text, pos, "\xE2\x80\x9D") || starts_with(text, pos, "\xE2\x80\x99")) return 3;
    return 0;
}

bool opens_sentence(std::string_view text, std::size_t pos) {
    const char c = text[pos];
    if (c == '"' || c == '\'') return true;
    if (starts_with(text, pos, "\xE2\x80\x9C") || starts_with(text, pos, "\xE2\x80\x98")) return true;
    const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
    auto i = static_cast<std::int32_t>(pos);
    UChar32 cp = 0;
    U8_NEXT(s, i, static_cast<std::int32_t>(text.size()), cp);
    return cp >= 0 && u_isupper(cp);
}

bool is_abbreviation(std::string_view text, std::size_t period) {
    std::size_t b = period;
    while (b > 0) {
        const char c = text[b - 1];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '.') {
            --b;
        } else {
            break;
        }
    }
    if (b == period) return false;
    std::string token(text.substr(b, period - b));
    if (token.size() == 1) return true;  // initial, e.g. "J. Smith"
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return abbreviations().contains(token);
}

std::size_t skip_space(std::string_view text, std::size_t pos) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    return pos;
}

// Position just past the blank line starting at pos, or npos.
std::size_t blank_line_end(std::string_view text, std::size_t pos) {
    if (text[pos] != '\n') return std::string_view::npos;
    std::size_t j = pos + 1;
    while (j < text.size() && is_space(text[j])) {
        if (text[j] == '\n') return skip_space(text, j);
        ++j;
    }
    return std::string_view::npos;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
    std::vector<Sentence> out;
    const std::size_t n = text.size();
    std::size_t start = skip_space(text, 0);

    auto emit = [&](std::size_t end) {
        while (end > start && is_space(text[end - 1])) --end;
        if (end > start) out.push_back({std::string(text.substr(start, end - start)), start});
    };

    std::size_t i = start;
    while (i < n) {
        if (const std::size_t next = blank_line_end(text, i); next != std::string_view::npos) {
            emit(i);
            start = next;
            i = next;
            continue;
        }
        const char c = text[i];
        if (c != '.' && c != '?' && c != '!') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && (text[j] == '.' || text[j] == '?' || text[j] == '!')) ++j;
        const bool single_period = c == '.' && j == i + 1;
        while (j < n) {
            const std::size_t len = closer_length(text, j);
            if (len == 0) break;
            j += len;
        }
        if (j >= n || !is_space(text[j])) {
            i = j;
            continue;
        }
        const std::size_t k = skip_space(text, j);
        if (k >= n || !opens_sentence(text, k) || (single_period && is_abbreviation(text, i))) {
            i = j;
            continue;
        }
        emit(j);
        start = k;
        i = k;
    }
    emit(n);
    return out;
}

}  // namespace sunset::textmatch
