#include "sunset/citations.hpp"

#include <limits>

namespace sunset::citations {

std::vector<Marker> find(std::string_view text) {
    std::vector<Marker> out;
    std::size_t i = 0;
    while ((i = text.find('[', i)) != std::string_view::npos) {
        std::size_t j = i + 1;
        std::size_t k = 0;
        bool overflow = false;
        while (j < text.size() && text[j] >= '0' && text[j] <= '9') {
            const std::size_t digit = static_cast<std::size_t>(text[j] - '0');
            if (k > (std::numeric_limits<std::size_t>::max() - digit) / 10) overflow = true;
            k = overflow ? std::numeric_limits<std::size_t>::max() : k * 10 + digit;
            ++j;
        }
        if (j > i + 1 && j < text.size() && text[j] == ']') {
            out.push_back({k, i, j + 1});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<std::size_t> indices(std::string_view text) {
    std::vector<std::size_t> out;
    for (const auto& m : find(text)) out.push_back(m.index);
    return out;
}

bool well_formed(std::string_view text, std::size_t n) {
    for (const auto& m : find(text)) {
        if (m.index < 1 || m.index > n) return false;
    }
    return true;
}

namespace {

template <class Keep>
std::string drop_markers(std::string_view text, Keep keep, std::vector<std::size_t>* removed) {
    std::string out;
    out.reserve(text.size());
    std::size_t from = 0;
    for (const auto& m : find(text)) {
        out.append(text.substr(from, m.begin - from));
        if (keep(m)) {
            out.append(text.substr(m.begin, m.end - m.begin));
        } else {
            while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
            if (removed) removed->push_back(m.index);
        }
        from = m.end;
    }
    out.append(text.substr(from));
    return out;
}

}  // namespace

Sanitized sanitize(std::string_view text, std::size_t n) {
    Sanitized s;
    s.text = drop_markers(text, [n](const Marker& m) { return m.index >= 1 && m.index <= n; }, &s.removed);
    return s;
}

std::string strip(std::string_view text) {
    return drop_markers(text, [](const Marker&) { return false; }, nullptr);
}

std::string renumber(std::string_view text, std::size_t offset) {
    std::string out;
    out.reserve(text.size());
    std::size_t from = 0;
    for (const auto& m : find(text)) {
        out.append(text.substr(from, m.begin - from));
        out += "[" + std::to_string(m.index + offset) + "]";
        from = m.end;
    }
    out.append(text.substr(from));
    return out;
}

}  // namespace sunset::citations
