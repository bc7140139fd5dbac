#include "sunset/textmatch.hpp"

#include "sunset/utf8.hpp"

namespace sunset::textmatch {

SuffixAutomaton::SuffixAutomaton(std::u32string_view text) {
    states_.reserve(2 * text.size() + 1);
    states_.emplace_back();
    for (std::size_t i = 0; i < text.size(); ++i) {
        extend(text[i], static_cast<std::int32_t>(i));
    }
}

std::int32_t SuffixAutomaton::next(std::int32_t state, char32_t c) const noexcept {
    for (const Edge& e : states_[static_cast<std::size_t>(state)].edges) {
        if (e.symbol == c) return e.target;
    }
    return -1;
}

void SuffixAutomaton::set_edge(std::int32_t state, char32_t c, std::int32_t target) {
    for (Edge& e : states_[static_cast<std::size_t>(state)].edges) {
        if (e.symbol == c) {
            e.target = target;
            return;
        }
    }
    states_[static_cast<std::size_t>(state)].edges.push_back({c, target});
}

void SuffixAutomaton::extend(char32_t c, std::int32_t position) {
    const auto cur = static_cast<std::int32_t>(states_.size());
    states_.push_back({states_[static_cast<std::size_t>(last_)].len + 1, -1, position, {}});
    std::int32_t p = last_;
    while (p != -1 && next(p, c) == -1) {
        set_edge(p, c, cur);
        p = states_[static_cast<std::size_t>(p)].link;
    }
    if (p == -1) {
        states_[static_cast<std::size_t>(cur)].link = 0;
    } else {
        const std::int32_t q = next(p, c);
        if (states_[static_cast<std::size_t>(p)].len + 1 == states_[static_cast<std::size_t>(q)].len) {
            states_[static_cast<std::size_t>(cur)].link = q;
        } else {
            const auto clone = static_cast<std::int32_t>(states_.size());
            State copy = states_[static_cast<std::size_t>(q)];
            copy.len = states_[static_cast<std::size_t>(p)].len + 1;
            states_.push_back(std::move(copy));
            while (p != -1 && next(p, c) == q) {
                set_edge(p, c, clone);
                p = states_[static_cast<std::size_t>(p)].link;
            }
            states_[static_cast<std::size_t>(q)].link = clone;
            states_[static_cast<std::size_t>(cur)].link = clone;
        }
    }
    last_ = cur;
}

LcsResult SuffixAutomaton::longest_common_substring(std::u32string_view query) const {
    LcsResult best;
    std::int32_t v = 0;
    std::size_t l = 0;
    for (std::size_t i = 0; i < query.size(); ++i) {
        const char32_t c = query[i];
        while (v != 0 && next(v, c) == -1) {
            v = states_[static_cast<std::size_t>(v)].link;
            l = static_cast<std::size_t>(states_[static_cast<std::size_t>(v)].len);
        }
        if (const std::int32_t t = next(v, c); t != -1) {
            v = t;
            ++l;
        } else {
            v = 0;
            l = 0;
        }
        if (l == 0 || l < best.length) continue;
        // first occurrence in the indexed text of the l-long match ending here
        const auto end = static_cast<std::size_t>(states_[static_cast<std::size_t>(v)].first_end);
        const std::size_t offset_b = end + 1 - l;
        const std::size_t offset_a = i + 1 - l;
        if (l > best.length || offset_b < best.offset_b) {
            best = {l, offset_a, offset_b};
        }
    }
    return best;
}

LcsResult longest_common_substring(std::u32string_view a, std::u32string_view b) {
    if (a.empty() || b.empty()) return {};
    return SuffixAutomaton(b).longest_common_substring(a);
}

LcsResult longest_common_substring(std::string_view a, std::string_view b) {
    return longest_common_substring(std::u32string_view(utf8::decode(a)),
                                    std::u32string_view(utf8::decode(b)));
}

}  // namespace sunset::textmatch
