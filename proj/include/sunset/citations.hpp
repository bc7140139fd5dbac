#pragma once

// [k] citation markers inside summaries.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sunset::citations {

struct Marker {
    std::size_t index;  // k as written
    std::size_t begin;  // byte offset of '['
    std::size_t end;    // one past ']'
};

/// All [k] markers with k a run of ASCII digits, in order of appearance.
std::vector<Marker> find(std::string_view text);

/// The k of every marker, in order.
std::vector<std::size_t> indices(std::string_view text);

/// True when every marker satisfies 1 <= k <= n.
bool well_formed(std::string_view text, std::size_t n);

struct Sanitized {
    std::string text;
    std::vector<std::size_t> removed;  // k of each dropped marker
};

/// Drop markers outside [1, n] together with the spaces before them.
Sanitized sanitize(std::string_view text, std::size_t n);

/// Rewrite every [k] as [k + offset].
std::string renumber(std::string_view text, std::size_t offset);

/// Remove every marker (and the spaces before it).
std::string strip(std::string_view text);

}  // namespace sunset::citations
