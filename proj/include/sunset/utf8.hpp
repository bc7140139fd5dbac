#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace sunset::utf8 {

/// Decode to code points; malformed sequences become U+FFFD.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

/// Number of code points in text.
std::size_t length(std::string_view text);

/// Byte offset of the code point with index cp_index (text.size() when past the end).
std::size_t byte_offset(std::string_view text, std::size_t cp_index);

/// Largest byte position <= pos that does not split a multi-byte sequence.
std::size_t floor_boundary(std::string_view text, std::size_t pos);

}  // namespace sunset::utf8
