#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace retcore::utf8 {

// Decodes strict UTF-8. Overlong forms, surrogate code points, values above
// U+10FFFF and truncated sequences raise EncodingError with the byte offset.
std::vector<char32_t> decode(std::string_view text);

// Decodes the sequence starting at `offset`, advancing it past the character.
char32_t decode_one(std::string_view text, std::size_t& offset);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& codepoints);
std::string encode_one(char32_t cp);

bool is_scalar_value(char32_t cp);

// Unicode White_Space property (used for word splitting).
bool is_whitespace(char32_t cp);

}  // namespace retcore::utf8
