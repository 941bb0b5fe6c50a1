#include "retcore/utf8.hpp"

#include <algorithm>
#include <array>

#include "retcore/errors.hpp"

namespace retcore::utf8 {

namespace {

[[noreturn]] void fail(const char* what, std::size_t offset) {
  throw EncodingError(offset, what);
}

}  // namespace

char32_t decode_one(std::string_view text, std::size_t& offset) {
  const std::size_t start = offset;
  const auto byte = [&](std::size_t i) -> std::uint8_t {
    return static_cast<std::uint8_t>(text[i]);
  };

  const std::uint8_t lead = byte(offset);
  if (lead < 0x80) {
    ++offset;
    return lead;
  }

  int extra;
  char32_t cp;
  char32_t min_value;
  if ((lead & 0xe0) == 0xc0) {
    extra = 1;
    cp = lead & 0x1f;
    min_value = 0x80;
  } else if ((lead & 0xf0) == 0xe0) {
    extra = 2;
    cp = lead & 0x0f;
    min_value = 0x800;
  } else if ((lead & 0xf8) == 0xf0) {
    extra = 3;
    cp = lead & 0x07;
    min_value = 0x10000;
  } else {
    fail("invalid UTF-8 lead byte", start);
  }

  if (offset + 1 + static_cast<std::size_t>(extra) > text.size()) {
    fail("truncated UTF-8 sequence", start);
  }
  for (int i = 1; i <= extra; ++i) {
    const std::uint8_t cont = byte(offset + static_cast<std::size_t>(i));
    if ((cont & 0xc0) != 0x80) fail("invalid UTF-8 continuation byte", start);
    cp = (cp << 6) | (cont & 0x3f);
  }

  if (cp < min_value) fail("overlong UTF-8 encoding", start);
  if (cp >= 0xd800 && cp <= 0xdfff) fail("surrogate code point in UTF-8", start);
  if (cp > 0x10ffff) fail("code point above U+10FFFF", start);

  offset += 1 + static_cast<std::size_t>(extra);
  return cp;
}

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t offset = 0;
  while (offset < text.size()) {
    out.push_back(decode_one(text, offset));
  }
  return out;
}

void append(std::string& out, char32_t cp) {
  if (!is_scalar_value(cp)) {
    throw EncodingError(0, "cannot encode non-scalar value");
  }
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

std::string encode(const std::vector<char32_t>& codepoints) {
  std::string out;
  out.reserve(codepoints.size() * 2);
  for (char32_t cp : codepoints) append(out, cp);
  return out;
}

std::string encode_one(char32_t cp) {
  std::string out;
  append(out, cp);
  return out;
}

bool is_scalar_value(char32_t cp) {
  return cp <= 0x10ffff && !(cp >= 0xd800 && cp <= 0xdfff);
}

bool is_whitespace(char32_t cp) {
  // Unicode 15 White_Space property.
  static constexpr std::array<char32_t, 25> kWhitespace = {
      0x0009, 0x000a, 0x000b, 0x000c, 0x000d, 0x0020, 0x0085, 0x00a0, 0x1680,
      0x2000, 0x2001, 0x2002, 0x2003, 0x2004, 0x2005, 0x2006, 0x2007, 0x2008,
      0x2009, 0x200a, 0x2028, 0x2029, 0x202f, 0x205f, 0x3000};
  return std::find(kWhitespace.begin(), kWhitespace.end(), cp) != kWhitespace.end();
}

}  // namespace retcore::utf8
