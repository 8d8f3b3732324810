#pragma once

#include <string>
#include <string_view>

namespace nlx {

// Decodes UTF-8 into code points. Throws Error(kEncoding) on malformed input,
// overlong forms, surrogates, and values above U+10FFFF.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view code_points);

// Simple one-to-one lowercase mapping for Basic Latin, Latin-1 Supplement
// and Latin Extended-A. Other code points are returned unchanged.
char32_t fold_case(char32_t c) noexcept;

}  // namespace nlx
