#pragma once

#include <string>
#include <string_view>

namespace advisor::nlu {

/// NFKC with case folding, then every whitespace run collapsed to a single
/// ASCII space and the ends trimmed. Idempotent. Input and output are UTF-8.
std::string normalize(std::string_view text);

/// Decodes UTF-8 into code points (invalid sequences become U+FFFD).
std::u32string to_code_points(std::string_view utf8);

} // namespace advisor::nlu
