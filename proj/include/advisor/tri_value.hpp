#pragma once

#include <array>
#include <string_view>

namespace advisor {

/// Applicable, not applicable, or no information.
enum class TriValue : unsigned char { Yes, No, DontCare };

inline constexpr std::array<TriValue, 3> kAllTriValues{TriValue::Yes, TriValue::No,
                                                       TriValue::DontCare};

/// Wire names: "yes", "no", "dont_care".
std::string_view to_string(TriValue value) noexcept;

/// Inverse of to_string. Throws FormatError on anything else.
TriValue parse_tri_value(std::string_view text);

} // namespace advisor
