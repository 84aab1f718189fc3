#include "advisor/tri_value.hpp"

#include <string>

#include "advisor/errors.hpp"

namespace advisor {

std::string_view to_string(TriValue value) noexcept {
    switch (value) {
    case TriValue::Yes:
        return "yes";
    case TriValue::No:
        return "no";
    case TriValue::DontCare:
        break;
    }
    return "dont_care";
}

TriValue parse_tri_value(std::string_view text) {
    for (TriValue v : kAllTriValues) {
        if (to_string(v) == text)
            return v;
    }
    throw FormatError("invalid tri-value '" + std::string(text) + "'");
}

} // namespace advisor
