#include "advisor/stage.hpp"

#include "advisor/errors.hpp"

namespace advisor::dialogue {

namespace {

constexpr std::string_view kIntro = "introduce_and_ask_reason:";
constexpr std::string_view kAttribute = "attribute_question:";

} // namespace

std::string Stage::to_string() const {
    switch (kind) {
    case StageKind::Greeting:
        return "greeting";
    case StageKind::IntroduceAndAskReason:
        return std::string(kIntro) + std::to_string(spot_index);
    case StageKind::GeneralQuestion:
        return "general_question";
    case StageKind::AttributeQuestion:
        return std::string(kAttribute) + attribute_id;
    case StageKind::Recommendation:
        return "recommendation";
    case StageKind::QandA:
        return "qanda";
    case StageKind::FinalGreeting:
        return "final_greeting";
    case StageKind::Ended:
        break;
    }
    return "ended";
}

Stage Stage::parse(std::string_view text) {
    if (text.starts_with(kIntro)) {
        auto rest = text.substr(kIntro.size());
        if (rest == "0" || rest == "1")
            return introduce(rest == "1" ? 1 : 0);
    } else if (text.starts_with(kAttribute) && text.size() > kAttribute.size()) {
        return attribute_question(std::string(text.substr(kAttribute.size())));
    }
    for (Stage s : {greeting(), general_question(), recommendation(), qanda(), final_greeting(),
                    ended()}) {
        if (s.to_string() == text)
            return s;
    }
    throw FormatError("unknown stage '" + std::string(text) + "'");
}

int Stage::rank() const noexcept {
    switch (kind) {
    case StageKind::Greeting:
        return 0;
    case StageKind::IntroduceAndAskReason:
        return 1 + spot_index;
    case StageKind::GeneralQuestion:
        return 3;
    case StageKind::AttributeQuestion:
        return 4;
    case StageKind::Recommendation:
        return 5;
    case StageKind::QandA:
        return 6;
    case StageKind::FinalGreeting:
        return 7;
    case StageKind::Ended:
        break;
    }
    return 8;
}

} // namespace advisor::dialogue
