#pragma once

#include <string>
#include <string_view>

namespace advisor::dialogue {

enum class StageKind {
    Greeting,
    IntroduceAndAskReason,
    GeneralQuestion,
    AttributeQuestion,
    Recommendation,
    QandA,
    FinalGreeting,
    Ended,
};

/// Where the conversation is. IntroduceAndAskReason carries the spot index,
/// AttributeQuestion the attribute being asked about.
struct Stage {
    StageKind kind = StageKind::Greeting;
    int spot_index = 0;
    std::string attribute_id;

    static Stage greeting() { return {StageKind::Greeting, 0, {}}; }
    static Stage introduce(int spot) { return {StageKind::IntroduceAndAskReason, spot, {}}; }
    static Stage general_question() { return {StageKind::GeneralQuestion, 0, {}}; }
    static Stage attribute_question(std::string id) {
        return {StageKind::AttributeQuestion, 0, std::move(id)};
    }
    static Stage recommendation() { return {StageKind::Recommendation, 0, {}}; }
    static Stage qanda() { return {StageKind::QandA, 0, {}}; }
    static Stage final_greeting() { return {StageKind::FinalGreeting, 0, {}}; }
    static Stage ended() { return {StageKind::Ended, 0, {}}; }

    /// "greeting", "introduce_and_ask_reason:1", "attribute_question:parking", ...
    std::string to_string() const;
    static Stage parse(std::string_view text);

    /// Position in the canonical conversation order. Every attribute
    /// question shares one rank.
    int rank() const noexcept;

    friend bool operator==(const Stage&, const Stage&) = default;
};

/// True if `to` may follow `from` in a turn log: rank never decreases.
inline bool is_forward(const Stage& from, const Stage& to) noexcept {
    return to.rank() >= from.rank();
}

} // namespace advisor::dialogue
