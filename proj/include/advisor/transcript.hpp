#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/stage.hpp"
#include "json.hpp"

namespace advisor::dialogue {

enum class Speaker { User, System, Event };

std::string_view to_string(Speaker speaker) noexcept;
Speaker parse_speaker(std::string_view text);

/// One line of the turn log. Match information lives on the input turn it
/// describes: matched_question_id is the question the input was matched
/// against, matched_entry_index the entry that fired, and fallback marks an
/// input that matched nothing and got the fallback acknowledgment.
struct Turn {
    std::size_t index = 0;
    Speaker speaker = Speaker::User;
    std::string text;
    std::int64_t time = 0;
    Stage stage;
    std::optional<std::string> matched_question_id;
    std::optional<std::size_t> matched_entry_index;
    bool fallback = false;

    friend bool operator==(const Turn&, const Turn&) = default;
};

struct TranscriptHeader {
    std::string session_id;
    std::string spot_a;
    std::string spot_b;
    int agency_spot = 0;
    std::int64_t start_time = 0;

    friend bool operator==(const TranscriptHeader&, const TranscriptHeader&) = default;
};

/// JSONL: one header line, then one line per turn.
struct Transcript {
    TranscriptHeader header;
    std::vector<Turn> turns;

    std::string to_jsonl() const;
    static Transcript from_jsonl(std::string_view text);
    static Transcript load(const std::filesystem::path& path);

    friend bool operator==(const Transcript&, const Transcript&) = default;
};

nlohmann::ordered_json header_to_json(const TranscriptHeader& header);
TranscriptHeader header_from_json(const nlohmann::json& doc);
nlohmann::ordered_json turn_to_json(const Turn& turn);
Turn turn_from_json(const nlohmann::json& doc);

/// Serialized line without the trailing newline.
std::string to_line(const nlohmann::ordered_json& doc);

} // namespace advisor::dialogue
