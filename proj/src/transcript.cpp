#include "advisor/transcript.hpp"

#include <fstream>
#include <sstream>

#include "advisor/errors.hpp"

namespace advisor::dialogue {

namespace {

template <typename T>
T field(const nlohmann::json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw FormatError(std::string("transcript line is missing '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError(std::string("transcript field '") + key + "' has the wrong type");
    }
}

} // namespace

std::string_view to_string(Speaker speaker) noexcept {
    switch (speaker) {
    case Speaker::User:
        return "user";
    case Speaker::System:
        return "system";
    case Speaker::Event:
        break;
    }
    return "event";
}

Speaker parse_speaker(std::string_view text) {
    for (Speaker s : {Speaker::User, Speaker::System, Speaker::Event}) {
        if (to_string(s) == text)
            return s;
    }
    throw FormatError("unknown speaker '" + std::string(text) + "'");
}

nlohmann::ordered_json header_to_json(const TranscriptHeader& header) {
    return {{"session_id", header.session_id},
            {"spot_a", header.spot_a},
            {"spot_b", header.spot_b},
            {"agency_spot", header.agency_spot},
            {"start_time", header.start_time}};
}

TranscriptHeader header_from_json(const nlohmann::json& doc) {
    TranscriptHeader h{field<std::string>(doc, "session_id"), field<std::string>(doc, "spot_a"),
                       field<std::string>(doc, "spot_b"), field<int>(doc, "agency_spot"),
                       field<std::int64_t>(doc, "start_time")};
    if (h.agency_spot != 0 && h.agency_spot != 1)
        throw FormatError("agency_spot must be 0 or 1");
    return h;
}

nlohmann::ordered_json turn_to_json(const Turn& turn) {
    nlohmann::ordered_json doc{{"index", turn.index},
                               {"speaker", to_string(turn.speaker)},
                               {"text", turn.text},
                               {"time", turn.time},
                               {"stage", turn.stage.to_string()}};
    doc["matched_question_id"] = turn.matched_question_id ? nlohmann::ordered_json(*turn.matched_question_id)
                                                          : nlohmann::ordered_json(nullptr);
    doc["matched_entry_index"] = turn.matched_entry_index ? nlohmann::ordered_json(*turn.matched_entry_index)
                                                          : nlohmann::ordered_json(nullptr);
    doc["fallback"] = turn.fallback;
    return doc;
}

Turn turn_from_json(const nlohmann::json& doc) {
    Turn t;
    t.index = field<std::size_t>(doc, "index");
    t.speaker = parse_speaker(field<std::string>(doc, "speaker"));
    t.text = field<std::string>(doc, "text");
    t.time = field<std::int64_t>(doc, "time");
    t.stage = Stage::parse(field<std::string>(doc, "stage"));
    if (auto it = doc.find("matched_question_id"); it != doc.end() && !it->is_null())
        t.matched_question_id = it->get<std::string>();
    if (auto it = doc.find("matched_entry_index"); it != doc.end() && !it->is_null())
        t.matched_entry_index = it->get<std::size_t>();
    t.fallback = field<bool>(doc, "fallback");
    if (t.fallback && t.matched_entry_index)
        throw FormatError("turn " + std::to_string(t.index) +
                          " is marked fallback but names a matched entry");
    return t;
}

std::string to_line(const nlohmann::ordered_json& doc) {
    return doc.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string Transcript::to_jsonl() const {
    std::string out = to_line(header_to_json(header)) + '\n';
    for (const auto& t : turns)
        out += to_line(turn_to_json(t)) + '\n';
    return out;
}

Transcript Transcript::from_jsonl(std::string_view text) {
    Transcript transcript;
    bool have_header = false;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("transcript line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!have_header) {
            transcript.header = header_from_json(doc);
            have_header = true;
        } else {
            transcript.turns.push_back(turn_from_json(doc));
        }
    }
    if (!have_header)
        throw FormatError("transcript has no header line");
    return transcript;
}

Transcript Transcript::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open transcript " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
}

} // namespace advisor::dialogue
