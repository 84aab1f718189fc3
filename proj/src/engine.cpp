#include "advisor/engine.hpp"

#include "advisor/normalize.hpp"
#include "advisor/recommender.hpp"

namespace advisor::dialogue {

namespace {

constexpr std::string_view kQaPrefix = "qa:";

std::string substitute(std::string text, std::string_view key, std::string_view value) {
    const std::string token = "{" + std::string(key) + "}";
    for (auto pos = text.find(token); pos != std::string::npos;
         pos = text.find(token, pos + value.size()))
        text.replace(pos, token.size(), value);
    return text;
}

std::string fill(std::string text, const Session& s) {
    text = substitute(std::move(text), "spot_a", s.spot_a.name);
    return substitute(std::move(text), "spot_b", s.spot_b.name);
}

std::string join(std::string a, const std::string& b) {
    if (a.empty())
        return b;
    if (b.empty())
        return a;
    return a + " " + b;
}

std::string introduction(const Session& s, const Phrasebook& p, int spot_index) {
    const SpotRecord& spot = s.spot(spot_index);
    return join(spot.introduction, substitute(p.reason_question, "spot", spot.name));
}

// Matches an answer to `question_id`, merges the rule on a hit, and returns
// the acknowledgment to speak. Timeouts carry no answer and get none.
std::string absorb_answer(Session& s, Turn& input_turn, const EngineInput& input,
                          std::string_view question_id, const nlu::Lexicon& lexicon) {
    if (input.kind == EngineInput::Kind::Timeout)
        return {};
    input_turn.matched_question_id = std::string(question_id);
    if (auto hit = nlu::match_keywords(input.text, question_id, lexicon)) {
        s.user_vector = merge_update(s.user_vector, hit->entry->rule);
        input_turn.matched_entry_index = hit->index;
        return hit->entry->response;
    }
    input_turn.fallback = true;
    return lexicon.fallback_response();
}

// Moves to the next attribute question, or to the recommendation when none
// are left, and returns the prompt for the new stage.
std::string advance_to_questions(Session& s, const Phrasebook& p) {
    if (s.pending_questions.empty()) {
        s.stage = Stage::recommendation();
        return p.before_recommendation;
    }
    const std::string& next = s.pending_questions.front();
    s.stage = Stage::attribute_question(next);
    return s.user_vector.schema().at(s.user_vector.schema().require_index(next)).question_text;
}

struct QaHit {
    std::string question_id;
    std::size_t index;
    const std::string* answer;
};

std::optional<QaHit> match_qa(const Session& s, std::string_view utterance) {
    const std::string text = nlu::normalize(utterance);
    for (const SpotRecord* spot : {&s.spot_a, &s.spot_b}) {
        for (std::size_t i = 0; i < spot->qa_entries.size(); ++i) {
            std::vector<std::string> keys;
            for (const auto& k : spot->qa_entries[i].keywords)
                keys.push_back(nlu::normalize(k));
            if (nlu::contains_keyword(text, keys))
                return QaHit{std::string(kQaPrefix) + spot->id, i, &spot->qa_entries[i].answer};
        }
    }
    return std::nullopt;
}

} // namespace

EngineInput EngineInput::utterance(std::string text) {
    if (nlu::normalize(text).empty())
        throw PreconditionError("utterance is empty");
    return {Kind::Utterance, std::move(text)};
}

Phrasebook Phrasebook::from_overrides(
    const std::map<std::string, std::string, std::less<>>& prompts) {
    Phrasebook p;
    const std::pair<std::string_view, std::string*> slots[] = {
        {"greeting", &p.greeting},
        {"reason_question", &p.reason_question},
        {"general_question", &p.general_question},
        {"before_recommendation", &p.before_recommendation},
        {"qa_prompt", &p.qa_prompt},
        {"qa_miss", &p.qa_miss},
        {"final_greeting", &p.final_greeting},
    };
    for (const auto& [key, text] : prompts) {
        bool known = false;
        for (const auto& [slot_key, slot] : slots) {
            if (slot_key == key) {
                if (text.empty())
                    throw FormatError("prompt '" + key + "' must not be empty");
                *slot = text;
                known = true;
            }
        }
        if (!known)
            throw FormatError("unknown prompt key '" + key + "'");
    }
    return p;
}

std::vector<std::string> required_question_ids(const AttributeSchema& schema) {
    std::vector<std::string> ids{std::string(kReasonQuestion0), std::string(kReasonQuestion1),
                                 std::string(kGeneralQuestion), std::string(kQaDoneQuestion)};
    for (const auto& attr : schema.attributes())
        ids.push_back(attr.id);
    return ids;
}

StartOutcome start_session(std::string session_id, const SpotRecord& spot_a,
                           const SpotRecord& spot_b, int agency_spot, std::int64_t now,
                           const SchemaPtr& schema, const Phrasebook& phrases) {
    if (spot_a.id == spot_b.id)
        throw PreconditionError("a consultation needs two different spots, got '" + spot_a.id +
                                "' twice");
    if (agency_spot != 0 && agency_spot != 1)
        throw PreconditionError("agency_spot must be 0 or 1");

    AttributeVector va = extract_attribute_vector(spot_a, schema);
    AttributeVector vb = extract_attribute_vector(spot_b, schema);
    std::vector<std::string> pending = differing_attributes(va, vb);
    Session s{std::move(session_id),
              spot_a,
              spot_b,
              agency_spot,
              std::move(va),
              std::move(vb),
              init_user_vector(schema),
              Stage::greeting(),
              std::move(pending),
              now,
              {}};
    std::string greeting = fill(phrases.greeting, s);
    return {std::move(s), std::move(greeting)};
}

StepOutcome step(Session s, const EngineInput& input, std::int64_t now,
                 const nlu::Lexicon& lexicon) {
    if (s.ended())
        throw SessionEnded("session '" + s.id + "' has already ended");
    const Phrasebook p = Phrasebook::from_overrides(lexicon.prompts());

    Turn in;
    in.index = s.turn_log.size();
    in.speaker = input.kind == EngineInput::Kind::Timeout ? Speaker::Event : Speaker::User;
    in.text = input.text;
    in.time = now;
    in.stage = s.stage;

    std::string reply;
    Stage reply_stage;
    const bool over_time = now - s.start_time > kSessionTimeLimitMs;

    if (over_time) {
        reply = fill(p.final_greeting, s);
        reply_stage = Stage::final_greeting();
        s.stage = Stage::ended();
    } else {
        switch (s.stage.kind) {
        case StageKind::Greeting:
            s.stage = Stage::introduce(0);
            reply = introduction(s, p, 0);
            break;
        case StageKind::IntroduceAndAskReason: {
            const int spot = s.stage.spot_index;
            const std::string ack = absorb_answer(
                s, in, input, spot == 0 ? kReasonQuestion0 : kReasonQuestion1, lexicon);
            if (spot == 0) {
                s.stage = Stage::introduce(1);
                reply = join(ack, introduction(s, p, 1));
            } else {
                s.stage = Stage::general_question();
                reply = join(ack, p.general_question);
            }
            break;
        }
        case StageKind::GeneralQuestion: {
            const std::string ack = absorb_answer(s, in, input, kGeneralQuestion, lexicon);
            reply = join(ack, advance_to_questions(s, p));
            break;
        }
        case StageKind::AttributeQuestion: {
            const std::string asked = s.stage.attribute_id;
            const std::string ack = absorb_answer(s, in, input, asked, lexicon);
            if (!s.pending_questions.empty() && s.pending_questions.front() == asked)
                s.pending_questions.erase(s.pending_questions.begin());
            reply = join(ack, advance_to_questions(s, p));
            break;
        }
        case StageKind::Recommendation: {
            const int other = 1 - s.agency_spot;
            const SpotRecord& r = s.spot(s.agency_spot);
            const SpotRecord& n = s.spot(other);
            const auto result = recommend(s.agency_spot == 0 ? s.vector_a : s.vector_b,
                                          other == 0 ? s.vector_a : s.vector_b, s.user_vector,
                                          {r.id, r.name}, {n.id, n.name});
            s.stage = Stage::qanda();
            reply = join(result.message, fill(p.qa_prompt, s));
            break;
        }
        case StageKind::QandA:
            if (input.kind == EngineInput::Kind::Timeout) {
                reply = fill(p.final_greeting, s);
                reply_stage = Stage::final_greeting();
                s.stage = Stage::ended();
            } else if (auto qa = match_qa(s, input.text)) {
                in.matched_question_id = qa->question_id;
                in.matched_entry_index = qa->index;
                reply = *qa->answer;
            } else if (auto done = nlu::match_keywords(input.text, kQaDoneQuestion, lexicon)) {
                in.matched_question_id = std::string(kQaDoneQuestion);
                in.matched_entry_index = done->index;
                reply = join(done->entry->response, fill(p.final_greeting, s));
                reply_stage = Stage::final_greeting();
                s.stage = Stage::ended();
            } else {
                reply = p.qa_miss;
            }
            break;
        case StageKind::FinalGreeting:
            reply = fill(p.final_greeting, s);
            reply_stage = Stage::final_greeting();
            s.stage = Stage::ended();
            break;
        case StageKind::Ended:
            break;
        }
    }
    if (!s.ended())
        reply_stage = s.stage;

    Turn out;
    out.index = in.index + 1;
    out.speaker = Speaker::System;
    out.text = reply;
    out.time = now;
    out.stage = reply_stage;
    s.turn_log.push_back(std::move(in));
    s.turn_log.push_back(std::move(out));
    return {std::move(s), std::move(reply)};
}

Transcript transcript(const Session& s) {
    return {{s.id, s.spot_a.id, s.spot_b.id, s.agency_spot, s.start_time}, s.turn_log};
}

Session replay(const Transcript& t, const Catalog& catalog, const nlu::Lexicon& lexicon) {
    const SpotRecord* a = catalog.find(t.header.spot_a);
    const SpotRecord* b = catalog.find(t.header.spot_b);
    if (a == nullptr || b == nullptr)
        throw FormatError("transcript refers to a spot missing from the catalog");
    const Phrasebook phrases = Phrasebook::from_overrides(lexicon.prompts());
    Session s = start_session(t.header.session_id, *a, *b, t.header.agency_spot,
                              t.header.start_time, lexicon.schema(), phrases)
                    .session;
    for (const Turn& turn : t.turns) {
        if (turn.speaker == Speaker::System)
            continue;
        const EngineInput input = turn.speaker == Speaker::Event ? EngineInput::timeout()
                                                                 : EngineInput::utterance(turn.text);
        s = step(std::move(s), input, turn.time, lexicon).session;
    }
    return s;
}

AttributeVector replay_user_vector(const std::vector<Turn>& turns, const nlu::Lexicon& lexicon) {
    AttributeVector v = init_user_vector(lexicon.schema());
    for (const Turn& turn : turns) {
        if (!turn.matched_question_id || !turn.matched_entry_index)
            continue;
        const std::string& qid = *turn.matched_question_id;
        if (qid.starts_with(kQaPrefix) || qid == kQaDoneQuestion)
            continue;
        const auto& entries = lexicon.entries(qid);
        if (*turn.matched_entry_index >= entries.size())
            throw FormatError("turn " + std::to_string(turn.index) +
                              " names an entry the lexicon does not have");
        v = merge_update(v, entries[*turn.matched_entry_index].rule);
    }
    return v;
}

} // namespace advisor::dialogue
