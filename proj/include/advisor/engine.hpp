#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "advisor/attribute_vector.hpp"
#include "advisor/errors.hpp"
#include "advisor/lexicon.hpp"
#include "advisor/spot.hpp"
#include "advisor/stage.hpp"
#include "advisor/transcript.hpp"

namespace advisor::dialogue {

/// Hard cap on a consultation, measured from the session start.
inline constexpr std::int64_t kSessionTimeLimitMs = 300'000;

/// Lexicon question ids the engine consults besides one per attribute.
inline constexpr std::string_view kReasonQuestion0 = "reason_0";
inline constexpr std::string_view kReasonQuestion1 = "reason_1";
inline constexpr std::string_view kGeneralQuestion = "general";
inline constexpr std::string_view kQaDoneQuestion = "qa_done";

/// Thrown by step() once the session has ended.
class SessionEnded : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

struct EngineInput {
    enum class Kind { Utterance, Timeout };

    Kind kind = Kind::Timeout;
    std::string text;

    /// Throws PreconditionError if the text is empty after normalization.
    static EngineInput utterance(std::string text);
    static EngineInput timeout() { return {}; }
};

/// Fixed system lines. `{spot}`, `{spot_a}` and `{spot_b}` are substituted
/// with spot names. Any key can be overridden from the lexicon's "prompts".
struct Phrasebook {
    std::string greeting =
        "Hello, I am your travel consultant. I understand you are choosing between {spot_a} "
        "and {spot_b}. Is that right?";
    std::string reason_question = "Why did you choose {spot}?";
    std::string general_question = "Will you travel alone?";
    std::string before_recommendation =
        "Thank you for answering my questions. Let me think about which spot suits you best.";
    std::string qa_prompt = "Do you have any questions about {spot_a} or {spot_b}?";
    std::string qa_miss = "Sorry, this information has not been provided.";
    std::string final_greeting = "Thank you for consulting with us today. Have a wonderful trip!";

    static Phrasebook from_overrides(const std::map<std::string, std::string, std::less<>>& prompts);
};

struct Session {
    std::string id;
    SpotRecord spot_a;
    SpotRecord spot_b;
    int agency_spot = 0;
    AttributeVector vector_a;
    AttributeVector vector_b;
    AttributeVector user_vector;
    Stage stage;
    std::vector<std::string> pending_questions; // attribute questions not asked yet
    std::int64_t start_time = 0;
    std::vector<Turn> turn_log;

    const SpotRecord& spot(int index) const { return index == 0 ? spot_a : spot_b; }
    bool ended() const noexcept { return stage.kind == StageKind::Ended; }
};

struct StartOutcome {
    Session session;
    std::string greeting;
};

struct StepOutcome {
    Session session;
    std::string reply;
};

/// Lexicon question ids a conversation over `schema` may consult.
std::vector<std::string> required_question_ids(const AttributeSchema& schema);

/// Throws PreconditionError when both spots share an id or agency_spot is
/// not 0 or 1.
StartOutcome start_session(std::string session_id, const SpotRecord& spot_a,
                           const SpotRecord& spot_b, int agency_spot, std::int64_t now,
                           const SchemaPtr& schema, const Phrasebook& phrases = {});

/// Advances the conversation by one input and appends the input turn and
/// the reply turn to the log. Throws SessionEnded on an ended session.
StepOutcome step(Session session, const EngineInput& input, std::int64_t now,
                 const nlu::Lexicon& lexicon);

Transcript transcript(const Session& session);

/// Re-drives a fresh session with the transcript's inputs and timestamps.
Session replay(const Transcript& transcript, const Catalog& catalog, const nlu::Lexicon& lexicon);

/// Re-applies the rules of every matched lexicon entry in `turns`, starting
/// from an all-DontCare vector.
AttributeVector replay_user_vector(const std::vector<Turn>& turns, const nlu::Lexicon& lexicon);

} // namespace advisor::dialogue
