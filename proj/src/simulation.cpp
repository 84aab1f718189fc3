#include "advisor/simulation.hpp"

#include <fstream>

namespace advisor::service {

SimulationScript SimulationScript::from_json(const nlohmann::json& doc) {
    try {
        SimulationScript s;
        if (!doc.is_object())
            throw FormatError("script must be a JSON object");
        s.session_id = doc.value("session_id", s.session_id);
        const auto spots = doc.at("spots").get<std::vector<std::string>>();
        if (spots.size() != 2)
            throw FormatError("script 'spots' must name exactly two spots");
        s.spot_a = spots[0];
        s.spot_b = spots[1];
        s.agency_spot = doc.at("agency_spot").get<int>();
        s.start_time = doc.value("start_time", std::int64_t{0});
        std::int64_t last = 0;
        for (const auto& t : doc.at("turns")) {
            Step step;
            step.at_ms = t.at("at_ms").get<std::int64_t>();
            if (step.at_ms < last)
                throw FormatError("script turn offsets must not decrease");
            last = step.at_ms;
            if (t.value("timeout", false)) {
                if (t.contains("text"))
                    throw FormatError("a script turn is either text or a timeout");
            } else {
                step.text = t.at("text").get<std::string>();
            }
            s.steps.push_back(std::move(step));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed script: ") + e.what());
    }
}

SimulationScript SimulationScript::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open script " + path.string());
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw FormatError(path.string() + " is not valid JSON");
    return from_json(doc);
}

SimulationResult run_simulation(const SimulationScript& script, const Catalog& catalog,
                                const nlu::Lexicon& lexicon) {
    const SpotRecord* a = catalog.find(script.spot_a);
    const SpotRecord* b = catalog.find(script.spot_b);
    if (a == nullptr)
        throw FormatError("script names unknown spot '" + script.spot_a + "'");
    if (b == nullptr)
        throw FormatError("script names unknown spot '" + script.spot_b + "'");

    auto started = dialogue::start_session(script.session_id, *a, *b, script.agency_spot,
                                           script.start_time, lexicon.schema(),
                                           dialogue::Phrasebook::from_overrides(lexicon.prompts()));
    SimulationResult result{std::move(started.session), std::move(started.greeting), {}, 0};
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        if (result.session.ended()) {
            result.unused_steps = script.steps.size() - i;
            break;
        }
        const auto& st = script.steps[i];
        const auto input = st.text ? dialogue::EngineInput::utterance(*st.text)
                                   : dialogue::EngineInput::timeout();
        auto out = dialogue::step(std::move(result.session), input, script.start_time + st.at_ms,
                                  lexicon);
        result.session = std::move(out.session);
        result.replies.push_back(std::move(out.reply));
    }
    return result;
}

} // namespace advisor::service
