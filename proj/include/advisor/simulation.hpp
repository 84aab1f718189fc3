#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advisor/engine.hpp"
#include "json.hpp"

namespace advisor::service {

/// A scripted consultation:
///   {"session_id": "...", "spots": ["<a>", "<b>"], "agency_spot": 0|1,
///    "start_time": <ms, optional>,
///    "turns": [{"at_ms": <offset>, "text": "..."} | {"at_ms": <offset>, "timeout": true}]}
/// Offsets are relative to start_time and must not decrease.
struct SimulationScript {
    struct Step {
        std::int64_t at_ms = 0;
        std::optional<std::string> text; // absent means a timeout
    };

    std::string session_id = "simulation";
    std::string spot_a;
    std::string spot_b;
    int agency_spot = 0;
    std::int64_t start_time = 0;
    std::vector<Step> steps;

    static SimulationScript from_json(const nlohmann::json& doc);
    static SimulationScript load(const std::filesystem::path& path);
};

struct SimulationResult {
    dialogue::Session session;
    std::string greeting;
    std::vector<std::string> replies;
    std::size_t unused_steps = 0; // script steps left after the session ended
};

/// Runs the script to completion or until the session ends.
SimulationResult run_simulation(const SimulationScript& script, const Catalog& catalog,
                                const nlu::Lexicon& lexicon);

} // namespace advisor::service
