#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/engine.hpp"
#include "advisor/lexicon.hpp"
#include "advisor/spot.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace advisor::service {

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;
std::int64_t system_clock_ms();

/// $ADVISOR_LOG_DIR when set, otherwise `fallback`.
std::filesystem::path transcript_dir(const std::filesystem::path& fallback);

/// Live sessions plus one append-only JSONL transcript per session. Every
/// step is written to disk before the in-memory session is replaced.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::filesystem::path file_for(std::string_view session_id) const;

    /// Registers a new session and writes its header line (plus any turns
    /// it already has). Throws PreconditionError if the id is taken.
    void insert(dialogue::Session session, std::int64_t now);
    /// Registers a session whose transcript file already exists.
    void adopt(dialogue::Session session, std::int64_t now);

    enum class StepStatus { Ok, NotFound, Ended };
    struct StepResult {
        StepStatus status = StepStatus::NotFound;
        std::string reply;
        dialogue::Stage stage;
    };

    /// Serialized per session: concurrent calls on one id run one at a time.
    StepResult step(std::string_view session_id, const dialogue::EngineInput& input,
                    std::int64_t now, const nlu::Lexicon& lexicon);

    std::optional<dialogue::Session> snapshot(std::string_view session_id) const;
    std::vector<std::string> session_ids() const;

    /// Sends a Timeout to every live session idle for at least `idle_ms`.
    /// Returns how many sessions were advanced.
    std::size_t sweep_idle(std::int64_t now, std::int64_t idle_ms, const nlu::Lexicon& lexicon);

private:
    struct Entry {
        Entry(dialogue::Session s, std::int64_t now) : session(std::move(s)), last_activity(now) {}

        std::mutex mutex;
        dialogue::Session session;
        std::int64_t last_activity;
    };

    std::shared_ptr<Entry> find(std::string_view session_id) const;
    void append_lines(std::string_view session_id, const std::string& lines) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
};

struct ServiceConfig {
    std::filesystem::path log_dir = "transcripts";
    std::int64_t idle_timeout_ms = 15'000;
};

struct Response {
    int status = 200;
    nlohmann::json body;
    std::string raw_body; // used instead of body when non-empty
    std::string content_type = "application/json";
};

/// HTTP-independent request handlers; mount() binds them to routes.
class AdvisorService {
public:
    /// Throws FormatError if the lexicon lacks a question the engine needs.
    AdvisorService(Catalog catalog, nlu::Lexicon lexicon, ServiceConfig config);

    Response list_spots() const;
    Response create_session(std::string_view body, std::int64_t now);
    Response post_turn(std::string_view session_id, std::string_view body, std::int64_t now);
    Response get_transcript(std::string_view session_id) const;

    std::size_t sweep_idle(std::int64_t now);
    /// Rebuilds sessions from the transcript directory by replaying each
    /// transcript through the engine. Returns the number recovered.
    std::size_t recover(std::int64_t now);

    /// GET /api/spots, POST /api/sessions, POST /api/sessions/{id}/turns,
    /// GET /api/sessions/{id}/transcript. An integer X-Advisor-Now header
    /// overrides the clock for that request.
    void mount(httplib::Server& server, Clock clock);

    const Catalog& catalog() const noexcept { return catalog_; }
    const nlu::Lexicon& lexicon() const noexcept { return lexicon_; }
    SessionStore& store() noexcept { return store_; }
    const ServiceConfig& config() const noexcept { return config_; }

private:
    std::string new_session_id();

    Catalog catalog_;
    nlu::Lexicon lexicon_;
    ServiceConfig config_;
    dialogue::Phrasebook phrases_;
    SessionStore store_;
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

} // namespace advisor::service
