#include "advisor/service.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "httplib.h"

namespace advisor::service {

namespace {

Response error(int status, std::string message) {
    return {status, {{"error", std::move(message)}}, {}};
}

std::optional<nlohmann::json> parse_object(std::string_view body) {
    auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        return std::nullopt;
    return doc;
}

void reply_with(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    if (!r.raw_body.empty())
        res.set_content(r.raw_body, r.content_type);
    else
        res.set_content(r.body.dump(), r.content_type);
}

} // namespace

std::int64_t system_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::filesystem::path transcript_dir(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("ADVISOR_LOG_DIR"); env != nullptr && *env != '\0')
        return env;
    return fallback;
}

// SessionStore

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path SessionStore::file_for(std::string_view session_id) const {
    return dir_ / (std::string(session_id) + ".jsonl");
}

void SessionStore::append_lines(std::string_view session_id, const std::string& lines) const {
    std::ofstream out(file_for(session_id), std::ios::binary | std::ios::app);
    out << lines;
    out.flush();
    if (!out)
        throw Error("failed to write transcript for session '" + std::string(session_id) + "'");
}

void SessionStore::insert(dialogue::Session session, std::int64_t now) {
    std::unique_lock lock(map_mutex_);
    if (sessions_.contains(session.id))
        throw PreconditionError("session id '" + session.id + "' already exists");
    if (std::filesystem::exists(file_for(session.id)))
        throw PreconditionError("a transcript for '" + session.id + "' already exists");
    append_lines(session.id, dialogue::transcript(session).to_jsonl());
    std::string id = session.id;
    sessions_.emplace(std::move(id), std::make_shared<Entry>(std::move(session), now));
}

void SessionStore::adopt(dialogue::Session session, std::int64_t now) {
    std::unique_lock lock(map_mutex_);
    if (sessions_.contains(session.id))
        throw PreconditionError("session id '" + session.id + "' already exists");
    std::string id = session.id;
    sessions_.emplace(std::move(id), std::make_shared<Entry>(std::move(session), now));
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(std::string_view session_id) const {
    std::shared_lock lock(map_mutex_);
    auto it = sessions_.find(session_id);
    return it == sessions_.end() ? nullptr : it->second;
}

SessionStore::StepResult SessionStore::step(std::string_view session_id,
                                            const dialogue::EngineInput& input, std::int64_t now,
                                            const nlu::Lexicon& lexicon) {
    auto entry = find(session_id);
    if (!entry)
        return {StepStatus::NotFound, {}, {}};
    std::lock_guard lock(entry->mutex);
    if (entry->session.ended())
        return {StepStatus::Ended, {}, entry->session.stage};

    const std::size_t logged = entry->session.turn_log.size();
    auto outcome = dialogue::step(entry->session, input, now, lexicon);
    std::string lines;
    for (std::size_t i = logged; i < outcome.session.turn_log.size(); ++i)
        lines += dialogue::to_line(dialogue::turn_to_json(outcome.session.turn_log[i])) + '\n';
    append_lines(session_id, lines);

    entry->session = std::move(outcome.session);
    entry->last_activity = now;
    return {StepStatus::Ok, std::move(outcome.reply), entry->session.stage};
}

std::optional<dialogue::Session> SessionStore::snapshot(std::string_view session_id) const {
    auto entry = find(session_id);
    if (!entry)
        return std::nullopt;
    std::lock_guard lock(entry->mutex);
    return entry->session;
}

std::vector<std::string> SessionStore::session_ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : sessions_)
        ids.push_back(id);
    return ids;
}

std::size_t SessionStore::sweep_idle(std::int64_t now, std::int64_t idle_ms,
                                     const nlu::Lexicon& lexicon) {
    std::size_t advanced = 0;
    for (const auto& id : session_ids()) {
        auto entry = find(id);
        bool idle = false;
        {
            std::lock_guard lock(entry->mutex);
            idle = !entry->session.ended() && now - entry->last_activity >= idle_ms;
        }
        // A turn may land between the check and the step; the timeout then
        // applies to the following stage, which is harmless.
        if (idle && step(id, dialogue::EngineInput::timeout(), now, lexicon).status == StepStatus::Ok)
            ++advanced;
    }
    return advanced;
}

// AdvisorService

AdvisorService::AdvisorService(Catalog catalog, nlu::Lexicon lexicon, ServiceConfig config)
    : catalog_(std::move(catalog)),
      lexicon_(std::move(lexicon)),
      config_(std::move(config)),
      phrases_(dialogue::Phrasebook::from_overrides(lexicon_.prompts())),
      store_(config_.log_dir),
      rng_(std::random_device{}()) {
    lexicon_.require_questions(dialogue::required_question_ids(*lexicon_.schema()));
    for (const auto& spot : catalog_.spots())
        extract_attribute_vector(spot, lexicon_.schema());
}

std::string AdvisorService::new_session_id() {
    std::lock_guard lock(rng_mutex_);
    std::ostringstream id;
    id << std::hex << std::setfill('0') << std::setw(16) << rng_();
    return id.str();
}

Response AdvisorService::list_spots() const {
    auto spots = nlohmann::json::array();
    for (const auto& s : catalog_.spots())
        spots.push_back({{"id", s.id}, {"name", s.name}, {"spot_type", s.spot_type}});
    return {200, spots, {}};
}

Response AdvisorService::create_session(std::string_view body, std::int64_t now) {
    auto doc = parse_object(body);
    if (!doc || !(*doc)["spot_a_id"].is_string() || !(*doc)["spot_b_id"].is_string() ||
        !(*doc)["agency_spot"].is_number_integer())
        return error(400, "expected {spot_a_id, spot_b_id, agency_spot}");
    const std::string a_id = (*doc)["spot_a_id"];
    const std::string b_id = (*doc)["spot_b_id"];
    const int agency = (*doc)["agency_spot"];
    if (agency != 0 && agency != 1)
        return error(400, "agency_spot must be 0 or 1");
    if (a_id == b_id)
        return error(400, "spot_a_id and spot_b_id must differ");
    for (const auto& id : {a_id, b_id}) {
        if (catalog_.find(id) == nullptr) {
            Response r = error(404, "unknown spot id '" + id + "'");
            r.body["spot_id"] = id;
            return r;
        }
    }

    auto started = dialogue::start_session(new_session_id(), *catalog_.find(a_id),
                                           *catalog_.find(b_id), agency, now, lexicon_.schema(),
                                           phrases_);
    const std::string id = started.session.id;
    store_.insert(std::move(started.session), now);
    return {201,
            {{"session_id", id},
             {"greeting", started.greeting},
             {"stage", dialogue::Stage::greeting().to_string()}},
            {}};
}

Response AdvisorService::post_turn(std::string_view session_id, std::string_view body,
                                   std::int64_t now) {
    auto doc = parse_object(body);
    if (!doc)
        return error(400, "expected {\"text\": ...} or {\"timeout\": true}");
    dialogue::EngineInput input;
    if (auto t = doc->find("timeout"); t != doc->end() && t->is_boolean() && t->get<bool>()) {
        input = dialogue::EngineInput::timeout();
    } else if (auto text = doc->find("text"); text != doc->end() && text->is_string()) {
        try {
            input = dialogue::EngineInput::utterance(text->get<std::string>());
        } catch (const PreconditionError& e) {
            return error(400, e.what());
        }
    } else {
        return error(400, "expected {\"text\": ...} or {\"timeout\": true}");
    }

    auto result = store_.step(session_id, input, now, lexicon_);
    switch (result.status) {
    case SessionStore::StepStatus::NotFound:
        return error(404, "unknown session '" + std::string(session_id) + "'");
    case SessionStore::StepStatus::Ended:
        return error(409, "session '" + std::string(session_id) + "' has ended");
    case SessionStore::StepStatus::Ok:
        break;
    }
    const bool done = result.stage.kind == dialogue::StageKind::Ended;
    return {200, {{"reply", result.reply}, {"stage", result.stage.to_string()}, {"done", done}}, {}};
}

Response AdvisorService::get_transcript(std::string_view session_id) const {
    auto session = store_.snapshot(session_id);
    if (!session)
        return error(404, "unknown session '" + std::string(session_id) + "'");
    Response r;
    r.raw_body = dialogue::transcript(*session).to_jsonl();
    r.content_type = "application/x-ndjson";
    return r;
}

std::size_t AdvisorService::sweep_idle(std::int64_t now) {
    return store_.sweep_idle(now, config_.idle_timeout_ms, lexicon_);
}

std::size_t AdvisorService::recover(std::int64_t now) {
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(store_.dir())) {
        if (f.is_regular_file() && f.path().extension() == ".jsonl")
            files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    std::size_t recovered = 0;
    for (const auto& path : files) {
        const auto transcript = dialogue::Transcript::load(path);
        if (store_.snapshot(transcript.header.session_id))
            continue;
        dialogue::Session session = dialogue::replay(transcript, catalog_, lexicon_);
        if (session.turn_log != transcript.turns)
            throw FormatError(path.string() + " does not replay to the logged turns");
        store_.adopt(std::move(session), now);
        ++recovered;
    }
    return recovered;
}

void AdvisorService::mount(httplib::Server& server, Clock clock) {
    auto now_for = [clock](const httplib::Request& req) -> std::int64_t {
        if (req.has_header("X-Advisor-Now")) {
            try {
                return std::stoll(req.get_header_value("X-Advisor-Now"));
            } catch (const std::exception&) {
            }
        }
        return clock();
    };

    server.Get("/api/spots", [this](const httplib::Request&, httplib::Response& res) {
        reply_with(res, list_spots());
    });
    server.Post("/api/sessions", [this, now_for](const httplib::Request& req, httplib::Response& res) {
        reply_with(res, create_session(req.body, now_for(req)));
    });
    server.Post(R"(/api/sessions/([0-9A-Za-z_-]+)/turns)",
                [this, now_for](const httplib::Request& req, httplib::Response& res) {
                    reply_with(res, post_turn(req.matches[1].str(), req.body, now_for(req)));
                });
    server.Get(R"(/api/sessions/([0-9A-Za-z_-]+)/transcript)",
               [this](const httplib::Request& req, httplib::Response& res) {
                   reply_with(res, get_transcript(req.matches[1].str()));
               });
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            reply_with(res, error(500, what));
        });
}

} // namespace advisor::service
