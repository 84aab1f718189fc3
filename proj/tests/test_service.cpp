#include <atomic>
#include <fstream>
#include <thread>

#include "advisor/errors.hpp"
#include "advisor/service.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"

using namespace advisor;
using namespace advisor::service;
using nlohmann::json;

namespace {

constexpr std::int64_t kT0 = 1'700'000'000'000;

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() /
               (name + "_" + std::to_string(std::random_device{}()))) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

AdvisorService make_service(const std::filesystem::path& dir, std::int64_t idle_ms = 15'000) {
    return AdvisorService(fixtures::catalog(), fixtures::lexicon(), ServiceConfig{dir, idle_ms});
}

std::string create(AdvisorService& svc, std::int64_t now = kT0) {
    auto r = svc.create_session(R"({"spot_a_id": "harbor_art", "spot_b_id": "maple_park", "agency_spot": 0})", now);
    REQUIRE(r.status == 201);
    return r.body["session_id"];
}

Response say(AdvisorService& svc, const std::string& id, const std::string& text, std::int64_t now) {
    return svc.post_turn(id, json{{"text", text}}.dump(), now);
}

std::size_t line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

} // namespace

TEST_CASE("transcript_dir honours ADVISOR_LOG_DIR") {
    ::unsetenv("ADVISOR_LOG_DIR");
    CHECK(transcript_dir("fallback") == "fallback");
    ::setenv("ADVISOR_LOG_DIR", "/tmp/elsewhere", 1);
    CHECK(transcript_dir("fallback") == "/tmp/elsewhere");
    ::unsetenv("ADVISOR_LOG_DIR");
}

TEST_CASE("service refuses a lexicon that lacks engine questions") {
    TempDir tmp("advisor_svc_lex");
    nlu::Lexicon empty(AttributeSchema::default_schema(), "I see.");
    CHECK_THROWS_AS(AdvisorService(fixtures::catalog(), empty, ServiceConfig{tmp.path, 1000}), FormatError);
}

TEST_CASE("handlers") {
    TempDir tmp("advisor_svc_handlers");
    auto svc = make_service(tmp.path);

    SUBCASE("list spots") {
        auto r = svc.list_spots();
        CHECK(r.status == 200);
        CHECK(r.body.size() == fixtures::catalog().spots().size());
        CHECK(r.body[0]["id"] == "harbor_art");
    }
    SUBCASE("create session validation") {
        CHECK(svc.create_session("not json", kT0).status == 400);
        CHECK(svc.create_session(R"({"spot_a_id": "harbor_art"})", kT0).status == 400);
        CHECK(svc.create_session(R"({"spot_a_id": "harbor_art", "spot_b_id": "maple_park", "agency_spot": 2})", kT0)
                  .status == 400);
        CHECK(svc.create_session(R"({"spot_a_id": "harbor_art", "spot_b_id": "harbor_art", "agency_spot": 0})", kT0)
                  .status == 400);
        auto missing =
            svc.create_session(R"({"spot_a_id": "harbor_art", "spot_b_id": "atlantis", "agency_spot": 0})", kT0);
        CHECK(missing.status == 404);
        CHECK(missing.body["spot_id"] == "atlantis");
    }
    SUBCASE("create returns the greeting") {
        auto r = svc.create_session(R"({"spot_a_id": "harbor_art", "spot_b_id": "maple_park", "agency_spot": 1})", kT0);
        CHECK(r.status == 201);
        CHECK(r.body["stage"] == "greeting");
        CHECK(r.body["greeting"].get<std::string>().find("Harbor Art Museum and Maple Valley Park") !=
              std::string::npos);
        CHECK(r.body["session_id"].get<std::string>().size() == 16);
        CHECK(std::filesystem::exists(svc.store().file_for(r.body["session_id"].get<std::string>())));
    }
    SUBCASE("turns") {
        const auto id = create(svc);
        CHECK(svc.post_turn(id, "{}", kT0).status == 400);
        CHECK(svc.post_turn(id, R"({"text": "   "})", kT0).status == 400);
        CHECK(svc.post_turn("nope", R"({"text": "hi"})", kT0).status == 404);

        auto r = say(svc, id, "yes", kT0 + 1000);
        CHECK(r.status == 200);
        CHECK(r.body["stage"] == "introduce_and_ask_reason:0");
        CHECK(r.body["done"] == false);

        auto t = svc.post_turn(id, R"({"timeout": true})", kT0 + 2000);
        CHECK(t.body["stage"] == "introduce_and_ask_reason:1");

        auto last = say(svc, id, "hello", kT0 + 400'000);
        CHECK(last.body["done"] == true);
        CHECK(last.body["stage"] == "ended");
        CHECK(say(svc, id, "hello?", kT0 + 400'001).status == 409);

        auto tr = svc.get_transcript(id);
        CHECK(tr.status == 200);
        CHECK(tr.content_type == "application/x-ndjson");
        CHECK(tr.raw_body == dialogue::transcript(*svc.store().snapshot(id)).to_jsonl());
        CHECK(svc.get_transcript("nope").status == 404);
        // the file on disk matches the in-memory log
        std::ifstream f(svc.store().file_for(id), std::ios::binary);
        std::string disk((std::istreambuf_iterator<char>(f)), {});
        CHECK(disk == tr.raw_body);
    }
}

TEST_CASE("idle sessions get a timeout") {
    TempDir tmp("advisor_svc_idle");
    auto svc = make_service(tmp.path, 15'000);
    const auto id = create(svc);
    CHECK(svc.sweep_idle(kT0 + 14'999) == 0);
    CHECK(svc.sweep_idle(kT0 + 15'000) == 1);
    auto s = *svc.store().snapshot(id);
    CHECK(s.stage == dialogue::Stage::introduce(0));
    CHECK(s.turn_log.front().speaker == dialogue::Speaker::Event);
    CHECK(svc.sweep_idle(kT0 + 20'000) == 0);
}

TEST_CASE("recovery replays transcripts from disk") {
    TempDir tmp("advisor_svc_recover");
    std::string id;
    std::optional<dialogue::Session> before;
    {
        auto svc = make_service(tmp.path);
        id = create(svc);
        say(svc, id, "yes", kT0 + 1000);
        say(svc, id, "paintings", kT0 + 2000);
        svc.post_turn(id, R"({"timeout": true})", kT0 + 3000);
        say(svc, id, "with my kids", kT0 + 4000);
        before = svc.store().snapshot(id);
    }
    auto svc = make_service(tmp.path);
    CHECK(svc.recover(kT0 + 5000) == 1);
    auto after = *svc.store().snapshot(id);
    CHECK(after.turn_log == before->turn_log);
    CHECK(after.user_vector == before->user_vector);
    CHECK(after.stage == before->stage);
    CHECK(say(svc, id, "yes", kT0 + 6000).status == 200);
    CHECK(svc.recover(kT0 + 7000) == 0);

    std::ofstream(tmp.path / "junk.jsonl") << "{oops\n";
    CHECK_THROWS_AS(svc.recover(kT0), FormatError);
}

TEST_CASE("concurrent turns on one session are serialized") {
    TempDir tmp("advisor_svc_conc");
    auto svc = make_service(tmp.path);
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i)
        ids.push_back(create(svc));

    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int w = 0; w < 8; ++w) {
        threads.emplace_back([&, w] {
            for (int k = 0; k < 20; ++k) {
                auto r = say(svc, ids[(w + k) % ids.size()], "hmm", kT0 + 1000);
                if (r.status == 200)
                    ++ok;
            }
        });
    }
    for (auto& t : threads)
        t.join();
    std::size_t total_turns = 0;
    for (const auto& id : ids) {
        auto s = *svc.store().snapshot(id);
        for (std::size_t i = 0; i < s.turn_log.size(); ++i)
            CHECK(s.turn_log[i].index == i);
        CHECK(line_count(svc.store().file_for(id)) == s.turn_log.size() + 1);
        total_turns += s.turn_log.size();
        // the log replays to the same state
        auto again = dialogue::replay(dialogue::transcript(s), fixtures::catalog(), fixtures::lexicon());
        CHECK(again.turn_log == s.turn_log);
    }
    CHECK(total_turns == 2 * static_cast<std::size_t>(ok.load()));
}

TEST_CASE("HTTP routes") {
    TempDir tmp("advisor_svc_http");
    auto svc = make_service(tmp.path);
    httplib::Server server;
    svc.mount(server, [] { return kT0; });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto spots = client.Get("/api/spots");
    REQUIRE(spots);
    CHECK(spots->status == 200);
    CHECK(json::parse(spots->body).size() == fixtures::catalog().spots().size());

    auto created = client.Post("/api/sessions",
                               R"({"spot_a_id": "harbor_art", "spot_b_id": "maple_park", "agency_spot": 0})",
                               "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = json::parse(created->body)["session_id"];

    auto turn = client.Post("/api/sessions/" + id + "/turns", R"({"text": "yes"})", "application/json");
    REQUIRE(turn);
    CHECK(turn->status == 200);
    CHECK(json::parse(turn->body)["stage"] == "introduce_and_ask_reason:0");

    // clock override pushes the session past its time limit
    httplib::Headers late{{"X-Advisor-Now", std::to_string(kT0 + 300'001)}};
    auto over = client.Post("/api/sessions/" + id + "/turns", late, R"({"text": "art"})", "application/json");
    REQUIRE(over);
    CHECK(json::parse(over->body)["done"] == true);
    auto gone = client.Post("/api/sessions/" + id + "/turns", R"({"text": "hi"})", "application/json");
    REQUIRE(gone);
    CHECK(gone->status == 409);

    auto tr = client.Get("/api/sessions/" + id + "/transcript");
    REQUIRE(tr);
    CHECK(tr->status == 200);
    CHECK(tr->get_header_value("Content-Type") == "application/x-ndjson");
    auto parsed = dialogue::Transcript::from_jsonl(tr->body);
    CHECK(parsed.turns.size() == 4);
    CHECK(parsed.turns[2].time == kT0 + 300'001);

    auto missing = client.Get("/api/sessions/ffffffffffffffff/transcript");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto bad = client.Post("/api/sessions", "[]", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    server.stop();
    listener.join();
}
