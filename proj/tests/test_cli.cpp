#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "advisor/analysis.hpp"
#include "advisor/transcript.hpp"
#include "doctest.h"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(ADVISOR_CLI) + " " + args + " 2>/dev/null";
    Run r{-1, {}};
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;)
        r.out.append(buf, n);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string sources() {
    return "--catalog " + fixtures::data("catalog.json").string() + " --lexicon " +
           fixtures::data("lexicon.json").string();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("advisor_cli_" + std::to_string(std::random_device{}()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Run simulate(const fs::path& script, const fs::path& out) {
    return run("simulate " + sources() + " --script " + script.string() + " --out " + out.string());
}

} // namespace

TEST_CASE("simulate: happy path") {
    TempDir tmp;
    auto r = simulate(fixtures::data("scripts/happy_path.json"), tmp.path / "t.jsonl");
    CHECK(r.status == 0);
    CHECK(r.out.find("I recommend Harbor Art Museum.") != std::string::npos);
    CHECK(r.out.find("Sorry, this information has not been provided.") != std::string::npos);
    const auto t = advisor::dialogue::Transcript::load(tmp.path / "t.jsonl");
    CHECK(t.header.session_id == "happy-path");
    CHECK(t.turns.back().stage == advisor::dialogue::Stage::final_greeting());
}

TEST_CASE("simulate: the time limit ends the consultation") {
    TempDir tmp;
    auto r = simulate(fixtures::data("scripts/over_time.json"), tmp.path / "t.jsonl");
    CHECK(r.status == 0);
    const auto t = advisor::dialogue::Transcript::load(tmp.path / "t.jsonl");
    CHECK(t.turns.back().text == "Thank you for consulting with us today. Have a wonderful trip!");
    CHECK(t.turns.back().time - t.header.start_time > 300'000);
    CHECK(t.turns[t.turns.size() - 2].stage != advisor::dialogue::Stage::qanda());
}

TEST_CASE("simulate: two runs are byte-identical") {
    TempDir tmp;
    auto a = simulate(fixtures::data("scripts/happy_path.json"), tmp.path / "a.jsonl");
    auto b = simulate(fixtures::data("scripts/happy_path.json"), tmp.path / "b.jsonl");
    CHECK(a.out == b.out);
    CHECK(slurp(tmp.path / "a.jsonl") == slurp(tmp.path / "b.jsonl"));
}

TEST_CASE("simulate: bad input") {
    TempDir tmp;
    std::ofstream(tmp.path / "bad.json") << R"({"spots": ["harbor_art"], "turns": []})";
    CHECK(simulate(tmp.path / "bad.json", tmp.path / "t.jsonl").status == 1);
    std::ofstream(tmp.path / "unknown.json") << R"({"spots": ["harbor_art", "atlantis"], "agency_spot": 0, "turns": []})";
    CHECK(simulate(tmp.path / "unknown.json", tmp.path / "t.jsonl").status == 1);
    std::ofstream(tmp.path / "short.json")
        << R"({"spots": ["harbor_art", "maple_park"], "agency_spot": 0, "turns": [{"at_ms": 1000, "text": "yes"}]})";
    CHECK(simulate(tmp.path / "short.json", tmp.path / "t.jsonl").status == 2);
    CHECK(run("simulate --script /nonexistent").status != 0);
    CHECK(run("").status != 0);
}

TEST_CASE("analyze: end to end") {
    TempDir tmp;
    const fs::path transcripts = tmp.path / "transcripts";
    fs::create_directories(transcripts);
    REQUIRE(simulate(fixtures::data("scripts/happy_path.json"), transcripts / "happy-path.jsonl").status == 0);
    REQUIRE(simulate(fixtures::data("scripts/over_time.json"), transcripts / "over-time.jsonl").status == 0);
    // a third session that repeats a question the system could not answer
    {
        std::ifstream in(fixtures::data("scripts/happy_path.json"));
        auto script = nlohmann::json::parse(in);
        script["session_id"] = "repeat";
        auto& turns = script["turns"];
        turns.insert(turns.end() - 1, nlohmann::json{{"at_ms", 208000}, {"text", "Can I bring my bicycle?"}});
        std::ofstream(tmp.path / "repeat.json") << script.dump();
    }
    REQUIRE(simulate(tmp.path / "repeat.json", transcripts / "repeat.jsonl").status == 0);

    // label every user turn: appropriate unless it got the fallback or no answer
    std::ofstream ann(tmp.path / "annotations.jsonl");
    std::size_t users = 0, appropriate = 0;
    for (const auto& name : {"happy-path", "over-time", "repeat"}) {
        const auto t = advisor::dialogue::Transcript::load(transcripts / (std::string(name) + ".jsonl"));
        for (const auto& turn : t.turns) {
            if (turn.speaker != advisor::dialogue::Speaker::User)
                continue;
            ++users;
            const bool bad = turn.fallback || turn.text.find("bicycle") != std::string::npos;
            appropriate += !bad;
            ann << nlohmann::json{{"turn_ref", {{"session_id", name}, {"turn_index", turn.index}}},
                                  {"cause", bad ? "keyword_missing" : "appropriate"}}
                       .dump()
                << "\n";
        }
    }
    ann.close();
    std::ofstream(tmp.path / "q.jsonl") << R"({"session_id": "happy-path", "items": [6,6,6,6,6,6,6,6,6]})" << "\n"
                                        << R"({"session_id": "over-time", "items": [3,3,3,3,3,3,3,3,4]})" << "\n"
                                        << R"({"session_id": "repeat", "items": [5,5,5,5,5,5,5,5,5]})" << "\n";

    auto r = run("analyze --transcripts " + transcripts.string() + " --annotations " +
                 (tmp.path / "annotations.jsonl").string() + " --questionnaires " +
                 (tmp.path / "q.jsonl").string() + " --out " + (tmp.path / "report.tsv").string());
    CHECK(r.status == 0);
    const std::string tsv = slurp(tmp.path / "report.tsv");
    CHECK(tsv.rfind("cause\tcount\tpercentage\n", 0) == 0);
    CHECK(tsv.find("appropriate\t" + std::to_string(appropriate) + "\t") != std::string::npos);
    CHECK(tsv.find("feature\tcorrelation\n") != std::string::npos);
    CHECK(tsv.find("n_restatements\t") != std::string::npos);
    CHECK(r.out.find("(" + std::to_string(users) + " user utterances)") != std::string::npos);
    CHECK(r.out.find("Mean overall satisfaction") != std::string::npos);

    CHECK(run("analyze --transcripts " + transcripts.string() + " --annotations " +
              (tmp.path / "missing.jsonl").string() + " --questionnaires " + (tmp.path / "q.jsonl").string() +
              " --out " + (tmp.path / "r.tsv").string())
              .status != 0);
}
