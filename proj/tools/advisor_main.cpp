// advisor: travel consultation engine command line.
//
//   advisor serve    --catalog F --lexicon F --port N [--idle-timeout-ms N]
//   advisor chat     --catalog F --lexicon F --spots A,B --agency 0|1
//   advisor simulate --catalog F --lexicon F --script F [--out F]
//   advisor analyze  --transcripts DIR --annotations F --questionnaires F --out F
//
// Transcripts go to ./transcripts unless ADVISOR_LOG_DIR is set.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "advisor/analysis.hpp"
#include "advisor/engine.hpp"
#include "advisor/normalize.hpp"
#include "advisor/service.hpp"
#include "advisor/simulation.hpp"
#include "httplib.h"

namespace {

using namespace advisor;

struct Sources {
    std::string catalog;
    std::string lexicon;
    std::string schema;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--catalog", catalog, "Spot catalog (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--lexicon", lexicon, "Keyword lexicon (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--schema", schema, "Attribute schema override (JSON)")->check(CLI::ExistingFile);
    }

    SchemaPtr load_schema() const {
        return schema.empty() ? AttributeSchema::default_schema() : AttributeSchema::load(schema);
    }
};

httplib::Server* g_server = nullptr;

void stop_server(int) {
    if (g_server != nullptr)
        g_server->stop();
}

int run_serve(const Sources& src, int port, std::int64_t idle_ms, const std::string& host) {
    auto schema = src.load_schema();
    service::ServiceConfig config{service::transcript_dir("transcripts"), idle_ms};
    service::AdvisorService svc(Catalog::load(src.catalog), nlu::Lexicon::load(src.lexicon, schema),
                                config);
    const auto recovered = svc.recover(service::system_clock_ms());
    std::cerr << "recovered " << recovered << " session(s) from " << config.log_dir << "\n";

    httplib::Server server;
    svc.mount(server, service::system_clock_ms);
    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);

    std::atomic<bool> running{true};
    std::thread sweeper([&] {
        while (running) {
            std::this_thread::sleep_for(std::chrono::milliseconds(500));
            svc.sweep_idle(service::system_clock_ms());
        }
    });
    std::cerr << "listening on " << host << ":" << port << "\n";
    const bool ok = server.listen(host, port);
    running = false;
    sweeper.join();
    return ok ? 0 : 1;
}

int run_chat(const Sources& src, const std::string& spots, int agency) {
    auto schema = src.load_schema();
    const Catalog catalog = Catalog::load(src.catalog);
    const nlu::Lexicon lexicon = nlu::Lexicon::load(src.lexicon, schema);
    lexicon.require_questions(dialogue::required_question_ids(*schema));

    const auto comma = spots.find(',');
    if (comma == std::string::npos) {
        std::cerr << "--spots expects A,B\n";
        return 1;
    }
    const SpotRecord* a = catalog.find(spots.substr(0, comma));
    const SpotRecord* b = catalog.find(spots.substr(comma + 1));
    if (a == nullptr || b == nullptr) {
        std::cerr << "unknown spot in --spots " << spots << "\n";
        return 1;
    }

    const auto started_at = service::system_clock_ms();
    auto started = dialogue::start_session("chat-" + std::to_string(started_at), *a, *b, agency,
                                           started_at, schema,
                                           dialogue::Phrasebook::from_overrides(lexicon.prompts()));
    service::SessionStore store(service::transcript_dir("transcripts"));
    const std::string id = started.session.id;
    store.insert(std::move(started.session), started_at);

    std::cout << "[system] " << started.greeting << "\n"
              << "(an empty line stands for a timeout)\n";
    for (std::string line; !store.snapshot(id)->ended();) {
        std::cout << "[you] " << std::flush;
        if (!std::getline(std::cin, line))
            break;
        auto input = nlu::normalize(line).empty() ? dialogue::EngineInput::timeout()
                                                  : dialogue::EngineInput::utterance(line);
        auto result = store.step(id, input, service::system_clock_ms(), lexicon);
        std::cout << "[system] " << result.reply << "\n";
    }
    std::cout << "transcript: " << store.file_for(id) << "\n";
    return 0;
}

int run_simulate(const Sources& src, const std::string& script_path, std::string out_path) {
    auto schema = src.load_schema();
    const Catalog catalog = Catalog::load(src.catalog);
    const nlu::Lexicon lexicon = nlu::Lexicon::load(src.lexicon, schema);
    lexicon.require_questions(dialogue::required_question_ids(*schema));
    const auto script = service::SimulationScript::load(script_path);

    const auto result = service::run_simulation(script, catalog, lexicon);
    if (out_path.empty()) {
        const auto dir = service::transcript_dir("transcripts");
        std::filesystem::create_directories(dir);
        out_path = (dir / (script.session_id + ".jsonl")).string();
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << dialogue::transcript(result.session).to_jsonl();
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }

    std::cout << "[system] " << result.greeting << "\n";
    for (const auto& turn : result.session.turn_log) {
        if (turn.speaker == dialogue::Speaker::Event)
            std::cout << "[timeout]\n";
        else
            std::cout << (turn.speaker == dialogue::Speaker::User ? "[user] " : "[system] ")
                      << turn.text << "\n";
    }
    std::cerr << "transcript written to " << out_path << "\n";
    if (result.unused_steps > 0)
        std::cerr << result.unused_steps << " script step(s) after the session ended were ignored\n";
    if (!result.session.ended()) {
        std::cerr << "script ended before the consultation did (stage "
                  << result.session.stage.to_string() << ")\n";
        return 2;
    }
    return 0;
}

int run_analyze(const std::string& dir, const std::string& annotations_path,
                const std::string& questionnaires_path, const std::string& out_path,
                double threshold) {
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(dir)) {
        if (f.is_regular_file() && f.path().extension() == ".jsonl")
            files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());

    const auto annotations = analysis::load_annotations(annotations_path);
    std::map<std::string, analysis::Questionnaire> questionnaires;
    for (auto& q : analysis::load_questionnaires(questionnaires_path))
        questionnaires.emplace(q.session_id, std::move(q));

    std::size_t total_utterances = 0;
    std::vector<analysis::SessionFeatures> features;
    for (const auto& path : files) {
        const auto transcript = dialogue::Transcript::load(path);
        auto q = questionnaires.find(transcript.header.session_id);
        if (q == questionnaires.end()) {
            std::cerr << "no questionnaire for session " << transcript.header.session_id
                      << ", skipped in the correlation table\n";
            for (const auto& t : transcript.turns)
                total_utterances += t.speaker == dialogue::Speaker::User;
            continue;
        }
        features.push_back(analysis::session_features(transcript, annotations, q->second, threshold));
        total_utterances += features.back().n_user_utterances;
    }

    const auto tally = analysis::tally_causes(annotations, total_utterances);
    std::string tsv = analysis::render_causes_tsv(tally);
    std::string text = analysis::render_causes_table(tally, total_utterances);
    if (features.size() >= 2) {
        try {
            const auto rows = analysis::correlation_report(features);
            tsv += "\n" + analysis::render_correlations_tsv(rows);
            text += "\n" + analysis::render_correlation_table(rows);
        } catch (const PreconditionError& e) {
            text += "\n(correlations skipped: " + std::string(e.what()) + ")\n";
        }
    } else {
        text += "\n(correlations need at least two sessions with questionnaires)\n";
    }
    double mean = 0.0;
    for (const auto& f : features)
        mean += f.satisfaction;
    if (!features.empty())
        text += "\nMean overall satisfaction: " + std::to_string(mean / features.size()).substr(0, 5) +
                " / 63 over " + std::to_string(features.size()) + " session(s)\n";

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << tsv;
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    std::cout << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Travel consultation dialogue engine"};
    app.require_subcommand(1);

    Sources serve_src, chat_src, sim_src;
    int port = 8080;
    std::int64_t idle_ms = 15'000;
    std::string host = "0.0.0.0";
    auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
    serve_src.add_to(serve);
    serve->add_option("--port", port, "Listen port");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--idle-timeout-ms", idle_ms, "Idle time before a Timeout is injected");

    std::string spots;
    int agency = 0;
    auto* chat = app.add_subcommand("chat", "Interactive consultation in the terminal");
    chat_src.add_to(chat);
    chat->add_option("--spots", spots, "Two spot ids, A,B")->required();
    chat->add_option("--agency", agency, "Index of the agency's spot")->check(CLI::Range(0, 1));

    std::string script, sim_out;
    auto* simulate = app.add_subcommand("simulate", "Run a scripted consultation");
    sim_src.add_to(simulate);
    simulate->add_option("--script", script, "Script (JSON)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", sim_out, "Transcript output path");

    std::string transcripts, annotations, questionnaires, report;
    double threshold = analysis::kDefaultRestatementThreshold;
    auto* analyze = app.add_subcommand("analyze", "Response-cause and satisfaction analysis");
    analyze->add_option("--transcripts", transcripts, "Directory of transcript JSONL files")
        ->required()
        ->check(CLI::ExistingDirectory);
    analyze->add_option("--annotations", annotations, "Annotations (JSONL)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--questionnaires", questionnaires, "Questionnaires (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--out", report, "TSV report path")->required();
    analyze->add_option("--restatement-threshold", threshold, "Similarity threshold")
        ->check(CLI::Range(0.0, 1.0));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve)
            return run_serve(serve_src, port, idle_ms, host);
        if (*chat)
            return run_chat(chat_src, spots, agency);
        if (*simulate)
            return run_simulate(sim_src, script, sim_out);
        if (*analyze)
            return run_analyze(transcripts, annotations, questionnaires, report, threshold);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
