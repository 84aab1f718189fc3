#include "advisor/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>

#include "advisor/errors.hpp"
#include "advisor/normalize.hpp"

namespace advisor::analysis {

namespace {

struct CauseNames {
    Cause cause;
    std::string_view wire;
    std::string_view display;
};

constexpr CauseNames kCauseNames[] = {
    {Cause::Appropriate, "appropriate", "Appropriate response"},
    {Cause::VadFailure, "vad_failure", "VAD failure"},
    {Cause::AsrMisrecognition, "asr_misrecognition", "Misrecognition in ASR"},
    {Cause::KeywordMissing, "keyword_missing", "Lack of keywords"},
    {Cause::OutOfTopic, "out_of_topic", "Out of topics"},
    {Cause::Other, "other", "Others"},
};

template <typename Fn>
void read_jsonl(const std::filesystem::path& path, Fn&& each) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open " + path.string());
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            each(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::string format_fixed(double value, int digits, bool plus_sign = false) {
    char buf[64];
    std::snprintf(buf, sizeof buf, plus_sign ? "%+.*f" : "%.*f", digits, value);
    return buf;
}

struct FeatureColumn {
    std::string_view name;
    std::string_view label;
    std::function<double(const SessionFeatures&)> get;
};

const std::vector<FeatureColumn>& feature_columns() {
    static const std::vector<FeatureColumn> columns{
        {"n_user_utterances", "Number of user's utterances",
         [](const SessionFeatures& f) { return static_cast<double>(f.n_user_utterances); }},
        {"pct_appropriate", "Percentage of appropriate response",
         [](const SessionFeatures& f) { return f.pct_appropriate; }},
        {"pct_incorrect", "Percentage of incorrect response",
         [](const SessionFeatures& f) { return f.pct_incorrect; }},
        {"pct_fallback", "Percentage of the response \"I see\"",
         [](const SessionFeatures& f) { return f.pct_fallback; }},
        {"n_restatements", "Number of restatements",
         [](const SessionFeatures& f) { return static_cast<double>(f.n_restatements); }},
    };
    return columns;
}

} // namespace

std::string_view to_string(Cause cause) noexcept {
    return kCauseNames[static_cast<int>(cause)].wire;
}

std::string_view display_name(Cause cause) noexcept {
    return kCauseNames[static_cast<int>(cause)].display;
}

Cause parse_cause(std::string_view text) {
    for (const auto& n : kCauseNames) {
        if (n.wire == text)
            return n.cause;
    }
    throw FormatError("unknown cause '" + std::string(text) + "'");
}

void validate(const Annotation& a) {
    if (a.causes.empty())
        throw FormatError("annotation for turn " + std::to_string(a.turn_ref.turn_index) +
                          " has no labels");
    if (a.causes.contains(Cause::Appropriate) && a.causes.size() > 1)
        throw FormatError("annotation for turn " + std::to_string(a.turn_ref.turn_index) +
                          " mixes appropriate with error causes");
}

Annotation annotation_from_json(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw FormatError("annotation must be an object");
    Annotation a;
    const auto& ref = doc.at("turn_ref");
    a.turn_ref.session_id = ref.at("session_id").get<std::string>();
    a.turn_ref.turn_index = ref.at("turn_index").get<std::size_t>();
    const auto& cause = doc.at("cause");
    if (cause.is_string()) {
        a.causes.insert(parse_cause(cause.get<std::string>()));
    } else {
        for (const auto& c : cause)
            a.causes.insert(parse_cause(c.get<std::string>()));
    }
    validate(a);
    return a;
}

nlohmann::ordered_json annotation_to_json(const Annotation& a) {
    nlohmann::ordered_json causes = nlohmann::ordered_json::array();
    for (Cause c : a.causes)
        causes.push_back(to_string(c));
    return {{"turn_ref", {{"session_id", a.turn_ref.session_id}, {"turn_index", a.turn_ref.turn_index}}},
            {"cause", causes}};
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
    std::vector<Annotation> out;
    read_jsonl(path, [&](const nlohmann::json& doc) { out.push_back(annotation_from_json(doc)); });
    return out;
}

Questionnaire questionnaire_from_json(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw FormatError("questionnaire must be an object");
    Questionnaire q{doc.at("session_id").get<std::string>(), doc.at("items").get<std::vector<int>>()};
    try {
        overall_satisfaction(q);
    } catch (const PreconditionError& e) {
        throw FormatError(e.what());
    }
    return q;
}

std::vector<Questionnaire> load_questionnaires(const std::filesystem::path& path) {
    std::vector<Questionnaire> out;
    read_jsonl(path, [&](const nlohmann::json& doc) { out.push_back(questionnaire_from_json(doc)); });
    return out;
}

int overall_satisfaction(const Questionnaire& q) {
    if (q.items.size() != Questionnaire::kItems)
        throw PreconditionError("questionnaire for '" + q.session_id + "' has " +
                                std::to_string(q.items.size()) + " items, expected 9");
    for (int item : q.items) {
        if (item < Questionnaire::kMinScore || item > Questionnaire::kMaxScore)
            throw PreconditionError("questionnaire for '" + q.session_id + "' has item " +
                                    std::to_string(item) + " outside 1..7");
    }
    return std::accumulate(q.items.begin(), q.items.end(), 0);
}

std::vector<CauseTally> tally_causes(const std::vector<Annotation>& annotations,
                                     std::size_t n_utterances) {
    if (n_utterances == 0)
        throw PreconditionError("cannot tally causes over zero utterances");
    std::map<Cause, std::set<TurnRef>> seen;
    for (const auto& a : annotations) {
        validate(a);
        for (Cause c : a.causes) {
            if (!seen[c].insert(a.turn_ref).second)
                throw PreconditionError("turn " + a.turn_ref.session_id + "#" +
                                        std::to_string(a.turn_ref.turn_index) +
                                        " is labeled '" + std::string(to_string(c)) + "' twice");
        }
    }
    std::vector<CauseTally> out;
    for (Cause c : kAllCauses) {
        const std::size_t count = seen[c].size();
        out.push_back({c, count, static_cast<double>(count) / static_cast<double>(n_utterances)});
    }
    return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t above = row[j];
            row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diagonal = above;
        }
    }
    return row[b.size()];
}

double utterance_similarity(std::string_view a, std::string_view b) {
    const std::u32string ca = nlu::to_code_points(nlu::normalize(a));
    const std::u32string cb = nlu::to_code_points(nlu::normalize(b));
    const std::size_t total = ca.size() + cb.size();
    if (total == 0)
        return 1.0;
    return 1.0 - static_cast<double>(edit_distance(ca, cb)) / static_cast<double>(total);
}

std::vector<std::size_t> detect_restatements(const dialogue::Transcript& transcript,
                                             double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw PreconditionError("restatement threshold must be in (0, 1]");
    std::vector<std::size_t> flagged;
    const dialogue::Turn* previous = nullptr;
    for (const auto& turn : transcript.turns) {
        if (turn.speaker != dialogue::Speaker::User)
            continue;
        if (previous != nullptr && previous->stage == turn.stage &&
            utterance_similarity(previous->text, turn.text) >= threshold)
            flagged.push_back(turn.index);
        previous = &turn;
    }
    return flagged;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw PreconditionError("pearson: series lengths differ (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
    if (x.size() < 2)
        throw PreconditionError("pearson: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        throw PreconditionError("pearson: first series is constant");
    if (syy == 0.0)
        throw PreconditionError("pearson: second series is constant");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SessionFeatures session_features(const dialogue::Transcript& transcript,
                                 const std::vector<Annotation>& annotations,
                                 const Questionnaire& questionnaire, double restatement_threshold) {
    const std::string& sid = transcript.header.session_id;
    if (questionnaire.session_id != sid)
        throw PreconditionError("questionnaire belongs to '" + questionnaire.session_id +
                                "', transcript to '" + sid + "'");
    SessionFeatures f;
    f.session_id = sid;
    std::set<std::size_t> user_turns;
    std::size_t fallbacks = 0;
    for (const auto& turn : transcript.turns) {
        if (turn.speaker != dialogue::Speaker::User)
            continue;
        user_turns.insert(turn.index);
        if (turn.fallback)
            ++fallbacks;
    }
    f.n_user_utterances = user_turns.size();

    std::set<std::size_t> appropriate, incorrect;
    for (const auto& a : annotations) {
        if (a.turn_ref.session_id != sid)
            continue;
        validate(a);
        if (!user_turns.contains(a.turn_ref.turn_index))
            throw FormatError("annotation for " + sid + "#" + std::to_string(a.turn_ref.turn_index) +
                              " does not point at a user turn");
        (a.causes.contains(Cause::Appropriate) ? appropriate : incorrect).insert(a.turn_ref.turn_index);
    }
    if (f.n_user_utterances > 0) {
        const double n = static_cast<double>(f.n_user_utterances);
        f.pct_appropriate = static_cast<double>(appropriate.size()) / n;
        f.pct_incorrect = static_cast<double>(incorrect.size()) / n;
        f.pct_fallback = static_cast<double>(fallbacks) / n;
    }
    f.n_restatements = detect_restatements(transcript, restatement_threshold).size();
    f.satisfaction = overall_satisfaction(questionnaire);
    return f;
}

std::vector<CorrelationRow> correlation_report(const std::vector<SessionFeatures>& features) {
    if (features.size() < 2)
        throw PreconditionError("correlation report needs at least two sessions");
    std::vector<double> satisfaction;
    for (const auto& f : features)
        satisfaction.push_back(f.satisfaction);

    std::vector<CorrelationRow> rows;
    for (const auto& col : feature_columns()) {
        std::vector<double> values;
        for (const auto& f : features)
            values.push_back(col.get(f));
        try {
            rows.push_back({std::string(col.name), std::string(col.label), pearson(values, satisfaction)});
        } catch (const PreconditionError& e) {
            throw PreconditionError(std::string(col.name) + ": " + e.what());
        }
    }
    return rows;
}

std::string render_causes_tsv(const std::vector<CauseTally>& tally) {
    std::string out = "cause\tcount\tpercentage\n";
    for (const auto& t : tally)
        out += std::string(to_string(t.cause)) + '\t' + std::to_string(t.count) + '\t' +
               format_fixed(100.0 * t.fraction, 1) + '\n';
    return out;
}

std::string render_correlations_tsv(const std::vector<CorrelationRow>& rows) {
    std::string out = "feature\tcorrelation\n";
    for (const auto& r : rows)
        out += r.feature + '\t' + format_fixed(r.coefficient, 6) + '\n';
    return out;
}

std::string render_causes_table(const std::vector<CauseTally>& tally, std::size_t n_utterances) {
    std::size_t width = 0;
    for (const auto& t : tally)
        width = std::max(width, display_name(t.cause).size());
    std::string out = "Cause of incorrect responses (" + std::to_string(n_utterances) +
                      " user utterances)\n";
    for (const auto& t : tally) {
        std::string name(display_name(t.cause));
        name.resize(width, ' ');
        std::string count = std::to_string(t.count);
        count.insert(0, count.size() < 5 ? 5 - count.size() : 0, ' ');
        out += name + ' ' + count + " (" + format_fixed(100.0 * t.fraction, 1) + "%)\n";
    }
    return out;
}

std::string render_correlation_table(const std::vector<CorrelationRow>& rows) {
    std::size_t width = 0;
    for (const auto& r : rows)
        width = std::max(width, r.label.size());
    std::string out = "Correlation coefficients between types of response and satisfaction score\n";
    for (const auto& r : rows) {
        std::string label = r.label;
        label.resize(width, ' ');
        out += label + "  " + format_fixed(r.coefficient, 2, true) + '\n';
    }
    return out;
}

} // namespace advisor::analysis
