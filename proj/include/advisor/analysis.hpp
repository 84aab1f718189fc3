#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/transcript.hpp"
#include "json.hpp"

namespace advisor::analysis {

/// How a user utterance was handled. Appropriate excludes every other label;
/// the error causes may be combined.
enum class Cause { Appropriate, VadFailure, AsrMisrecognition, KeywordMissing, OutOfTopic, Other };

inline constexpr Cause kAllCauses[] = {Cause::Appropriate,    Cause::VadFailure,
                                       Cause::AsrMisrecognition, Cause::KeywordMissing,
                                       Cause::OutOfTopic,     Cause::Other};

std::string_view to_string(Cause cause) noexcept; // "appropriate", "vad_failure", ...
Cause parse_cause(std::string_view text);
std::string_view display_name(Cause cause) noexcept; // "VAD failure", ...

struct TurnRef {
    std::string session_id;
    std::size_t turn_index = 0;

    friend auto operator<=>(const TurnRef&, const TurnRef&) = default;
};

struct Annotation {
    TurnRef turn_ref;
    std::set<Cause> causes;
};

/// Throws FormatError for an empty label set or Appropriate mixed with causes.
void validate(const Annotation& annotation);
Annotation annotation_from_json(const nlohmann::json& doc);
nlohmann::ordered_json annotation_to_json(const Annotation& annotation);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);

struct Questionnaire {
    static constexpr std::size_t kItems = 9;
    static constexpr int kMinScore = 1;
    static constexpr int kMaxScore = 7;

    std::string session_id;
    std::vector<int> items;
};

Questionnaire questionnaire_from_json(const nlohmann::json& doc);
std::vector<Questionnaire> load_questionnaires(const std::filesystem::path& path);

/// Sum of the nine items, 9..63. Throws PreconditionError on a wrong item
/// count or an item outside 1..7.
int overall_satisfaction(const Questionnaire& questionnaire);

struct CauseTally {
    Cause cause;
    std::size_t count = 0;
    double fraction = 0.0; // count / n_utterances
};

/// One row per cause in table order. A multi-label turn counts once for each
/// of its causes. Throws PreconditionError if n_utterances is zero or the
/// same turn is labeled twice with one cause.
std::vector<CauseTally> tally_causes(const std::vector<Annotation>& annotations,
                                     std::size_t n_utterances);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// 1 - d / (|a| + |b|) on normalized text, where d is the Levenshtein
/// distance. Two empty strings are identical.
double utterance_similarity(std::string_view a, std::string_view b);

inline constexpr double kDefaultRestatementThreshold = 0.8;

/// Turn indices of user turns at least `threshold` similar to the previous
/// user turn, when both were said in the same stage.
std::vector<std::size_t> detect_restatements(const dialogue::Transcript& transcript,
                                             double threshold = kDefaultRestatementThreshold);

/// Sample Pearson correlation. Throws PreconditionError on unequal lengths,
/// fewer than two points, or a constant series.
double pearson(std::span<const double> x, std::span<const double> y);

struct SessionFeatures {
    std::string session_id;
    std::size_t n_user_utterances = 0;
    double pct_appropriate = 0.0;
    double pct_incorrect = 0.0;
    double pct_fallback = 0.0;
    std::size_t n_restatements = 0;
    int satisfaction = 0;
};

/// `annotations` may cover other sessions; only this session's are used.
SessionFeatures session_features(const dialogue::Transcript& transcript,
                                 const std::vector<Annotation>& annotations,
                                 const Questionnaire& questionnaire,
                                 double restatement_threshold = kDefaultRestatementThreshold);

struct CorrelationRow {
    std::string feature; // field name, e.g. "pct_appropriate"
    std::string label;   // human row label
    double coefficient = 0.0;
};

/// Correlation of each feature column with satisfaction, in table order.
/// Errors name the offending feature.
std::vector<CorrelationRow> correlation_report(const std::vector<SessionFeatures>& features);

std::string render_causes_tsv(const std::vector<CauseTally>& tally);
std::string render_correlations_tsv(const std::vector<CorrelationRow>& rows);
std::string render_causes_table(const std::vector<CauseTally>& tally, std::size_t n_utterances);
std::string render_correlation_table(const std::vector<CorrelationRow>& rows);

} // namespace advisor::analysis
