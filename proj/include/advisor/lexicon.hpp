#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/attribute_vector.hpp"
#include "json.hpp"

namespace advisor::nlu {

struct KeywordEntry {
    std::vector<std::string> keywords;
    UpdateRule rule;
    std::string response;
    std::vector<std::string> normalized_keywords; // filled at load time
};

/// Question-scoped keyword entries plus the fallback acknowledgment.
///
/// File layout:
///   {"fallback_response": "I see.",
///    "prompts": {"<key>": "<text>", ...},           (optional)
///    "questions": {"<qid>": [entry, ...] | "<other qid>"}}
/// An entry is {"keywords": [...], "rule": {attr: "yes"|"no"|"dont_care"},
/// "response": "..."}; attributes missing from a rule are dont_care. A string
/// in place of an entry list shares the named question's list.
class Lexicon {
public:
    static constexpr std::string_view kDefaultFallback = "I see.";

    Lexicon(SchemaPtr schema, std::string fallback_response);

    static Lexicon from_json(const nlohmann::json& doc, SchemaPtr schema);
    static Lexicon load(const std::filesystem::path& path, SchemaPtr schema);

    void add_question(std::string question_id, std::vector<KeywordEntry> entries);
    /// `question_id` will share `target`'s entry list.
    void add_alias(std::string question_id, std::string_view target);

    const SchemaPtr& schema() const noexcept { return schema_; }
    const std::string& fallback_response() const noexcept { return fallback_; }
    bool has_question(std::string_view question_id) const;
    /// Throws PreconditionError for an unknown question id.
    const std::vector<KeywordEntry>& entries(std::string_view question_id) const;
    /// Throws FormatError listing every id in `ids` that is missing.
    void require_questions(const std::vector<std::string>& ids) const;

    const std::map<std::string, std::string, std::less<>>& prompts() const noexcept {
        return prompts_;
    }
    void set_prompt(std::string key, std::string text) { prompts_[std::move(key)] = std::move(text); }

private:
    SchemaPtr schema_;
    std::string fallback_;
    std::map<std::string, std::shared_ptr<const std::vector<KeywordEntry>>, std::less<>> questions_;
    std::map<std::string, std::string, std::less<>> prompts_;
};

/// Builds an entry; keywords are normalized here.
KeywordEntry make_entry(std::vector<std::string> keywords, UpdateRule rule, std::string response);

struct KeywordMatch {
    std::size_t index;
    const KeywordEntry* entry;
};

/// True when some normalized keyword is a substring of `normalized_text`.
bool contains_keyword(std::string_view normalized_text,
                      const std::vector<std::string>& normalized_keywords);

/// First entry of `question_id` (in list order) with a keyword contained in
/// the normalized utterance.
std::optional<KeywordMatch> match_keywords(std::string_view utterance, std::string_view question_id,
                                           const Lexicon& lexicon);

} // namespace advisor::nlu
