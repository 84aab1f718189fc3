#include "advisor/lexicon.hpp"

#include <fstream>

#include "advisor/errors.hpp"
#include "advisor/normalize.hpp"

namespace advisor::nlu {

namespace {

UpdateRule rule_from_json(const nlohmann::json& doc, const SchemaPtr& schema,
                          const std::string& where) {
    if (!doc.is_object())
        throw FormatError(where + ": rule must be an object");
    AttributeVector proposal(schema, TriValue::DontCare);
    for (const auto& [attr, value] : doc.items()) {
        if (!value.is_string())
            throw FormatError(where + ": rule value for '" + attr + "' must be a string");
        if (!schema->index_of(attr))
            throw SchemaMismatch(where + ": rule names unknown attribute '" + attr + "'");
        proposal.set(attr, parse_tri_value(value.get<std::string>()));
    }
    return UpdateRule{std::move(proposal)};
}

KeywordEntry entry_from_json(const nlohmann::json& doc, const SchemaPtr& schema,
                             const std::string& where) {
    if (!doc.is_object())
        throw FormatError(where + ": entry must be an object");
    auto keywords = doc.find("keywords");
    auto response = doc.find("response");
    if (keywords == doc.end() || !keywords->is_array())
        throw FormatError(where + ": entry needs a 'keywords' list");
    if (response == doc.end() || !response->is_string())
        throw FormatError(where + ": entry needs a 'response' string");
    std::vector<std::string> words;
    for (const auto& k : *keywords) {
        if (!k.is_string())
            throw FormatError(where + ": keywords must be strings");
        words.push_back(k.get<std::string>());
    }
    auto rule = doc.contains("rule") ? rule_from_json(doc.at("rule"), schema, where)
                                     : UpdateRule{AttributeVector(schema)};
    try {
        return make_entry(std::move(words), std::move(rule), response->get<std::string>());
    } catch (const PreconditionError& e) {
        throw FormatError(where + ": " + e.what());
    }
}

} // namespace

KeywordEntry make_entry(std::vector<std::string> keywords, UpdateRule rule, std::string response) {
    if (keywords.empty())
        throw PreconditionError("keyword entry needs at least one keyword");
    if (response.empty())
        throw PreconditionError("keyword entry needs a response");
    std::vector<std::string> normalized;
    for (const auto& k : keywords) {
        normalized.push_back(normalize(k));
        if (normalized.back().empty())
            throw PreconditionError("keyword normalizes to an empty string");
    }
    return KeywordEntry{std::move(keywords), std::move(rule), std::move(response),
                        std::move(normalized)};
}

Lexicon::Lexicon(SchemaPtr schema, std::string fallback_response)
    : schema_(std::move(schema)), fallback_(std::move(fallback_response)) {
    if (fallback_.empty())
        throw FormatError("fallback_response must not be empty");
}

Lexicon Lexicon::from_json(const nlohmann::json& doc, SchemaPtr schema) {
    if (!doc.is_object())
        throw FormatError("lexicon must be a JSON object");
    std::string fallback(kDefaultFallback);
    if (auto it = doc.find("fallback_response"); it != doc.end()) {
        if (!it->is_string())
            throw FormatError("fallback_response must be a string");
        fallback = it->get<std::string>();
    }
    Lexicon lexicon(schema, std::move(fallback));

    if (auto it = doc.find("prompts"); it != doc.end()) {
        if (!it->is_object())
            throw FormatError("prompts must be an object");
        for (const auto& [key, text] : it->items()) {
            if (!text.is_string())
                throw FormatError("prompt '" + key + "' must be a string");
            lexicon.set_prompt(key, text.get<std::string>());
        }
    }

    auto questions = doc.find("questions");
    if (questions == doc.end() || !questions->is_object())
        throw FormatError("lexicon needs a 'questions' object");
    std::vector<std::pair<std::string, std::string>> aliases;
    for (const auto& [qid, value] : questions->items()) {
        if (value.is_string()) {
            aliases.emplace_back(qid, value.get<std::string>());
            continue;
        }
        if (!value.is_array())
            throw FormatError("question '" + qid + "' must be a list or an alias string");
        std::vector<KeywordEntry> entries;
        for (std::size_t i = 0; i < value.size(); ++i)
            entries.push_back(entry_from_json(value[i], schema,
                                              "question '" + qid + "' entry " + std::to_string(i)));
        lexicon.add_question(qid, std::move(entries));
    }
    for (const auto& [qid, target] : aliases)
        lexicon.add_alias(qid, target);
    return lexicon;
}

Lexicon Lexicon::load(const std::filesystem::path& path, SchemaPtr schema) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open lexicon " + path.string());
    try {
        return from_json(nlohmann::json::parse(in), std::move(schema));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void Lexicon::add_question(std::string question_id, std::vector<KeywordEntry> entries) {
    for (const auto& e : entries) {
        if (!e.rule.proposal.schema().same_layout(*schema_))
            throw SchemaMismatch("entry rule for '" + question_id +
                                 "' uses a different schema than the lexicon");
    }
    questions_[std::move(question_id)] =
        std::make_shared<const std::vector<KeywordEntry>>(std::move(entries));
}

void Lexicon::add_alias(std::string question_id, std::string_view target) {
    auto it = questions_.find(target);
    if (it == questions_.end())
        throw FormatError("question '" + question_id + "' aliases unknown question '" +
                          std::string(target) + "'");
    questions_[std::move(question_id)] = it->second;
}

bool Lexicon::has_question(std::string_view question_id) const {
    return questions_.find(question_id) != questions_.end();
}

const std::vector<KeywordEntry>& Lexicon::entries(std::string_view question_id) const {
    auto it = questions_.find(question_id);
    if (it == questions_.end())
        throw PreconditionError("lexicon has no question '" + std::string(question_id) + "'");
    return *it->second;
}

void Lexicon::require_questions(const std::vector<std::string>& ids) const {
    std::string missing;
    for (const auto& id : ids) {
        if (!has_question(id))
            missing += (missing.empty() ? "" : ", ") + id;
    }
    if (!missing.empty())
        throw FormatError("lexicon is missing questions: " + missing);
}

bool contains_keyword(std::string_view normalized_text,
                      const std::vector<std::string>& normalized_keywords) {
    for (const auto& k : normalized_keywords) {
        if (normalized_text.find(k) != std::string_view::npos)
            return true;
    }
    return false;
}

std::optional<KeywordMatch> match_keywords(std::string_view utterance, std::string_view question_id,
                                           const Lexicon& lexicon) {
    const auto& entries = lexicon.entries(question_id);
    const std::string text = normalize(utterance);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (contains_keyword(text, entries[i].normalized_keywords))
            return KeywordMatch{i, &entries[i]};
    }
    return std::nullopt;
}

} // namespace advisor::nlu
