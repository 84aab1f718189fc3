#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "advisor/attribute_vector.hpp"
#include "json.hpp"

namespace advisor {

struct QaEntry {
    std::vector<std::string> keywords;
    std::string answer;

    friend bool operator==(const QaEntry&, const QaEntry&) = default;
};

/// One sightseeing spot as it appears in the catalog file.
struct SpotRecord {
    std::string id;
    std::string name;
    std::string introduction;
    std::vector<QaEntry> qa_entries;

    std::string spot_type; // art_museum | park | museum | observatory
    bool paid_admission = false;
    bool parking = false;
    bool rain_ok = false;
    std::set<std::string> recommended_customers; // children ladies babies alone pets
    std::set<std::string> recommended_seasons;   // spring summer autumn winter

    friend bool operator==(const SpotRecord&, const SpotRecord&) = default;
};

SpotRecord spot_from_json(const nlohmann::json& doc);
nlohmann::ordered_json spot_to_json(const SpotRecord& spot);

/// {"schema_version": 1, "spots": [...]}
class Catalog {
public:
    static constexpr int kSchemaVersion = 1;

    Catalog() = default;
    explicit Catalog(std::vector<SpotRecord> spots);

    static Catalog from_json(const nlohmann::json& doc);
    static Catalog load(const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;

    const std::vector<SpotRecord>& spots() const noexcept { return spots_; }
    /// nullptr when absent.
    const SpotRecord* find(std::string_view id) const noexcept;

private:
    std::vector<SpotRecord> spots_;
};

/// Spot type is one-hot, facilities are Yes/No, customers and seasons are
/// Yes when listed and DontCare otherwise. Throws SchemaMismatch naming any
/// token the schema cannot represent.
AttributeVector extract_attribute_vector(const SpotRecord& record, const SchemaPtr& schema);

} // namespace advisor
