#include "advisor/spot.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "advisor/errors.hpp"

namespace advisor {

namespace {

const std::set<std::string, std::less<>> kSpotTypes{"art_museum", "park", "museum", "observatory"};
const std::set<std::string, std::less<>> kCustomers{"children", "ladies", "babies", "alone", "pets"};
const std::set<std::string, std::less<>> kSeasons{"spring", "summer", "autumn", "winter"};

template <typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw FormatError(where + ": missing field '" + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError(where + ": field '" + key + "' has the wrong type");
    }
}

bool known_token(const AttributeSchema& schema, AttributeGroup group,
                 const std::set<std::string, std::less<>>& universe, const std::string& token) {
    if (universe.contains(token))
        return true;
    auto idx = schema.index_of(token);
    return idx && schema.at(*idx).group == group;
}

} // namespace

SpotRecord spot_from_json(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw FormatError("spot entries must be objects");
    SpotRecord spot;
    spot.id = require<std::string>(doc, "id", "spot");
    const std::string where = "spot '" + spot.id + "'";
    if (spot.id.empty())
        throw FormatError("spot id must not be empty");
    spot.name = require<std::string>(doc, "name", where);
    spot.introduction = require<std::string>(doc, "introduction", where);
    spot.spot_type = require<std::string>(doc, "spot_type", where);
    spot.paid_admission = require<bool>(doc, "paid_admission", where);
    spot.parking = require<bool>(doc, "parking", where);
    spot.rain_ok = require<bool>(doc, "rain_ok", where);
    for (auto& c : require<std::vector<std::string>>(doc, "recommended_customers", where))
        spot.recommended_customers.insert(std::move(c));
    for (auto& s : require<std::vector<std::string>>(doc, "recommended_seasons", where))
        spot.recommended_seasons.insert(std::move(s));

    if (auto qa = doc.find("qa_entries"); qa != doc.end()) {
        if (!qa->is_array())
            throw FormatError(where + ": qa_entries must be a list");
        for (const auto& entry : *qa) {
            QaEntry e{require<std::vector<std::string>>(entry, "keywords", where),
                      require<std::string>(entry, "answer", where)};
            if (e.keywords.empty())
                throw FormatError(where + ": qa entry without keywords");
            spot.qa_entries.push_back(std::move(e));
        }
    }
    return spot;
}

nlohmann::ordered_json spot_to_json(const SpotRecord& spot) {
    nlohmann::ordered_json qa = nlohmann::ordered_json::array();
    for (const auto& e : spot.qa_entries)
        qa.push_back({{"keywords", e.keywords}, {"answer", e.answer}});
    return {{"id", spot.id},
            {"name", spot.name},
            {"introduction", spot.introduction},
            {"qa_entries", qa},
            {"spot_type", spot.spot_type},
            {"paid_admission", spot.paid_admission},
            {"parking", spot.parking},
            {"rain_ok", spot.rain_ok},
            {"recommended_customers", spot.recommended_customers},
            {"recommended_seasons", spot.recommended_seasons}};
}

Catalog::Catalog(std::vector<SpotRecord> spots) : spots_(std::move(spots)) {
    std::unordered_set<std::string> ids;
    for (const auto& s : spots_) {
        if (!ids.insert(s.id).second)
            throw FormatError("duplicate spot id '" + s.id + "'");
    }
}

Catalog Catalog::from_json(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw FormatError("catalog must be a JSON object");
    const int version = require<int>(doc, "schema_version", "catalog");
    if (version != kSchemaVersion)
        throw FormatError("unsupported catalog schema_version " + std::to_string(version));
    auto spots = doc.find("spots");
    if (spots == doc.end() || !spots->is_array())
        throw FormatError("catalog: 'spots' must be a list");
    std::vector<SpotRecord> records;
    for (const auto& s : *spots)
        records.push_back(spot_from_json(s));
    return Catalog(std::move(records));
}

Catalog Catalog::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open catalog " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

nlohmann::ordered_json Catalog::to_json() const {
    nlohmann::ordered_json spots = nlohmann::ordered_json::array();
    for (const auto& s : spots_)
        spots.push_back(spot_to_json(s));
    return {{"schema_version", kSchemaVersion}, {"spots", spots}};
}

const SpotRecord* Catalog::find(std::string_view id) const noexcept {
    auto it = std::find_if(spots_.begin(), spots_.end(),
                           [&](const SpotRecord& s) { return s.id == id; });
    return it == spots_.end() ? nullptr : &*it;
}

AttributeVector extract_attribute_vector(const SpotRecord& record, const SchemaPtr& schema) {
    if (!known_token(*schema, AttributeGroup::SpotType, kSpotTypes, record.spot_type))
        throw SchemaMismatch("unknown spot_type '" + record.spot_type + "' in spot '" +
                             record.id + "'");
    for (const auto& c : record.recommended_customers) {
        if (!known_token(*schema, AttributeGroup::Customer, kCustomers, c))
            throw SchemaMismatch("unknown customer '" + c + "' in spot '" + record.id + "'");
    }
    for (const auto& s : record.recommended_seasons) {
        if (!known_token(*schema, AttributeGroup::Season, kSeasons, s))
            throw SchemaMismatch("unknown season '" + s + "' in spot '" + record.id + "'");
    }

    auto yes_no = [](bool b) { return b ? TriValue::Yes : TriValue::No; };
    AttributeVector out(schema);
    for (std::size_t i = 0; i < schema->size(); ++i) {
        const Attribute& attr = schema->at(i);
        switch (attr.group) {
        case AttributeGroup::SpotType:
            out.set(i, yes_no(attr.id == record.spot_type));
            break;
        case AttributeGroup::Facility:
            if (attr.id == "free_admission")
                out.set(i, yes_no(!record.paid_admission));
            else if (attr.id == "parking")
                out.set(i, yes_no(record.parking));
            else if (attr.id == "rain_ok")
                out.set(i, yes_no(record.rain_ok));
            else
                throw SchemaMismatch("no catalog field backs facility attribute '" + attr.id + "'");
            break;
        case AttributeGroup::Customer:
            out.set(i, record.recommended_customers.contains(attr.id) ? TriValue::Yes
                                                                     : TriValue::DontCare);
            break;
        case AttributeGroup::Season:
            out.set(i, record.recommended_seasons.contains(attr.id) ? TriValue::Yes
                                                                   : TriValue::DontCare);
            break;
        }
    }
    return out;
}

} // namespace advisor
