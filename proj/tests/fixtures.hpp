#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "advisor/attribute_vector.hpp"
#include "advisor/lexicon.hpp"
#include "advisor/spot.hpp"

namespace fixtures {

inline std::filesystem::path data(const std::string& name) {
    return std::filesystem::path(ADVISOR_DATA_DIR) / name;
}

inline const advisor::Catalog& catalog() {
    static const advisor::Catalog c = advisor::Catalog::load(data("catalog.json"));
    return c;
}

inline const advisor::nlu::Lexicon& lexicon() {
    static const advisor::nlu::Lexicon l =
        advisor::nlu::Lexicon::load(data("lexicon.json"), advisor::AttributeSchema::default_schema());
    return l;
}

/// Schema with `n` attributes named a0..a{n-1}, spread over the groups.
inline advisor::SchemaPtr mini_schema(const std::vector<std::string>& ids) {
    std::vector<advisor::Attribute> attrs;
    for (const auto& id : ids)
        attrs.push_back({id, advisor::AttributeGroup::Customer, "Question about " + id + "?",
                         "good for " + id});
    return std::make_shared<const advisor::AttributeSchema>(std::move(attrs));
}

/// Vector whose i-th value is digit i of `code` in base 3.
inline advisor::AttributeVector from_code(const advisor::SchemaPtr& schema, int code) {
    advisor::AttributeVector v(schema);
    for (std::size_t i = 0; i < schema->size(); ++i) {
        v.set(i, advisor::kAllTriValues[code % 3]);
        code /= 3;
    }
    return v;
}

inline advisor::AttributeVector random_vector(const advisor::SchemaPtr& schema, std::mt19937& rng) {
    std::uniform_int_distribution<int> pick(0, 2);
    advisor::AttributeVector v(schema);
    for (std::size_t i = 0; i < schema->size(); ++i)
        v.set(i, advisor::kAllTriValues[pick(rng)]);
    return v;
}

inline advisor::SpotRecord spot(std::string id, std::string type, bool paid, bool parking,
                                bool rain_ok, std::set<std::string> customers,
                                std::set<std::string> seasons) {
    advisor::SpotRecord s;
    s.name = "Spot " + id;
    s.id = std::move(id);
    s.introduction = s.name + " is a nice place.";
    s.spot_type = std::move(type);
    s.paid_admission = paid;
    s.parking = parking;
    s.rain_ok = rain_ok;
    s.recommended_customers = std::move(customers);
    s.recommended_seasons = std::move(seasons);
    return s;
}

} // namespace fixtures
