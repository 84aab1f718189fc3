#include "advisor/attribute_vector.hpp"

#include "advisor/errors.hpp"

namespace advisor {

AttributeVector::AttributeVector(SchemaPtr schema, TriValue fill)
    : schema_(std::move(schema)), values_(schema_->size(), fill) {}

AttributeVector::AttributeVector(SchemaPtr schema, std::vector<TriValue> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
    if (values_.size() != schema_->size())
        throw SchemaMismatch("vector has " + std::to_string(values_.size()) +
                             " values but the schema has " + std::to_string(schema_->size()) +
                             " attributes");
}

TriValue AttributeVector::operator[](std::string_view id) const {
    return values_[schema_->require_index(id)];
}

void AttributeVector::set(std::string_view id, TriValue value) {
    values_[schema_->require_index(id)] = value;
}

nlohmann::ordered_json AttributeVector::to_json() const {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < values_.size(); ++i)
        doc[schema_->at(i).id] = to_string(values_[i]);
    return doc;
}

AttributeVector AttributeVector::from_json(SchemaPtr schema, const nlohmann::json& doc) {
    if (!doc.is_object())
        throw FormatError("attribute vector must be a JSON object");
    if (doc.size() != schema->size())
        throw SchemaMismatch("attribute vector has " + std::to_string(doc.size()) +
                             " entries, schema has " + std::to_string(schema->size()));
    AttributeVector out(schema);
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string())
            throw FormatError("value for '" + key + "' must be a string");
        out.set(key, parse_tri_value(value.get<std::string>()));
    }
    return out;
}

void require_same_schema(const AttributeVector& a, const AttributeVector& b) {
    if (!a.schema().same_layout(b.schema()))
        throw SchemaMismatch("vectors are defined over different schemas");
}

AttributeVector init_user_vector(SchemaPtr schema) {
    return AttributeVector(std::move(schema), TriValue::DontCare);
}

AttributeVector merge_update(const AttributeVector& user, const UpdateRule& rule) {
    require_same_schema(user, rule.proposal);
    AttributeVector out = user;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.set(i, merge_value(user.at(i), rule.proposal.at(i)));
    return out;
}

std::vector<std::string> differing_attributes(const AttributeVector& a, const AttributeVector& b) {
    require_same_schema(a, b);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.at(i) != b.at(i))
            ids.push_back(a.schema().at(i).id);
    }
    return ids;
}

} // namespace advisor
