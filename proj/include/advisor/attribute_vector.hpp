#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/schema.hpp"
#include "advisor/tri_value.hpp"
#include "json.hpp"

namespace advisor {

/// One TriValue per schema attribute. Used for spot vectors and the user
/// vector alike.
class AttributeVector {
public:
    explicit AttributeVector(SchemaPtr schema, TriValue fill = TriValue::DontCare);
    AttributeVector(SchemaPtr schema, std::vector<TriValue> values);

    const AttributeSchema& schema() const noexcept { return *schema_; }
    const SchemaPtr& schema_ptr() const noexcept { return schema_; }

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<TriValue>& values() const noexcept { return values_; }

    TriValue at(std::size_t index) const { return values_.at(index); }
    TriValue operator[](std::string_view id) const;

    void set(std::string_view id, TriValue value);
    void set(std::size_t index, TriValue value) { values_.at(index) = value; }

    /// {"<id>": "yes"|"no"|"dont_care", ...} in schema order.
    nlohmann::ordered_json to_json() const;
    /// Requires every schema attribute exactly once and nothing else.
    static AttributeVector from_json(SchemaPtr schema, const nlohmann::json& doc);

    friend bool operator==(const AttributeVector& a, const AttributeVector& b) {
        return a.schema_->same_layout(*b.schema_) && a.values_ == b.values_;
    }

private:
    SchemaPtr schema_;
    std::vector<TriValue> values_;
};

/// A full-vector proposal attached to a lexicon entry.
struct UpdateRule {
    AttributeVector proposal;
};

/// Throws SchemaMismatch unless both vectors share one attribute layout.
void require_same_schema(const AttributeVector& a, const AttributeVector& b);

/// Every attribute DontCare.
AttributeVector init_user_vector(SchemaPtr schema);

/// Single-attribute merge: Yes always wins, No only overwrites DontCare,
/// DontCare proposes nothing.
constexpr TriValue merge_value(TriValue current, TriValue proposal) noexcept {
    switch (proposal) {
    case TriValue::Yes:
        return TriValue::Yes;
    case TriValue::No:
        return current == TriValue::DontCare ? TriValue::No : current;
    case TriValue::DontCare:
        break;
    }
    return current;
}

/// Applies `rule` attribute by attribute; returns a new vector.
AttributeVector merge_update(const AttributeVector& user, const UpdateRule& rule);

/// Ids whose values differ, in schema order.
std::vector<std::string> differing_attributes(const AttributeVector& a, const AttributeVector& b);

} // namespace advisor
