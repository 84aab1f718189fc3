#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace advisor {

enum class AttributeGroup { SpotType, Facility, Customer, Season };

std::string_view to_string(AttributeGroup group) noexcept;
AttributeGroup parse_attribute_group(std::string_view text);

struct Attribute {
    std::string id;
    AttributeGroup group;
    std::string question_text;   // asked when the two candidate spots differ here
    std::string reason_template; // predicate phrase, e.g. "recommended for children"
};

/// Ordered universe of attributes. Order drives question order and the order
/// reasons are spoken in.
class AttributeSchema {
public:
    explicit AttributeSchema(std::vector<Attribute> attributes);

    /// The 16-attribute travel schema: 4 spot types, 3 facilities,
    /// 5 customer types, 4 seasons.
    static std::shared_ptr<const AttributeSchema> default_schema();

    /// Expects a JSON list of {id, group, question_text, reason_template}.
    static std::shared_ptr<const AttributeSchema> from_json(const nlohmann::json& doc);
    static std::shared_ptr<const AttributeSchema> load(const std::filesystem::path& path);

    nlohmann::json to_json() const;

    std::size_t size() const noexcept { return attributes_.size(); }
    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
    const Attribute& at(std::size_t index) const { return attributes_.at(index); }

    std::optional<std::size_t> index_of(std::string_view id) const noexcept;
    /// Like index_of, but throws SchemaMismatch for an unknown id.
    std::size_t require_index(std::string_view id) const;

    /// Ids of the attributes in `group`, in schema order.
    std::vector<std::string> ids_in(AttributeGroup group) const;

    /// Same ids in the same order.
    bool same_layout(const AttributeSchema& other) const noexcept;

private:
    std::vector<Attribute> attributes_;
};

using SchemaPtr = std::shared_ptr<const AttributeSchema>;

} // namespace advisor
