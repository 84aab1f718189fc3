#include "advisor/schema.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "advisor/errors.hpp"

namespace advisor {

namespace {

constexpr std::string_view kGroupNames[] = {"spot_type", "facility", "customer", "season"};

std::vector<Attribute> default_attributes() {
    using G = AttributeGroup;
    return {
        {"art_museum", G::SpotType, "Do you like art museums?", "an art museum"},
        {"park", G::SpotType, "Do you like spending time in parks?", "a park"},
        {"museum", G::SpotType, "Are you interested in museums?", "a museum"},
        {"observatory", G::SpotType, "Do you enjoy views from observatories?", "an observatory"},
        {"free_admission", G::Facility, "Would you prefer a place with free admission?",
         "free to enter"},
        {"parking", G::Facility, "Will you be travelling by car?", "equipped with parking"},
        {"rain_ok", G::Facility, "Would you like a place you can enjoy even in the rain?",
         "enjoyable even in the rain"},
        {"children", G::Customer, "Will you go with your children?", "recommended for children"},
        {"ladies", G::Customer, "Will you be travelling with female friends?",
         "popular with ladies"},
        {"babies", G::Customer, "Will you be bringing a baby?", "friendly to babies"},
        {"alone", G::Customer, "Will you travel alone?", "good for travelling alone"},
        {"pets", G::Customer, "Will you bring your pet?", "welcoming to pets"},
        {"spring", G::Season, "Are you planning to go in spring?", "recommended in spring"},
        {"summer", G::Season, "Are you planning to go in summer?", "recommended in summer"},
        {"autumn", G::Season, "Are you planning to go in autumn?", "recommended in autumn"},
        {"winter", G::Season, "Are you planning to go in winter?", "recommended in winter"},
    };
}

std::string require_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw FormatError(std::string("schema attribute needs string field '") + key + "'");
    return it->get<std::string>();
}

} // namespace

std::string_view to_string(AttributeGroup group) noexcept {
    return kGroupNames[static_cast<int>(group)];
}

AttributeGroup parse_attribute_group(std::string_view text) {
    for (int i = 0; i < 4; ++i) {
        if (kGroupNames[i] == text)
            return static_cast<AttributeGroup>(i);
    }
    throw FormatError("unknown attribute group '" + std::string(text) + "'");
}

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
    std::unordered_set<std::string_view> seen;
    for (const auto& attr : attributes_) {
        if (attr.id.empty())
            throw FormatError("attribute id must not be empty");
        if (!seen.insert(attr.id).second)
            throw FormatError("duplicate attribute id '" + attr.id + "'");
    }
}

std::shared_ptr<const AttributeSchema> AttributeSchema::default_schema() {
    static const auto schema = std::make_shared<const AttributeSchema>(default_attributes());
    return schema;
}

std::shared_ptr<const AttributeSchema> AttributeSchema::from_json(const nlohmann::json& doc) {
    if (!doc.is_array())
        throw FormatError("schema must be a JSON list");
    std::vector<Attribute> attrs;
    for (const auto& item : doc) {
        if (!item.is_object())
            throw FormatError("schema entries must be objects");
        attrs.push_back({require_string(item, "id"),
                         parse_attribute_group(require_string(item, "group")),
                         require_string(item, "question_text"),
                         require_string(item, "reason_template")});
    }
    return std::make_shared<const AttributeSchema>(std::move(attrs));
}

std::shared_ptr<const AttributeSchema> AttributeSchema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open schema file " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

nlohmann::json AttributeSchema::to_json() const {
    auto doc = nlohmann::json::array();
    for (const auto& attr : attributes_) {
        doc.push_back({{"id", attr.id},
                       {"group", to_string(attr.group)},
                       {"question_text", attr.question_text},
                       {"reason_template", attr.reason_template}});
    }
    return doc;
}

std::optional<std::size_t> AttributeSchema::index_of(std::string_view id) const noexcept {
    auto it = std::find_if(attributes_.begin(), attributes_.end(),
                           [&](const Attribute& a) { return a.id == id; });
    if (it == attributes_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - attributes_.begin());
}

std::size_t AttributeSchema::require_index(std::string_view id) const {
    if (auto idx = index_of(id))
        return *idx;
    throw SchemaMismatch("attribute '" + std::string(id) + "' is not in the schema");
}

std::vector<std::string> AttributeSchema::ids_in(AttributeGroup group) const {
    std::vector<std::string> ids;
    for (const auto& attr : attributes_) {
        if (attr.group == group)
            ids.push_back(attr.id);
    }
    return ids;
}

bool AttributeSchema::same_layout(const AttributeSchema& other) const noexcept {
    if (this == &other)
        return true;
    return std::equal(attributes_.begin(), attributes_.end(), other.attributes_.begin(),
                      other.attributes_.end(),
                      [](const Attribute& a, const Attribute& b) { return a.id == b.id; });
}

} // namespace advisor
