#include "advisor/recommender.hpp"

namespace advisor {

namespace {

std::vector<std::string> filter(const AttributeVector& spot, const AttributeVector& user,
                                TriValue wanted_user_value) {
    require_same_schema(spot, user);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < spot.size(); ++i) {
        if (spot.at(i) == TriValue::Yes && user.at(i) == wanted_user_value)
            ids.push_back(spot.schema().at(i).id);
    }
    return ids;
}

// "a", "a and b", "a, b and c"
std::string join_phrases(const std::vector<std::string>& phrases) {
    std::string out;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (i > 0)
            out += (i + 1 == phrases.size()) ? " and " : ", ";
        out += phrases[i];
    }
    return out;
}

class MessageBuilder {
public:
    MessageBuilder(const AttributeSchema& schema, std::vector<Reason>& reasons)
        : schema_(schema), reasons_(reasons) {}

    std::string phrases(const std::vector<std::string>& ids, ReasonKind kind) {
        std::vector<std::string> parts;
        for (const auto& id : ids) {
            parts.push_back(schema_.at(schema_.require_index(id)).reason_template);
            reasons_.push_back({id, kind});
        }
        return join_phrases(parts);
    }

    void sentence(std::string s) {
        if (!text_.empty())
            text_ += ' ';
        text_ += std::move(s);
    }

    std::string take() { return std::move(text_); }

private:
    const AttributeSchema& schema_;
    std::vector<Reason>& reasons_;
    std::string text_;
};

} // namespace

std::string_view to_string(Branch branch) noexcept {
    switch (branch) {
    case Branch::MatchDominant:
        return "match_dominant";
    case Branch::MismatchDominant:
        return "mismatch_dominant";
    case Branch::Unknown:
        break;
    }
    return "unknown";
}

std::vector<std::string> match_set(const AttributeVector& spot, const AttributeVector& user) {
    return filter(spot, user, TriValue::Yes);
}

std::vector<std::string> unmatch_set(const AttributeVector& spot, const AttributeVector& user) {
    return filter(spot, user, TriValue::No);
}

RecommendationResult recommend(const AttributeVector& recommended_vector,
                               const AttributeVector& other_vector,
                               const AttributeVector& user_vector, const SpotLabel& recommended,
                               const SpotLabel& other) {
    require_same_schema(recommended_vector, other_vector);
    require_same_schema(recommended_vector, user_vector);

    RecommendationResult result;
    result.recommended_spot_id = recommended.id;
    result.m_set = match_set(recommended_vector, user_vector);
    result.u_r_set = unmatch_set(recommended_vector, user_vector);
    result.u_n_set = unmatch_set(other_vector, user_vector);
    result.branch = select_branch(result.m_set.size(), result.u_r_set.size());

    MessageBuilder msg(recommended_vector.schema(), result.reasons);
    const std::string& r = recommended.name;
    const std::string& n = other.name;

    switch (result.branch) {
    case Branch::MatchDominant:
        msg.sentence("I recommend " + r + ".");
        msg.sentence(r + " is " + msg.phrases(result.m_set, ReasonKind::Match) +
                     ", which matches what you told me.");
        if (!result.u_n_set.empty())
            msg.sentence("On the other hand, " + n + " is " +
                         msg.phrases(result.u_n_set, ReasonKind::OtherMismatch) +
                         ", which does not suit your plans.");
        break;
    case Branch::MismatchDominant:
        msg.sentence(r + " is " + msg.phrases(result.u_r_set, ReasonKind::RecommendedMismatch) +
                     ", which may not quite match what you are looking for.");
        if (!result.m_set.empty())
            msg.sentence("However, " + r + " is " + msg.phrases(result.m_set, ReasonKind::Match) +
                         ", just as you wanted.");
        if (!result.u_n_set.empty())
            msg.sentence("And " + n + " is " +
                         msg.phrases(result.u_n_set, ReasonKind::OtherMismatch) +
                         ", which does not suit your plans either.");
        msg.sentence("All things considered, I recommend " + r + ".");
        break;
    case Branch::Unknown: {
        msg.sentence("I recommend " + r + ".");
        const AttributeSchema& schema = recommended_vector.schema();
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (recommended_vector.at(i) != TriValue::Yes)
                continue;
            msg.sentence("Generally " + msg.phrases({schema.at(i).id}, ReasonKind::GeneralFeature) +
                         ".");
        }
        break;
    }
    }
    result.message = msg.take();
    return result;
}

} // namespace advisor
