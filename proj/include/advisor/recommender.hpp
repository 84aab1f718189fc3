#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/attribute_vector.hpp"

namespace advisor {

enum class Branch { MatchDominant, MismatchDominant, Unknown };

std::string_view to_string(Branch branch) noexcept;

enum class ReasonKind {
    Match,               // in M(recommended, user)
    RecommendedMismatch, // in U(recommended, user)
    OtherMismatch,       // in U(other, user)
    GeneralFeature,      // Yes in the recommended spot, spoken when intention is unknown
};

struct Reason {
    std::string attribute_id;
    ReasonKind kind;
};

struct SpotLabel {
    std::string id;
    std::string name;
};

struct RecommendationResult {
    Branch branch;
    std::string recommended_spot_id;
    std::vector<std::string> m_set;   // Yes in recommended and in user
    std::vector<std::string> u_r_set; // Yes in recommended, No in user
    std::vector<std::string> u_n_set; // Yes in other, No in user
    std::vector<Reason> reasons;      // every attribute the message mentions, in speaking order
    std::string message;
};

/// Attributes Yes in both vectors, schema order.
std::vector<std::string> match_set(const AttributeVector& spot, const AttributeVector& user);
/// Attributes Yes in the spot and No in the user vector, schema order.
std::vector<std::string> unmatch_set(const AttributeVector& spot, const AttributeVector& user);

/// Unknown when both counts are zero; otherwise MatchDominant iff
/// matches >= mismatches.
constexpr Branch select_branch(std::size_t matches, std::size_t mismatches) noexcept {
    if (matches == 0 && mismatches == 0)
        return Branch::Unknown;
    return matches >= mismatches ? Branch::MatchDominant : Branch::MismatchDominant;
}

/// Always recommends `recommended`; the branch only changes how the reasons
/// are presented.
RecommendationResult recommend(const AttributeVector& recommended_vector,
                               const AttributeVector& other_vector,
                               const AttributeVector& user_vector, const SpotLabel& recommended,
                               const SpotLabel& other);

} // namespace advisor
