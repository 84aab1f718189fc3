#include <random>

#include "advisor/attribute_vector.hpp"
#include "advisor/errors.hpp"
#include "advisor/spot.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace advisor;

namespace {

const TriValue Y = TriValue::Yes;
const TriValue N = TriValue::No;
const TriValue D = TriValue::DontCare;

SchemaPtr schema16() { return AttributeSchema::default_schema(); }

} // namespace

TEST_CASE("tri-values have three wire names that round-trip") {
    CHECK(to_string(Y) == "yes");
    CHECK(to_string(N) == "no");
    CHECK(to_string(D) == "dont_care");
    for (TriValue v : kAllTriValues)
        CHECK(parse_tri_value(to_string(v)) == v);
    CHECK_THROWS_AS(parse_tri_value("maybe"), FormatError);
}

TEST_CASE("default schema has 16 attributes in four groups") {
    const auto& s = *schema16();
    REQUIRE(s.size() == 16);
    CHECK(s.ids_in(AttributeGroup::SpotType) ==
          std::vector<std::string>{"art_museum", "park", "museum", "observatory"});
    CHECK(s.ids_in(AttributeGroup::Facility) ==
          std::vector<std::string>{"free_admission", "parking", "rain_ok"});
    CHECK(s.ids_in(AttributeGroup::Customer) ==
          std::vector<std::string>{"children", "ladies", "babies", "alone", "pets"});
    CHECK(s.ids_in(AttributeGroup::Season) ==
          std::vector<std::string>{"spring", "summer", "autumn", "winter"});
    CHECK(s.at(s.require_index("children")).question_text == "Will you go with your children?");
}

TEST_CASE("schema files round-trip and reject duplicate ids") {
    auto reloaded = AttributeSchema::from_json(schema16()->to_json());
    CHECK(reloaded->same_layout(*schema16()));
    CHECK(reloaded->to_json() == schema16()->to_json());

    nlohmann::json dup = nlohmann::json::array();
    for (int i = 0; i < 2; ++i)
        dup.push_back({{"id", "x"}, {"group", "season"}, {"question_text", "q"}, {"reason_template", "r"}});
    CHECK_THROWS_AS(AttributeSchema::from_json(dup), FormatError);
    CHECK_THROWS_AS(AttributeSchema::from_json(nlohmann::json::parse(
                        R"([{"id":"x","group":"weather","question_text":"q","reason_template":"r"}])")),
                    FormatError);
}

TEST_CASE("attribute vector JSON must be complete over the schema") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        auto v = fixtures::random_vector(schema16(), rng);
        CHECK(AttributeVector::from_json(schema16(), v.to_json()) == v);
    }
    auto doc = nlohmann::json(init_user_vector(schema16()).to_json());
    doc.erase("pets");
    CHECK_THROWS_AS(AttributeVector::from_json(schema16(), doc), SchemaMismatch);
    doc["pets"] = "yes";
    doc.erase("winter");
    doc["snow"] = "yes";
    CHECK_THROWS_AS(AttributeVector::from_json(schema16(), doc), SchemaMismatch);
}

TEST_CASE("init_user_vector is all DontCare") {
    SUBCASE("default schema") {
        auto v = init_user_vector(schema16());
        CHECK(v.size() == 16);
        CHECK(v.values() == std::vector<TriValue>(16, D));
    }
    SUBCASE("mini schema") {
        auto v = init_user_vector(fixtures::mini_schema({"a", "b", "c", "d"}));
        CHECK(v.values() == std::vector<TriValue>(4, D));
    }
    SUBCASE("survives serialization") {
        auto v = init_user_vector(schema16());
        CHECK(AttributeVector::from_json(schema16(), nlohmann::json::parse(v.to_json().dump())) == v);
    }
}

TEST_CASE("extract_attribute_vector maps catalog fields") {
    SUBCASE("spot type is one-hot") {
        auto v = extract_attribute_vector(fixtures::spot("p", "park", true, false, false, {}, {}), schema16());
        CHECK(v["park"] == Y);
        CHECK(v["art_museum"] == N);
        CHECK(v["museum"] == N);
        CHECK(v["observatory"] == N);
    }
    SUBCASE("no recommended customers leaves them DontCare") {
        auto v = extract_attribute_vector(fixtures::spot("p", "park", true, false, false, {}, {}), schema16());
        for (const auto& id : schema16()->ids_in(AttributeGroup::Customer))
            CHECK(v[id] == D);
    }
    SUBCASE("facilities come straight from the booleans") {
        auto v = extract_attribute_vector(fixtures::spot("p", "museum", false, true, false, {}, {}), schema16());
        CHECK(v["free_admission"] == Y);
        CHECK(v["parking"] == Y);
        CHECK(v["rain_ok"] == N);
    }
    SUBCASE("listed customers and seasons are Yes") {
        auto v = extract_attribute_vector(
            fixtures::spot("p", "museum", false, true, false, {"children", "pets"}, {"winter"}), schema16());
        CHECK(v["children"] == Y);
        CHECK(v["pets"] == Y);
        CHECK(v["ladies"] == D);
        CHECK(v["winter"] == Y);
        CHECK(v["summer"] == D);
    }
    SUBCASE("unknown tokens are schema mismatches naming the token") {
        auto check_token = [](SpotRecord s, const std::string& token) {
            try {
                extract_attribute_vector(s, schema16());
                FAIL("expected SchemaMismatch");
            } catch (const SchemaMismatch& e) {
                CHECK(std::string(e.what()).find(token) != std::string::npos);
            }
        };
        check_token(fixtures::spot("p", "zoo", false, false, false, {}, {}), "zoo");
        check_token(fixtures::spot("p", "park", false, false, false, {"teenagers"}, {}), "teenagers");
        check_token(fixtures::spot("p", "park", false, false, false, {}, {"monsoon"}), "monsoon");
    }
}

TEST_CASE("extracted vectors always satisfy the spot-vector invariants") {
    const std::vector<std::string> types{"art_museum", "park", "museum", "observatory"};
    const std::vector<std::string> customers{"children", "ladies", "babies", "alone", "pets"};
    const std::vector<std::string> seasons{"spring", "summer", "autumn", "winter"};
    std::mt19937 rng(11);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 500; ++trial) {
        std::set<std::string> cs, ss;
        for (const auto& c : customers)
            if (coin(rng))
                cs.insert(c);
        for (const auto& s : seasons)
            if (coin(rng))
                ss.insert(s);
        auto v = extract_attribute_vector(
            fixtures::spot("x", types[rng() % 4], coin(rng), coin(rng), coin(rng), cs, ss), schema16());
        int yes_types = 0;
        for (const auto& t : types) {
            CHECK(v[t] != D);
            yes_types += v[t] == Y;
        }
        CHECK(yes_types == 1);
        for (const auto& id : schema16()->ids_in(AttributeGroup::Facility))
            CHECK(v[id] != D);
        for (const auto& id : customers)
            CHECK(v[id] != N);
        for (const auto& id : seasons)
            CHECK(v[id] != N);
    }
}

TEST_CASE("merge_value follows the update table for all nine pairs") {
    // (current, proposal) -> result
    struct Row {
        TriValue current, proposal, result;
    };
    const Row table[] = {
        {Y, Y, Y}, {Y, N, Y}, {Y, D, Y},
        {N, Y, Y}, {N, N, N}, {N, D, N},
        {D, Y, Y}, {D, N, N}, {D, D, D},
    };
    for (const auto& row : table) {
        CAPTURE(to_string(row.current));
        CAPTURE(to_string(row.proposal));
        CHECK(merge_value(row.current, row.proposal) == row.result);
    }
}

TEST_CASE("merge_update examples") {
    auto schema = fixtures::mini_schema({"x"});
    auto single = [&](TriValue current, TriValue proposal) {
        AttributeVector user(schema, current);
        return merge_update(user, UpdateRule{AttributeVector(schema, proposal)})["x"];
    };
    CHECK(single(Y, N) == Y);
    CHECK(single(D, N) == N);
    CHECK(single(N, Y) == Y);
}

TEST_CASE("merge_update is per-attribute and leaves its input alone") {
    auto schema = fixtures::mini_schema({"a", "b", "c", "d", "e"});
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto user = fixtures::random_vector(schema, rng);
        const auto before = user;
        const UpdateRule rule{fixtures::random_vector(schema, rng)};
        const auto merged = merge_update(user, rule);
        CHECK(user == before);
        for (std::size_t i = 0; i < schema->size(); ++i)
            CHECK(merged.at(i) == merge_value(user.at(i), rule.proposal.at(i)));
    }
}

TEST_CASE("Yes is never demoted by any rule sequence") {
    std::mt19937 rng(2022);
    auto schema = schema16();
    for (int trial = 0; trial < 300; ++trial) {
        auto user = init_user_vector(schema);
        std::vector<bool> was_yes(schema->size(), false);
        for (int k = 0; k < 20; ++k) {
            user = merge_update(user, UpdateRule{fixtures::random_vector(schema, rng)});
            for (std::size_t i = 0; i < schema->size(); ++i) {
                if (was_yes[i])
                    REQUIRE(user.at(i) == Y);
                was_yes[i] = user.at(i) == Y;
            }
        }
    }
}

TEST_CASE("merge_update rejects a rule over another schema") {
    auto user = init_user_vector(schema16());
    UpdateRule rule{AttributeVector(fixtures::mini_schema({"a"}))};
    CHECK_THROWS_AS(merge_update(user, rule), SchemaMismatch);
}

TEST_CASE("differing_attributes") {
    SUBCASE("equal vectors") {
        auto v = init_user_vector(schema16());
        CHECK(differing_attributes(v, v).empty());
    }
    SUBCASE("spot type swap is reported in schema order") {
        auto a = init_user_vector(schema16());
        auto b = a;
        a.set("park", Y);
        a.set("museum", N);
        b.set("park", N);
        b.set("museum", Y);
        CHECK(differing_attributes(a, b) == std::vector<std::string>{"park", "museum"});
    }
    SUBCASE("Yes against DontCare differs") {
        auto a = init_user_vector(schema16());
        auto b = a;
        a.set("children", Y);
        CHECK(differing_attributes(a, b) == std::vector<std::string>{"children"});
    }
    SUBCASE("6 of the 9 single-attribute value pairs differ") {
        auto schema = fixtures::mini_schema({"x"});
        int differing = 0;
        for (TriValue p : kAllTriValues)
            for (TriValue q : kAllTriValues)
                differing += !differing_attributes(AttributeVector(schema, p), AttributeVector(schema, q)).empty();
        CHECK(differing == 6);
    }
    SUBCASE("schema mismatch") {
        CHECK_THROWS_AS(differing_attributes(init_user_vector(schema16()),
                                             init_user_vector(fixtures::mini_schema({"a"}))),
                        SchemaMismatch);
    }
}

TEST_CASE("differing_attributes is symmetric and irreflexive") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = fixtures::random_vector(schema16(), rng);
        auto b = fixtures::random_vector(schema16(), rng);
        auto ab = differing_attributes(a, b);
        auto ba = differing_attributes(b, a);
        CHECK(std::set<std::string>(ab.begin(), ab.end()) == std::set<std::string>(ba.begin(), ba.end()));
        CHECK(differing_attributes(a, a).empty());
        // brute-force comparison
        std::vector<std::string> expected;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.at(i) != b.at(i))
                expected.push_back(schema16()->at(i).id);
        CHECK(ab == expected);
    }
}

TEST_CASE("catalog loading") {
    SUBCASE("fixture catalog loads and every spot extracts") {
        const auto& cat = fixtures::catalog();
        CHECK(cat.spots().size() >= 5);
        for (const auto& s : cat.spots())
            CHECK_NOTHROW(extract_attribute_vector(s, schema16()));
        CHECK(cat.find("maple_park") != nullptr);
        CHECK(cat.find("nowhere") == nullptr);
        CHECK(Catalog::from_json(cat.to_json()).spots() == cat.spots());
    }
    SUBCASE("records lacking a facility field are rejected") {
        auto doc = nlohmann::json(fixtures::catalog().to_json());
        doc["spots"][0].erase("parking");
        CHECK_THROWS_AS(Catalog::from_json(doc), FormatError);
    }
    SUBCASE("wrong schema_version") {
        auto doc = nlohmann::json(fixtures::catalog().to_json());
        doc["schema_version"] = 2;
        CHECK_THROWS_AS(Catalog::from_json(doc), FormatError);
    }
    SUBCASE("duplicate spot ids") {
        auto doc = nlohmann::json(fixtures::catalog().to_json());
        doc["spots"].push_back(doc["spots"][0]);
        CHECK_THROWS_AS(Catalog::from_json(doc), FormatError);
    }
}
