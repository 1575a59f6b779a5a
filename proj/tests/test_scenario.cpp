// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "gravity/scenario.hpp"
#include "scenario_builder.hpp"

using namespace gravity;

namespace {

bool mentions(const ScenarioError& e, const std::string& needle) {
    return std::any_of(e.violations.begin(), e.violations.end(), [&](const std::string& item) {
        return item.find(needle) != std::string::npos;
    });
}

} // namespace

TEST_CASE("baseline scenario parses into the expected structures") {
    auto j = testutil::baseline_scenario(11, 8, 60, 5);
    Scenario s = parse_scenario(j.dump());

    CHECK(s.seed == 42);
    CHECK(s.ticks == 60);
    REQUIRE(s.chains.size() == 1);
    CHECK(s.chains[0].chain_id == "alpha");
    CHECK(s.nodes.size() == 11);
    CHECK(s.feeds.count("price") == 1);
    CHECK(s.feeds.at("price").scale_pow10 == 2);
    CHECK(s.feeds.at("price").sources.size() == 3);
    REQUIRE(s.nebulae.size() == 1);
    CHECK(s.nebulae[0].params.required == 8);
    CHECK(s.nebulae[0].candidates.size() == 11);
    CHECK(s.subscriptions.size() == 2);
    CHECK(s.subscriptions[1].kind == ContractKind::Trigger);
    CHECK(s.policy.consul_count == 5);
    CHECK(s.sources.contains("src-a"));
    CHECK(s.sources.get("src-a").base == Decimal::parse("100.00"));
}

TEST_CASE("k greater than n is a validation error") {
    auto j = testutil::baseline_scenario(11, 8, 60, 5);
    j["nebulae"][0]["k"] = 12;
    CHECK_THROWS_AS(parse_scenario(j.dump()), ScenarioError);
    try {
        parse_scenario(j.dump());
    } catch (const ScenarioError& e) {
        CHECK(mentions(e, "k must satisfy"));
    }
}

TEST_CASE("unknown keys are rejected everywhere") {
    auto j = testutil::baseline_scenario(3, 2, 10, 5);
    j["surprise"] = 1;
    j["policy"]["typo_key"] = 2;
    j["chains"][0]["colour"] = "red";
    try {
        parse_scenario(j.dump());
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(mentions(e, "unknown key 'surprise'"));
        CHECK(mentions(e, "unknown key 'typo_key'"));
        CHECK(mentions(e, "unknown key 'colour'"));
        CHECK(e.violations.size() >= 3); // all violations reported at once
    }
}

TEST_CASE("unresolved references are reported") {
    auto j = testutil::baseline_scenario(3, 2, 10, 5);
    j["nebulae"][0]["chain"] = "ghost-chain";
    j["nebulae"][0]["oracles"].push_back("node-99");
    j["nodes"][0]["feeds"] = {"missing-feed"};
    try {
        parse_scenario(j.dump());
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(mentions(e, "ghost-chain"));
        CHECK(mentions(e, "node-99"));
        CHECK(mentions(e, "missing-feed"));
    }
}

TEST_CASE("one feed cannot serve two nebulae") {
    auto j = testutil::baseline_scenario(3, 2, 10, 5);
    auto clone = j["nebulae"][0];
    clone["id"] = "neb-second";
    j["nebulae"].push_back(clone);
    try {
        parse_scenario(j.dump());
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(mentions(e, "already serves another nebula"));
    }
}

TEST_CASE("genesis balances above the token supply are rejected") {
    auto j = testutil::baseline_scenario(3, 2, 10, 5);
    j["chains"][0]["token_supply"] = 100;
    try {
        parse_scenario(j.dump());
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(mentions(e, "cannot cover"));
    }
}

TEST_CASE("bindings must stay within the feed spec and keep mandatory sources") {
    auto j = testutil::baseline_scenario(3, 2, 10, 5);
    j["nodes"][0]["feeds"] = {{{"id", "price"}, {"sources", {"src-b"}}}};
    j["nodes"][1]["feeds"] = {{{"id", "price"}, {"sources", {"src-a", "nonexistent"}}}};
    try {
        parse_scenario(j.dump());
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(mentions(e, "misses mandatory source"));
        CHECK(mentions(e, "nonexistent"));
    }
}

TEST_CASE("fault plans and sybil waves parse") {
    auto j = testutil::baseline_scenario(5, 3, 40, 5);
    j["faults"] = {
        {"nodes",
         {{{"node", "node-03"},
           {"offline", {{10, 20}}},
           {"divergence_offset", 1000},
           {"fraud_reveal", true}}}},
        {"sources", {{{"source", "src-b"}, {"silent", {{3, 4}}}, {"wrong_value", {{"12", "999.99"}}}}}},
        {"sybil", {{"tick", 5}, {"count", 20}, {"chain", "alpha"}, {"deposit", 10}}},
        {"manual_scores", {{{"tick", 12}, {"rater", "node-01"}, {"ratee", "node-02"}, {"value", 50}}}},
    };
    Scenario s = parse_scenario(j.dump());
    REQUIRE(s.node_faults.count("node-03") == 1);
    CHECK(s.node_faults.at("node-03").divergence_offset == 1000);
    CHECK(s.node_faults.at("node-03").fraud_reveal);
    CHECK(s.node_faults.at("node-03").is_offline(15));
    REQUIRE(s.sybil.has_value());
    CHECK(s.sybil->count == 20);
    CHECK(s.sources.get("src-b").silent_ticks.count(3) == 1);
    CHECK(s.sources.get("src-b").wrong_value.at(12) == "999.99");
    REQUIRE(s.manual_scores.size() == 1);
    CHECK(s.manual_scores[0].value == 50.0);
}

TEST_CASE("not-JSON input fails with a clear violation") {
    try {
        parse_scenario("this is not json");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(mentions(e, "not valid JSON"));
    }
}
