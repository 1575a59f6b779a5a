// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gravity/chain.hpp"
#include "gravity/extractor.hpp"
#include "gravity/node.hpp"
#include "gravity/reputation.hpp"

namespace gravity {

struct RegistrationSpec {
    ChainId chain_id;
    std::int64_t deposit = 0;
};

struct NodeScenario {
    NodeId id;
    bool established = false; // joins with pre-existing mutual trust at the build-up cap
    std::map<FeedId, std::vector<std::string>> feed_bindings; // feed -> bound source subset
    std::vector<RegistrationSpec> registrations;
    std::map<ChainId, std::int64_t> balances;
};

struct NebulaScenario {
    NebulaId id;
    ChainId chain_id;
    FeedId feed_id;
    NebulaParams params;
    ScheduleSpec schedule;
    std::vector<NodeId> candidates; // nodes that apply for the oracle set
    NodeId creator;                 // pays the creation fee
};

struct SubscriptionAction {
    std::uint64_t tick = 0;
    std::int64_t amount = 0;
};

struct SubscriptionScenario {
    std::string contract_id;
    NebulaId nebula_id;
    std::string method;
    PayMode mode = PayMode::Deposit;
    ContractKind kind = ContractKind::Data;
    std::int64_t balance = 0;         // funded account balance at genesis
    std::int64_t initial_deposit = 0; // moved into the nebula at genesis (deposit mode)
    std::vector<SubscriptionAction> topups;
    std::vector<std::uint64_t> reactivations;
};

struct SybilWave {
    std::uint64_t tick = 0;
    std::size_t count = 0;
    ChainId chain_id;
    std::int64_t deposit = 0;
};

struct ManualScoreAction {
    std::uint64_t tick = 0;
    NodeId rater;
    NodeId ratee;
    double value = 0.0;
};

struct PolicyParams {
    EigenTrustParams eigentrust;
    double build_up_step = 1.0;
    double build_up_cap = 10.0;
    double divergence_tolerance = 0.05;
    std::size_t consul_count = 5;
    std::uint64_t epoch_ticks = 10;
    std::uint64_t distribution_period = 7;
    std::uint64_t round_timeout = 3;
};

// Everything a run needs; a scenario plus the build fully determines the
// report bytes.
struct Scenario {
    std::uint64_t seed = 0;
    std::uint64_t ticks = 0;
    std::vector<ChainConfig> chains;
    std::vector<NodeScenario> nodes;
    std::map<FeedId, FeedSpec> feeds;
    SourceBook sources;
    std::vector<NebulaScenario> nebulae;
    std::vector<SubscriptionScenario> subscriptions;
    std::map<NodeId, NodeFaultPlan> node_faults;
    std::optional<SybilWave> sybil;
    std::vector<ManualScoreAction> manual_scores;
    PolicyParams policy;
};

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> violations);

    std::vector<std::string> violations;
};

// Parses and validates; throws ScenarioError carrying every violation found
// (unknown keys, unresolved references, K > N, and so on).
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

} // namespace gravity
