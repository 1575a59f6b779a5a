// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gravity/chain.hpp"
#include "gravity/extractor.hpp"
#include "gravity/ledger.hpp"
#include "gravity/rng.hpp"

namespace gravity {

enum class Phase { Idle, Committed, Revealed, Aggregated, Signed, Done, Failed };

enum class FailReason {
    None,
    ExtractorError,
    InsufficientCommits,
    InsufficientReveals,
    NoQuorumDigest,
    ChainRejected,
    Timeout,
};

std::string to_string(Phase p);
std::string to_string(FailReason r);

// One node's view of one pulse round. Phases move monotonically through
// Idle -> Committed -> Revealed -> Aggregated -> Signed -> Done, or end in
// Failed; value and salt stay private until the reveal goes out.
struct PulseParticipation {
    NebulaId nebula_id;
    ChainId chain_id;
    FeedId feed_id;
    std::int64_t round = 0;
    std::uint64_t start_tick = 0;
    Phase phase = Phase::Idle;
    FailReason fail = FailReason::None;
    bool commit_withheld = false; // fault: revealed without a prior commit

    Value own_value;
    std::array<std::uint8_t, kSaltSize> salt{};
    std::vector<NodeId> expected_members; // eligible oracle-set members at round start
    std::size_t valid_reveals = 0;
    Value agg_value;
    Digest agg_digest;
    std::int64_t sign_timestamp = 0;
};

// Aggregation over the revealed multiset; every node computing over the
// same reveal set must land on the identical value. Median takes the lower
// middle element, average floors the exact mean, mode breaks ties toward
// the smallest value. Average over text values is a caller error.
Value aggregate_values(std::vector<Value> values, AggRule rule);

struct NodeFaultPlan {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> offline_ranges; // inclusive tick spans
    std::optional<std::int64_t> divergence_offset;
    bool fraud_reveal = false;
    bool unsolicited_reveal = false;

    bool is_offline(std::uint64_t tick) const;
};

struct ObservationEvent {
    NodeId rater;
    NodeId ratee;
    AutoObservation kind = AutoObservation::StableEpoch;
    std::string detail;
};

struct FraudEvent {
    std::uint64_t tick = 0;
    NodeId offender;
    FeedId feed_id;
    std::int64_t round = 0;
    std::string kind; // reveal-mismatch | reveal-without-commit | type-mismatch
};

struct TraceEvent {
    std::uint64_t tick = 0;
    NodeId node;
    FeedId feed_id;
    std::int64_t round = 0;
    std::string what;
    std::string detail;
};

struct NebulaRef {
    NebulaId nebula_id;
    ChainId chain_id;
};

struct ScheduleSpec {
    std::uint64_t period = 1;
    std::uint64_t offset = 0;
};

struct ScheduledRound {
    NebulaRef nebula;
    FeedId feed_id;
    std::int64_t round = 0;
    std::uint64_t tick = 0;
};

// Fires a task per (feed, nebula) whose period matches the tick and assigns
// consecutive round ordinals. Every node runs the same schedule, so counters
// agree across the network.
class Scheduler {
public:
    void add(NebulaRef nebula, FeedId feed_id, ScheduleSpec spec);
    std::vector<ScheduledRound> on_tick(std::uint64_t tick);

private:
    struct Entry {
        NebulaRef nebula;
        FeedId feed_id;
        ScheduleSpec spec;
        std::int64_t next_round = 1;
    };
    std::vector<Entry> entries_;
};

// Shared state the node handlers run against; owned by the simulation loop.
struct NodeEnv {
    Ledger* ledger = nullptr;
    std::map<ChainId, TargetChain>* chains = nullptr;
    const SourceBook* sources = nullptr;
    const std::map<FeedId, FeedSpec>* feeds = nullptr;
    double divergence_tolerance = 0.05;
    std::uint64_t round_timeout = 3;
    std::uint64_t tick = 0;
};

// A Gravity node: extractor bindings, per-chain keys, and the pulse state
// machine. Handlers are invoked one event at a time by the simulation loop
// and never block on other nodes.
class Node {
public:
    Node(NodeId id, KeyPair idl_key, std::map<ChainId, KeyPair> chain_keys, DeterministicRng rng,
         NodeFaultPlan faults);

    const NodeId& id() const { return id_; }
    const KeyPair& idl_key() const { return idl_key_; }
    const KeyPair* chain_key(const ChainId& chain_id) const;
    const NodeFaultPlan& faults() const { return faults_; }
    bool offline_at(std::uint64_t tick) const { return faults_.is_offline(tick); }

    // Latest binding wins; the sim validates feed existence up front.
    void bind_extractor(const FeedId& feed_id, std::vector<std::string> source_ids);
    bool has_binding(const FeedId& feed_id) const { return bindings_.count(feed_id) != 0; }
    const std::vector<std::string>* binding(const FeedId& feed_id) const;

    // Scheduler tasks filtered down to feeds this node can actually extract.
    std::vector<ScheduledRound> on_tick(const std::vector<ScheduledRound>& fired) const;

    void start_round(NodeEnv& env, const ScheduledRound& task);
    void process_rounds(NodeEnv& env);

    const std::map<std::pair<NebulaId, std::int64_t>, PulseParticipation>& participations() const {
        return participations_;
    }

    std::function<void(const ObservationEvent&)> observe;
    std::function<void(const FraudEvent&)> report_fraud;
    std::function<void(const TraceEvent&)> trace;

private:
    struct RoundView; // resolved contract pointers for one participation

    void process_round(NodeEnv& env, PulseParticipation& part);
    void try_reveal(NodeEnv& env, PulseParticipation& part, const RoundView& view);
    void try_aggregate_and_sign(NodeEnv& env, PulseParticipation& part, const RoundView& view);
    void try_finish(NodeEnv& env, PulseParticipation& part, const RoundView& view);
    void fail_round(NodeEnv& env, PulseParticipation& part, FailReason reason);
    void finish_round(NodeEnv& env, PulseParticipation& part);
    void raise_liveness_observations(NodeEnv& env, const PulseParticipation& part);
    void set_phase(NodeEnv& env, PulseParticipation& part, Phase phase, const std::string& detail);

    NodeId id_;
    KeyPair idl_key_;
    std::map<ChainId, KeyPair> chain_keys_;
    DeterministicRng rng_;
    NodeFaultPlan faults_;
    std::map<FeedId, std::vector<std::string>> bindings_;
    std::map<std::pair<NebulaId, std::int64_t>, PulseParticipation> participations_;
};

} // namespace gravity
