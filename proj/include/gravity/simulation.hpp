// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gravity/economy.hpp"
#include "gravity/ledger.hpp"
#include "gravity/node.hpp"
#include "gravity/scenario.hpp"

namespace gravity {

struct RoundOutcome {
    NebulaId nebula_id;
    FeedId feed_id;
    std::int64_t round = 0;
    std::uint64_t start_tick = 0;
    bool accepted = false;
    std::optional<std::uint64_t> accepted_height;
    std::optional<NodeId> leader;
    std::size_t valid_signers = 0;
    std::optional<Value> agg_value;
    std::size_t deliveries_ok = 0;
    std::size_t deliveries_failed = 0;
    std::string status; // delivered | partial | failed | incomplete
    std::string fail_reason;
};

struct ConsulRotationEvent {
    std::uint64_t tick = 0;
    std::vector<NodeId> members;
    bool kept_previous = false;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::uint64_t ticks = 0;
    std::string hash_algo;
    std::string signature_scheme;
    std::vector<RoundOutcome> rounds;
    std::map<NodeId, double> final_scores;
    std::string ledger_head;
    std::uint64_t ledger_blocks = 0;
    std::map<ChainId, bool> conservation_ok;
    std::map<ChainId, std::uint64_t> conservation_first_violation;
    std::vector<DistributionReport> distributions;
    std::vector<FraudEvent> fraud_events;
    std::vector<ConsulRotationEvent> consul_rotations;
    std::map<NodeId, std::vector<std::pair<std::uint64_t, double>>> score_trajectory;
    std::map<NodeId, std::int64_t> payouts_total;
    std::vector<std::string> warnings;
    std::size_t ledger_no_quorum_ticks = 0;
    std::size_t oracle_exclusions = 0;

    std::size_t rounds_scheduled = 0;
    std::size_t rounds_delivered = 0;
    std::size_t rounds_incomplete = 0; // still in flight when the run ended
    double delivery_success_rate = 0.0;
};

std::string report_to_json(const RunReport& report);
std::string report_summary_text(const std::string& report_json);

// Deterministic single-threaded tick loop over all module states. Two runs
// of the same scenario produce byte-identical reports and ledger chains.
class Simulation {
public:
    explicit Simulation(Scenario scenario);
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    RunReport run();

    // Valid after run(); out_dir is created if missing.
    void write_outputs(const std::string& out_dir) const;

    const Ledger& ledger() const { return ledger_; }
    const std::map<ChainId, TargetChain>& chains() const { return chains_; }
    const Node* node(const NodeId& id) const;
    const ScoreMatrix& trust_matrix() const { return matrix_; }
    const RunReport& report() const { return report_; }

private:
    struct RoundKey {
        NebulaId nebula_id;
        std::int64_t round;

        bool operator<(const RoundKey& other) const {
            return std::tie(nebula_id, round) < std::tie(other.nebula_id, other.round);
        }
    };

    void setup();
    void run_tick(std::uint64_t tick);
    void inject_sybil_wave(std::uint64_t tick);
    void apply_subscription_actions(std::uint64_t tick);
    void apply_manual_scores(std::uint64_t tick);
    void handle_observation(const ObservationEvent& event, std::uint64_t tick);
    void emit_score_update(const NodeId& rater, const NodeId& ratee, double value, ScoreMode mode,
                           std::uint64_t tick);
    void run_build_up(std::uint64_t tick);
    bool finalize_ledger(std::uint64_t tick);
    void apply_finalized_scores(std::uint64_t tick);
    void recalculate_scores(std::uint64_t tick);
    void write_scores_to_chains(std::uint64_t tick);
    void rotate_and_refresh(std::uint64_t tick);
    void refresh_oracle_sets(std::uint64_t tick);
    void distribute_rewards(std::uint64_t tick);
    void check_conservation(std::uint64_t tick);
    void finish_report();
    std::optional<NodeId> first_online_consul(std::uint64_t tick) const;

    Scenario scenario_;
    Ledger ledger_;
    std::map<ChainId, TargetChain> chains_;
    std::map<NodeId, std::unique_ptr<Node>> nodes_;
    std::map<NebulaId, ChainId> nebula_chain_;
    std::map<NebulaId, std::vector<NodeId>> candidates_;
    Scheduler scheduler_;
    ScoringPolicy policy_;
    ScoreMatrix matrix_;
    std::vector<GravityScore> current_scores_;
    bool scores_dirty_ = false; // finalized updates not yet folded into scores

    std::map<RoundKey, std::pair<FeedId, std::uint64_t>> scheduled_rounds_;
    // (rater, ratee) pairs with badness observed this epoch; each rater only
    // withholds its own build-up, other raters keep their own view.
    std::set<std::pair<NodeId, NodeId>> epoch_bad_;
    std::set<std::tuple<NodeId, FeedId, std::int64_t, std::string>> fraud_seen_;
    std::map<NebulaId, std::uint64_t> last_distribution_height_;
    std::map<NodeId, std::vector<TraceEvent>> traces_;
    std::vector<NodeId> sybil_ids_;
    std::uint64_t current_tick_ = 0;
    std::optional<std::uint64_t> applied_block_;

    RunReport report_;
    bool ran_ = false;
};

} // namespace gravity
