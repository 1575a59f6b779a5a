// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/simulation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gravity {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string padded_index(std::size_t i) {
    std::string digits = std::to_string(i);
    while (digits.size() < 3) {
        digits.insert(digits.begin(), '0');
    }
    return digits;
}

ordered_json value_to_json(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return *i;
    }
    return std::get<std::string>(v);
}

} // namespace

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)),
      policy_(scenario_.policy.build_up_step, scenario_.policy.build_up_cap) {}

Simulation::~Simulation() = default;

const Node* Simulation::node(const NodeId& id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : it->second.get();
}

void Simulation::setup() {
    report_.seed = scenario_.seed;
    report_.ticks = scenario_.ticks;
    report_.hash_algo = "sha-256";
    report_.signature_scheme = "ed25519";

    for (const auto& cfg : scenario_.chains) {
        chains_.emplace(cfg.chain_id, TargetChain(cfg));
    }

    DeterministicRng root(scenario_.seed);

    // Nodes: keys per chain and for the IDL, all derived from the scenario
    // seed, plus a private RNG stream for salts.
    std::vector<NodeId> ids;
    for (const auto& spec : scenario_.nodes) {
        ids.push_back(spec.id);
        KeyPair idl_key = keypair_from_seed(root.fork("key:idl:" + spec.id).next_block());
        std::map<ChainId, KeyPair> chain_keys;
        for (const auto& reg : spec.registrations) {
            chain_keys.emplace(
                reg.chain_id,
                keypair_from_seed(root.fork("key:" + reg.chain_id + ":" + spec.id).next_block()));
        }
        NodeFaultPlan faults;
        if (auto it = scenario_.node_faults.find(spec.id); it != scenario_.node_faults.end()) {
            faults = it->second;
        }
        auto node = std::make_unique<Node>(spec.id, std::move(idl_key), std::move(chain_keys),
                                           root.fork("rng:" + spec.id), std::move(faults));
        node->observe = [this](const ObservationEvent& ev) { handle_observation(ev, current_tick_); };
        node->report_fraud = [this](const FraudEvent& ev) {
            if (fraud_seen_.insert({ev.offender, ev.feed_id, ev.round, ev.kind}).second) {
                report_.fraud_events.push_back(ev);
            }
        };
        node->trace = [this](const TraceEvent& ev) { traces_[ev.node].push_back(ev); };
        for (const auto& [feed, sources] : spec.feed_bindings) {
            std::vector<std::string> bound = sources;
            if (bound.empty()) {
                for (const auto& ref : scenario_.feeds.at(feed).sources) {
                    bound.push_back(ref.source_id);
                }
            }
            node->bind_extractor(feed, std::move(bound));
        }
        ledger_.register_author(spec.id, node->idl_key().public_key);
        nodes_.emplace(spec.id, std::move(node));
    }

    std::sort(ids.begin(), ids.end());
    matrix_ = ScoreMatrix(ids);

    // Genesis balances and registrations at height 0.
    for (const auto& spec : scenario_.nodes) {
        for (const auto& [chain_id, amount] : spec.balances) {
            chains_.at(chain_id).transfer(kReserveAccount, spec.id, amount);
        }
        for (const auto& reg : spec.registrations) {
            TxStatus status = chains_.at(reg.chain_id)
                                  .register_node(spec.id,
                                                 nodes_.at(spec.id)->chain_key(reg.chain_id)->public_key,
                                                 reg.deposit);
            if (status != TxStatus::Ok) {
                throw std::runtime_error("setup: registration of " + spec.id + " on " +
                                         reg.chain_id + " failed: " + to_string(status));
            }
        }
    }

    // Pre-existing mutual trust between established operators.
    for (const auto& a : scenario_.nodes) {
        if (!a.established) {
            continue;
        }
        for (const auto& b : scenario_.nodes) {
            if (a.id == b.id || !b.established) {
                continue;
            }
            policy_.seed(a.id, b.id, scenario_.policy.build_up_cap);
            matrix_.set(a.id, b.id, scenario_.policy.build_up_cap);
        }
    }

    recalculate_scores(0);
    for (auto& [chain_id, chain] : chains_) {
        chain.seed_scores(current_scores_);
    }
    auto rotation = ledger_.rotate_consuls(current_scores_, scenario_.policy.consul_count);
    for (auto& [chain_id, chain] : chains_) {
        chain.seed_consuls(rotation.set.members);
    }
    report_.consul_rotations.push_back({0, rotation.set.members, rotation.kept_previous});

    // Nebulae plus initial oracle admissions, best candidates first.
    for (const auto& neb : scenario_.nebulae) {
        TargetChain& chain = chains_.at(neb.chain_id);
        TxStatus status = chain.create_nebula(neb.creator, neb.params);
        if (status != TxStatus::Ok) {
            throw std::runtime_error("setup: create_nebula " + neb.id + " failed: " +
                                     to_string(status));
        }
        nebula_chain_[neb.id] = neb.chain_id;
        candidates_[neb.id] = neb.candidates;
        scheduler_.add({neb.id, neb.chain_id}, neb.feed_id, neb.schedule);
        last_distribution_height_[neb.id] = 0;
    }
    refresh_oracle_sets(0);

    for (const auto& sub : scenario_.subscriptions) {
        TargetChain& chain = chains_.at(nebula_chain_.at(sub.nebula_id));
        chain.register_user_contract(sub.contract_id, sub.kind);
        if (sub.balance > 0) {
            chain.transfer(kReserveAccount, sub.contract_id, sub.balance);
        }
        chain.subscribe(sub.contract_id, sub.nebula_id, sub.method, sub.mode);
        if (sub.initial_deposit > 0) {
            chain.deposit_subscription(sub.contract_id, sub.nebula_id, sub.initial_deposit);
        }
    }
}

RunReport Simulation::run() {
    if (ran_) {
        throw std::logic_error("simulation already ran");
    }
    ran_ = true;
    setup();
    for (std::uint64_t tick = 1; tick <= scenario_.ticks; ++tick) {
        run_tick(tick);
    }
    finish_report();
    return report_;
}

void Simulation::run_tick(std::uint64_t tick) {
    current_tick_ = tick;
    for (auto& [chain_id, chain] : chains_) {
        chain.advance_height();
    }

    if (scenario_.sybil && scenario_.sybil->tick == tick) {
        inject_sybil_wave(tick);
    }
    apply_subscription_actions(tick);
    apply_manual_scores(tick);

    NodeEnv env;
    env.ledger = &ledger_;
    env.chains = &chains_;
    env.sources = &scenario_.sources;
    env.feeds = &scenario_.feeds;
    env.divergence_tolerance = scenario_.policy.divergence_tolerance;
    env.round_timeout = scenario_.policy.round_timeout;
    env.tick = tick;

    const std::vector<ScheduledRound> fired = scheduler_.on_tick(tick);
    for (const auto& task : fired) {
        scheduled_rounds_[{task.nebula.nebula_id, task.round}] = {task.feed_id, tick};
    }
    for (auto& [id, node] : nodes_) {
        for (const auto& task : node->on_tick(fired)) {
            node->start_round(env, task);
        }
        node->process_rounds(env);
    }

    const bool epoch_boundary = tick % scenario_.policy.epoch_ticks == 0;
    if (epoch_boundary) {
        run_build_up(tick);
    }

    finalize_ledger(tick);
    apply_finalized_scores(tick);
    if (scores_dirty_) {
        recalculate_scores(tick);
        write_scores_to_chains(tick);
        scores_dirty_ = false;
    }
    if (epoch_boundary) {
        rotate_and_refresh(tick);
    }
    if (tick % scenario_.policy.distribution_period == 0) {
        distribute_rewards(tick);
    }
    check_conservation(tick);
}

void Simulation::inject_sybil_wave(std::uint64_t /*tick*/) {
    const SybilWave& wave = *scenario_.sybil;
    TargetChain& chain = chains_.at(wave.chain_id);
    DeterministicRng root(scenario_.seed);
    for (std::size_t i = 1; i <= wave.count; ++i) {
        const NodeId id = "sybil-" + padded_index(i);
        KeyPair chain_key =
            keypair_from_seed(root.fork("key:" + wave.chain_id + ":" + id).next_block());
        KeyPair idl_key = keypair_from_seed(root.fork("key:idl:" + id).next_block());
        chain.transfer(kReserveAccount, id, wave.deposit + chain.config().registration_fee);
        chain.register_node(id, chain_key.public_key, wave.deposit);
        ledger_.register_author(id, idl_key.public_key);
        if (!matrix_.contains(id)) {
            matrix_.add_node(id);
        }
        // Registration is open: the wave applies to every nebula and is only
        // held back by the score threshold.
        for (auto& [nebula_id, candidates] : candidates_) {
            candidates.push_back(id);
        }
        sybil_ids_.push_back(id);
    }
    scores_dirty_ = true; // the trust network grew; recompute over the new n
}

void Simulation::apply_subscription_actions(std::uint64_t tick) {
    for (const auto& sub : scenario_.subscriptions) {
        TargetChain& chain = chains_.at(nebula_chain_.at(sub.nebula_id));
        for (const auto& action : sub.topups) {
            if (action.tick == tick) {
                chain.deposit_subscription(sub.contract_id, sub.nebula_id, action.amount);
            }
        }
        for (std::uint64_t at : sub.reactivations) {
            if (at == tick) {
                chain.reactivate(sub.contract_id, sub.nebula_id);
            }
        }
    }
}

void Simulation::apply_manual_scores(std::uint64_t tick) {
    for (const auto& action : scenario_.manual_scores) {
        if (action.tick != tick || action.rater == action.ratee) {
            continue;
        }
        const double value = policy_.on_manual(action.rater, action.ratee, action.value);
        emit_score_update(action.rater, action.ratee, value, ScoreMode::Manual, tick);
    }
}

void Simulation::handle_observation(const ObservationEvent& event, std::uint64_t tick) {
    if (event.rater == event.ratee) {
        return;
    }
    if (event.kind != AutoObservation::StableEpoch) {
        epoch_bad_.insert({event.rater, event.ratee});
    }
    if (auto changed = policy_.on_automatic(event.rater, event.ratee, event.kind)) {
        emit_score_update(event.rater, event.ratee, *changed, ScoreMode::Automatic, tick);
    }
}

void Simulation::emit_score_update(const NodeId& rater, const NodeId& ratee, double value,
                                   ScoreMode mode, std::uint64_t tick) {
    auto it = nodes_.find(rater);
    if (it == nodes_.end()) {
        return;
    }
    ScoreUpdatePayload payload;
    payload.ratee = ratee;
    payload.value = value;
    payload.mode = mode;
    payload.tick = static_cast<std::int64_t>(tick);
    ledger_.submit(make_message(MessageKind::ScoreUpdate, it->second->idl_key(),
                                encode_score_update(payload)));
}

void Simulation::run_build_up(std::uint64_t tick) {
    const std::uint64_t epoch = scenario_.policy.epoch_ticks;
    const std::uint64_t window_start = tick >= epoch ? tick - epoch + 1 : 1;

    auto active_somewhere = [this](const NodeId& id) {
        for (const auto& [chain_id, chain] : chains_) {
            if (chain.is_active_node(id)) {
                return true;
            }
        }
        return false;
    };
    auto offline_in_window = [&](const Node& node) {
        for (std::uint64_t t = window_start; t <= tick; ++t) {
            if (node.offline_at(t)) {
                return true;
            }
        }
        return false;
    };

    for (const auto& [rater_id, rater] : nodes_) {
        if (rater->offline_at(tick) || !active_somewhere(rater_id)) {
            continue;
        }
        for (const auto& [ratee_id, ratee] : nodes_) {
            if (ratee_id == rater_id) {
                continue;
            }
            // A stable epoch requires an operating node: live for the whole
            // epoch, still registered, and with no badness observed.
            if (!active_somewhere(ratee_id) || offline_in_window(*ratee) ||
                epoch_bad_.count({rater_id, ratee_id})) {
                continue;
            }
            if (auto changed =
                    policy_.on_automatic(rater_id, ratee_id, AutoObservation::StableEpoch)) {
                emit_score_update(rater_id, ratee_id, *changed, ScoreMode::Automatic, tick);
            }
        }
    }
}

bool Simulation::finalize_ledger(std::uint64_t tick) {
    auto signer = [this, tick](const NodeId& consul, const Digest& digest) -> std::optional<Proof> {
        auto it = nodes_.find(consul);
        if (it == nodes_.end() || it->second->offline_at(tick)) {
            return std::nullopt;
        }
        return sign_message(it->second->idl_key(), digest.bytes);
    };
    auto outcome = ledger_.finalize_block(tick, signer);
    if (!outcome.finalized) {
        ++report_.ledger_no_quorum_ticks;
    }
    return outcome.finalized;
}

void Simulation::apply_finalized_scores(std::uint64_t /*tick*/) {
    if (ledger_.blocks().empty()) {
        return;
    }
    const LedgerBlock& block = ledger_.blocks().back();
    // Only the block finalized this very tick is new; earlier ones were
    // already applied when they landed.
    if (applied_block_ && *applied_block_ >= block.height) {
        return;
    }
    applied_block_ = block.height;
    for (const auto& msg : block.messages) {
        if (msg.kind != MessageKind::ScoreUpdate) {
            continue;
        }
        auto rater = ledger_.author_of(msg.author);
        if (!rater || !matrix_.contains(*rater)) {
            continue;
        }
        ScoreUpdatePayload payload = decode_score_update(msg.payload);
        if (!matrix_.contains(payload.ratee) || *rater == payload.ratee) {
            continue;
        }
        matrix_.set(*rater, payload.ratee, payload.value);
        scores_dirty_ = true;
    }
}

void Simulation::recalculate_scores(std::uint64_t tick) {
    const auto pre_trust = uniform_pre_trust(matrix_.size());
    const auto c = normalize_matrix(matrix_, pre_trust);
    try {
        TrustVector trust = eigentrust(c, matrix_.size(), scenario_.policy.eigentrust, pre_trust);
        current_scores_ = to_gravity_scores(trust, matrix_.ids());
    } catch (const NonConvergenceError& e) {
        report_.warnings.push_back("eigentrust did not converge at tick " + std::to_string(tick) +
                                   " (delta " + std::to_string(e.delta) + "); keeping last scores");
    }
}

std::optional<NodeId> Simulation::first_online_consul(std::uint64_t tick) const {
    for (const NodeId& consul : ledger_.consuls().members) {
        auto it = nodes_.find(consul);
        if (it != nodes_.end() && !it->second->offline_at(tick)) {
            return consul;
        }
    }
    return std::nullopt;
}

void Simulation::write_scores_to_chains(std::uint64_t tick) {
    auto writer = first_online_consul(tick);
    if (!writer) {
        report_.warnings.push_back("no online consul to write scores at tick " +
                                   std::to_string(tick));
        return;
    }
    for (auto& [chain_id, chain] : chains_) {
        TxStatus status = chain.write_scores(*writer, current_scores_);
        if (status != TxStatus::Ok) {
            report_.warnings.push_back("score write on " + chain_id + " at tick " +
                                       std::to_string(tick) + " failed: " + to_string(status));
        }
    }
}

void Simulation::rotate_and_refresh(std::uint64_t tick) {
    const ConsulSet before = ledger_.consuls();
    auto writer = first_online_consul(tick);
    auto rotation = ledger_.rotate_consuls(current_scores_, scenario_.policy.consul_count);
    if (rotation.kept_previous) {
        report_.warnings.push_back("consul rotation kept the previous set at tick " +
                                   std::to_string(tick));
    }
    if (rotation.set.members != before.members) {
        if (writer) {
            for (auto& [chain_id, chain] : chains_) {
                chain.update_consuls(*writer, rotation.set.members);
            }
        } else {
            report_.warnings.push_back("consul rotation at tick " + std::to_string(tick) +
                                       " could not be written on-chain (no online consul)");
        }
    }
    report_.consul_rotations.push_back({tick, rotation.set.members, rotation.kept_previous});

    refresh_oracle_sets(tick);

    for (const auto& score : current_scores_) {
        report_.score_trajectory[score.node_id].push_back({tick, score.score});
    }
    epoch_bad_.clear();
}

void Simulation::refresh_oracle_sets(std::uint64_t /*tick*/) {
    for (const auto& [nebula_id, chain_id] : nebula_chain_) {
        TargetChain& chain = chains_.at(chain_id);
        NebulaContract* neb = chain.nebula(nebula_id);
        if (neb == nullptr) {
            continue;
        }
        // Drop members that fell below the admission threshold.
        std::vector<NodeId> to_remove;
        for (const auto& entry : neb->oracle_set) {
            const double score = chain.registered_score(entry.node_id).value_or(0.0);
            if (!chain.is_active_node(entry.node_id) || score < neb->params.min_score) {
                to_remove.push_back(entry.node_id);
            }
        }
        for (const NodeId& id : to_remove) {
            chain.remove_oracle(nebula_id, id);
            ++report_.oracle_exclusions;
        }
        // Fill free slots from the candidate list, best scores first.
        std::vector<NodeId> queue = candidates_[nebula_id];
        std::sort(queue.begin(), queue.end(), [&](const NodeId& a, const NodeId& b) {
            const double sa = chain.registered_score(a).value_or(0.0);
            const double sb = chain.registered_score(b).value_or(0.0);
            if (sa != sb) {
                return sa > sb;
            }
            return a < b;
        });
        for (const NodeId& id : queue) {
            if (neb->oracle_set.size() >= neb->params.capacity) {
                break;
            }
            if (neb->is_member(id)) {
                continue;
            }
            chain.admit_oracle(nebula_id, id);
        }
    }
}

void Simulation::distribute_rewards(std::uint64_t tick) {
    for (const auto& [nebula_id, chain_id] : nebula_chain_) {
        TargetChain& chain = chains_.at(chain_id);
        NebulaContract* neb = chain.nebula(nebula_id);
        if (neb == nullptr) {
            continue;
        }
        const std::uint64_t from = last_distribution_height_[nebula_id];
        last_distribution_height_[nebula_id] = tick;
        const PeriodActivity activity = collect_period_activity(*neb, from, tick);
        const std::int64_t pot = neb->undistributed;
        const auto period = static_cast<std::int64_t>(tick / scenario_.policy.distribution_period);

        std::set<NodeId> node_set;
        for (const auto& entry : neb->oracle_set) {
            node_set.insert(entry.node_id);
        }
        for (const auto& [node_id, count] : activity.signature_counts) {
            node_set.insert(node_id);
        }
        const std::vector<NodeId> nodes(node_set.begin(), node_set.end());

        DistributionReport report;
        if (activity.accepted_pulses == 0) {
            report.nebula_id = nebula_id;
            report.period = period;
            report.pot = pot;
            report.remainder = pot;
            report.skipped = true;
        } else {
            const auto impacts = compute_impacts(nodes, activity, [&](const NodeId& id) {
                return chain.registered_score(id).value_or(0.0);
            });
            report = distribute(nebula_id, period, pot, impacts);
            for (const auto& payout : report.payouts) {
                if (payout.amount > 0) {
                    chain.credit_withdrawable(nebula_id, payout.node_id, payout.amount);
                    report_.payouts_total[payout.node_id] += payout.amount;
                }
            }
        }
        report_.distributions.push_back(std::move(report));
    }
}

void Simulation::check_conservation(std::uint64_t tick) {
    for (const auto& [chain_id, chain] : chains_) {
        if (!chain.conserved() && !report_.conservation_first_violation.count(chain_id)) {
            report_.conservation_first_violation[chain_id] = tick;
        }
    }
}

void Simulation::finish_report() {
    for (const auto& [key, info] : scheduled_rounds_) {
        const auto& [feed_id, start_tick] = info;
        RoundOutcome outcome;
        outcome.nebula_id = key.nebula_id;
        outcome.feed_id = feed_id;
        outcome.round = key.round;
        outcome.start_tick = start_tick;

        const TargetChain& chain = chains_.at(nebula_chain_.at(key.nebula_id));
        const NebulaContract* neb = chain.nebula(key.nebula_id);
        if (neb != nullptr) {
            auto pulse = neb->pulse_log.find(key.round);
            if (pulse != neb->pulse_log.end()) {
                outcome.accepted = true;
                outcome.accepted_height = pulse->second.height;
                outcome.leader = pulse->second.leader;
                auto signers = neb->pulse_signers.find(key.round);
                outcome.valid_signers = signers == neb->pulse_signers.end()
                                            ? 0
                                            : signers->second.size();
                for (const auto& [node_id, node] : nodes_) {
                    auto part = node->participations().find({key.nebula_id, key.round});
                    if (part != node->participations().end() &&
                        part->second.agg_digest == pulse->second.agg_digest &&
                        (part->second.phase == Phase::Signed || part->second.phase == Phase::Done ||
                         part->second.phase == Phase::Aggregated)) {
                        outcome.agg_value = part->second.agg_value;
                        break;
                    }
                }
            }
        }
        const std::string prefix = key.nebula_id + "->";
        for (const auto& tx : chain.tx_log()) {
            if (tx.kind == "deliver" && tx.amount == key.round &&
                tx.parties.rfind(prefix, 0) == 0) {
                if (tx.result == "ok") {
                    ++outcome.deliveries_ok;
                } else {
                    ++outcome.deliveries_failed;
                }
            }
        }
        if (!outcome.accepted) {
            std::map<FailReason, std::size_t> reasons;
            for (const auto& [node_id, node] : nodes_) {
                auto part = node->participations().find({key.nebula_id, key.round});
                if (part != node->participations().end() && part->second.phase == Phase::Failed) {
                    ++reasons[part->second.fail];
                }
            }
            const std::uint64_t deadline =
                start_tick + scenario_.policy.round_timeout + 3;
            if (reasons.empty() && deadline > scenario_.ticks) {
                // The run ended with the round still inside its deadline.
                outcome.status = "incomplete";
            } else if (reasons.empty()) {
                outcome.status = "failed";
                outcome.fail_reason = "not-started";
            } else {
                outcome.status = "failed";
                auto best = reasons.begin();
                for (auto it = reasons.begin(); it != reasons.end(); ++it) {
                    if (it->second > best->second) {
                        best = it;
                    }
                }
                outcome.fail_reason = to_string(best->first);
            }
        } else {
            outcome.status = outcome.deliveries_failed == 0 ? "delivered" : "partial";
        }
        report_.rounds.push_back(std::move(outcome));
    }

    for (const auto& score : current_scores_) {
        report_.final_scores[score.node_id] = score.score;
    }
    report_.ledger_head = ledger_.head_digest().hex();
    report_.ledger_blocks = ledger_.blocks().size();
    for (const auto& [chain_id, chain] : chains_) {
        report_.conservation_ok[chain_id] = !report_.conservation_first_violation.count(chain_id);
    }
    report_.rounds_scheduled = report_.rounds.size();
    report_.rounds_delivered = 0;
    report_.rounds_incomplete = 0;
    for (const auto& r : report_.rounds) {
        if (r.status == "delivered") {
            ++report_.rounds_delivered;
        } else if (r.status == "incomplete") {
            ++report_.rounds_incomplete;
        }
    }
    const std::size_t completed = report_.rounds_scheduled - report_.rounds_incomplete;
    report_.delivery_success_rate =
        completed == 0 ? 0.0
                       : static_cast<double>(report_.rounds_delivered) /
                             static_cast<double>(completed);
}

void Simulation::write_outputs(const std::string& out_dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
        out << report_to_json(report_);
    }
    {
        std::ofstream out(fs::path(out_dir) / "ledger.log", std::ios::binary);
        ledger_.dump(out);
    }
    for (const auto& [chain_id, chain] : chains_) {
        std::ofstream out(fs::path(out_dir) / ("txs_" + chain_id + ".log"), std::ios::binary);
        chain.dump_txs(out);
    }
    for (const auto& [node_id, events] : traces_) {
        std::ofstream out(fs::path(out_dir) / ("trace_" + node_id + ".log"), std::ios::binary);
        for (const auto& ev : events) {
            out << ev.tick << ' ' << ev.node << ' ' << ev.feed_id << ' ' << ev.round << ' '
                << ev.what;
            if (!ev.detail.empty()) {
                out << ' ' << ev.detail;
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "scores.matrix", std::ios::binary);
        out << matrix_.to_table();
    }
}

std::string report_to_json(const RunReport& report) {
    ordered_json j;
    j["seed"] = report.seed;
    j["ticks"] = report.ticks;
    j["hash_algo"] = report.hash_algo;
    j["signature_scheme"] = report.signature_scheme;
    j["metrics"] = {
        {"rounds_scheduled", report.rounds_scheduled},
        {"rounds_delivered", report.rounds_delivered},
        {"rounds_incomplete", report.rounds_incomplete},
        {"delivery_success_rate", report.delivery_success_rate},
        {"fraud_events", report.fraud_events.size()},
        {"oracle_exclusions", report.oracle_exclusions},
        {"ledger_no_quorum_ticks", report.ledger_no_quorum_ticks},
    };
    j["ledger"] = {{"head", report.ledger_head}, {"blocks", report.ledger_blocks}};

    ordered_json rounds = ordered_json::array();
    for (const auto& r : report.rounds) {
        ordered_json jr;
        jr["nebula"] = r.nebula_id;
        jr["feed"] = r.feed_id;
        jr["round"] = r.round;
        jr["start_tick"] = r.start_tick;
        jr["status"] = r.status;
        if (r.accepted) {
            jr["height"] = *r.accepted_height;
            jr["leader"] = *r.leader;
            jr["valid_signers"] = r.valid_signers;
            if (r.agg_value) {
                jr["value"] = value_to_json(*r.agg_value);
            }
            jr["deliveries_ok"] = r.deliveries_ok;
            jr["deliveries_failed"] = r.deliveries_failed;
        } else if (r.status == "failed") {
            jr["fail_reason"] = r.fail_reason;
        }
        rounds.push_back(std::move(jr));
    }
    j["rounds"] = std::move(rounds);

    ordered_json scores = ordered_json::object();
    for (const auto& [node, score] : report.final_scores) {
        scores[node] = score;
    }
    j["final_scores"] = std::move(scores);

    ordered_json conservation = ordered_json::object();
    for (const auto& [chain, ok] : report.conservation_ok) {
        if (ok) {
            conservation[chain] = "ok";
        } else {
            conservation[chain] =
                "violated@" + std::to_string(report.conservation_first_violation.at(chain));
        }
    }
    j["conservation"] = std::move(conservation);

    ordered_json dists = ordered_json::array();
    for (const auto& d : report.distributions) {
        ordered_json jd;
        jd["nebula"] = d.nebula_id;
        jd["period"] = d.period;
        jd["pot"] = d.pot;
        jd["skipped"] = d.skipped;
        jd["remainder"] = d.remainder;
        ordered_json payouts = ordered_json::array();
        for (const auto& p : d.payouts) {
            payouts.push_back({{"node", p.node_id}, {"share", p.share}, {"amount", p.amount}});
        }
        jd["payouts"] = std::move(payouts);
        dists.push_back(std::move(jd));
    }
    j["distributions"] = std::move(dists);

    ordered_json frauds = ordered_json::array();
    for (const auto& f : report.fraud_events) {
        frauds.push_back({{"tick", f.tick},
                          {"offender", f.offender},
                          {"feed", f.feed_id},
                          {"round", f.round},
                          {"kind", f.kind}});
    }
    j["fraud_events"] = std::move(frauds);

    ordered_json rotations = ordered_json::array();
    for (const auto& r : report.consul_rotations) {
        rotations.push_back(
            {{"tick", r.tick}, {"members", r.members}, {"kept_previous", r.kept_previous}});
    }
    j["consul_rotations"] = std::move(rotations);

    ordered_json trajectory = ordered_json::object();
    for (const auto& [node, samples] : report.score_trajectory) {
        ordered_json arr = ordered_json::array();
        for (const auto& [tick, score] : samples) {
            arr.push_back({{"tick", tick}, {"score", score}});
        }
        trajectory[node] = std::move(arr);
    }
    j["score_trajectory"] = std::move(trajectory);

    ordered_json payouts = ordered_json::object();
    for (const auto& [node, total] : report.payouts_total) {
        payouts[node] = total;
    }
    j["payouts_total"] = std::move(payouts);

    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

std::string report_summary_text(const std::string& report_json) {
    const auto j = nlohmann::json::parse(report_json);
    std::ostringstream out;
    out << "run: seed=" << j["seed"] << " ticks=" << j["ticks"] << " hash=" << j["hash_algo"]
        << " signatures=" << j["signature_scheme"] << "\n";
    const auto& m = j["metrics"];
    out << "rounds: " << m["rounds_delivered"] << "/" << m["rounds_scheduled"]
        << " delivered (success rate " << m["delivery_success_rate"] << ")\n";
    out << "fraud events: " << m["fraud_events"] << ", oracle exclusions: "
        << m["oracle_exclusions"] << ", no-quorum ticks: " << m["ledger_no_quorum_ticks"] << "\n";
    out << "ledger: " << j["ledger"]["blocks"] << " blocks, head " << j["ledger"]["head"] << "\n";
    out << "conservation:";
    for (auto it = j["conservation"].begin(); it != j["conservation"].end(); ++it) {
        out << ' ' << it.key() << '=' << it.value().get<std::string>();
    }
    out << "\nfinal scores:";
    for (auto it = j["final_scores"].begin(); it != j["final_scores"].end(); ++it) {
        out << ' ' << it.key() << '=' << it.value();
    }
    out << "\npayouts:";
    for (auto it = j["payouts_total"].begin(); it != j["payouts_total"].end(); ++it) {
        out << ' ' << it.key() << '=' << it.value();
    }
    out << '\n';
    if (!j["warnings"].empty()) {
        out << "warnings:\n";
        for (const auto& w : j["warnings"]) {
            out << "  - " << w.get<std::string>() << '\n';
        }
    }
    return out.str();
}

} // namespace gravity
