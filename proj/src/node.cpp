// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/node.hpp"

#include <algorithm>
#include <cmath>

#include "gravity/canonical.hpp"

namespace gravity {

std::string to_string(Phase p) {
    switch (p) {
    case Phase::Idle: return "idle";
    case Phase::Committed: return "committed";
    case Phase::Revealed: return "revealed";
    case Phase::Aggregated: return "aggregated";
    case Phase::Signed: return "signed";
    case Phase::Done: return "done";
    case Phase::Failed: return "failed";
    }
    return "?";
}

std::string to_string(FailReason r) {
    switch (r) {
    case FailReason::None: return "none";
    case FailReason::ExtractorError: return "extractor-error";
    case FailReason::InsufficientCommits: return "insufficient-commits";
    case FailReason::InsufficientReveals: return "insufficient-reveals";
    case FailReason::NoQuorumDigest: return "no-quorum-digest";
    case FailReason::ChainRejected: return "chain-rejected";
    case FailReason::Timeout: return "timeout";
    }
    return "?";
}

Value aggregate_values(std::vector<Value> values, AggRule rule) {
    if (values.empty()) {
        throw std::invalid_argument("nothing to aggregate");
    }
    switch (rule) {
    case AggRule::Median: {
        std::sort(values.begin(), values.end());
        return values[(values.size() - 1) / 2];
    }
    case AggRule::Average: {
        __int128 sum = 0;
        for (const auto& v : values) {
            const auto* i = std::get_if<std::int64_t>(&v);
            if (i == nullptr) {
                throw std::invalid_argument("average is undefined over text values");
            }
            sum += *i;
        }
        const auto count = static_cast<__int128>(values.size());
        __int128 q = sum / count;
        if (sum % count != 0 && sum < 0) {
            --q;
        }
        return Value{static_cast<std::int64_t>(q)};
    }
    case AggRule::Mode: {
        std::sort(values.begin(), values.end());
        std::size_t best_count = 0;
        Value best = values.front();
        std::size_t i = 0;
        while (i < values.size()) {
            std::size_t j = i;
            while (j < values.size() && values[j] == values[i]) {
                ++j;
            }
            if (j - i > best_count) {
                best_count = j - i;
                best = values[i];
            }
            i = j;
        }
        return best;
    }
    }
    throw std::logic_error("unreachable aggregation rule");
}

bool NodeFaultPlan::is_offline(std::uint64_t tick) const {
    return std::any_of(offline_ranges.begin(), offline_ranges.end(),
                       [&](const auto& r) { return tick >= r.first && tick <= r.second; });
}

void Scheduler::add(NebulaRef nebula, FeedId feed_id, ScheduleSpec spec) {
    if (spec.period == 0) {
        throw std::invalid_argument("schedule period must be positive");
    }
    entries_.push_back({std::move(nebula), std::move(feed_id), spec, 1});
}

std::vector<ScheduledRound> Scheduler::on_tick(std::uint64_t tick) {
    std::vector<ScheduledRound> fired;
    for (Entry& entry : entries_) {
        if (tick % entry.spec.period == entry.spec.offset % entry.spec.period) {
            fired.push_back({entry.nebula, entry.feed_id, entry.next_round++, tick});
        }
    }
    return fired;
}

Node::Node(NodeId id, KeyPair idl_key, std::map<ChainId, KeyPair> chain_keys, DeterministicRng rng,
           NodeFaultPlan faults)
    : id_(std::move(id)),
      idl_key_(std::move(idl_key)),
      chain_keys_(std::move(chain_keys)),
      rng_(rng),
      faults_(std::move(faults)) {}

const KeyPair* Node::chain_key(const ChainId& chain_id) const {
    auto it = chain_keys_.find(chain_id);
    return it == chain_keys_.end() ? nullptr : &it->second;
}

void Node::bind_extractor(const FeedId& feed_id, std::vector<std::string> source_ids) {
    bindings_[feed_id] = std::move(source_ids);
}

const std::vector<std::string>* Node::binding(const FeedId& feed_id) const {
    auto it = bindings_.find(feed_id);
    return it == bindings_.end() ? nullptr : &it->second;
}

std::vector<ScheduledRound> Node::on_tick(const std::vector<ScheduledRound>& fired) const {
    std::vector<ScheduledRound> mine;
    for (const auto& task : fired) {
        if (has_binding(task.feed_id)) {
            mine.push_back(task);
        }
    }
    return mine;
}

struct Node::RoundView {
    TargetChain* chain = nullptr;
    NebulaContract* nebula = nullptr;
    const FeedSpec* feed = nullptr;

    bool ok() const { return chain && nebula && feed; }
};

namespace {

// Applies a fault offset to integer pipelines; text values pass through.
Value biased(const Value& v, const std::optional<std::int64_t>& offset) {
    if (!offset) {
        return v;
    }
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return Value{*i + *offset};
    }
    return v;
}

Value falsified(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return Value{*i + 1};
    }
    return Value{std::get<std::string>(v) + "!"};
}

bool value_type_matches(const Value& v, OutputType type) {
    return (type == OutputType::Integer) == std::holds_alternative<std::int64_t>(v);
}

} // namespace

void Node::start_round(NodeEnv& env, const ScheduledRound& task) {
    if (offline_at(env.tick)) {
        return;
    }
    const auto key = std::make_pair(task.nebula.nebula_id, task.round);
    if (participations_.count(key)) {
        return;
    }
    auto chain_it = env.chains->find(task.nebula.chain_id);
    if (chain_it == env.chains->end()) {
        return;
    }
    TargetChain& chain = chain_it->second;
    NebulaContract* nebula = chain.nebula(task.nebula.nebula_id);
    auto feed_it = env.feeds->find(task.feed_id);
    if (nebula == nullptr || feed_it == env.feeds->end()) {
        return;
    }
    const KeyPair* signing_key = chain_key(task.nebula.chain_id);

    // Provider selection: oracle-set membership plus the registered-score
    // threshold, evaluated against the chain's current register.
    if (signing_key == nullptr || !chain.is_active_node(id_) || !nebula->is_member(id_) ||
        chain.registered_score(id_).value_or(0.0) < nebula->params.min_score) {
        return;
    }

    PulseParticipation part;
    part.nebula_id = task.nebula.nebula_id;
    part.chain_id = task.nebula.chain_id;
    part.feed_id = task.feed_id;
    part.round = task.round;
    part.start_tick = task.tick;
    for (const OracleEntry& entry : nebula->oracle_set) {
        if (chain.is_active_node(entry.node_id) &&
            chain.registered_score(entry.node_id).value_or(0.0) >= nebula->params.min_score) {
            part.expected_members.push_back(entry.node_id);
        }
    }

    const auto* bound = binding(task.feed_id);
    ExtractResult extracted = extract(feed_it->second, *env.sources, *bound, task.tick);
    if (!extracted.ok) {
        part.phase = Phase::Failed;
        part.fail = FailReason::ExtractorError;
        if (trace) {
            trace({env.tick, id_, task.feed_id, task.round, "failed", extracted.error});
        }
        participations_.emplace(key, std::move(part));
        return;
    }
    part.own_value = biased(extracted.point.value, faults_.divergence_offset);
    part.salt = rng_.next_block();

    if (faults_.unsolicited_reveal) {
        part.commit_withheld = true;
        part.phase = Phase::Committed;
        if (trace) {
            trace({env.tick, id_, task.feed_id, task.round, "commit-withheld", ""});
        }
        participations_.emplace(key, std::move(part));
        return;
    }

    Commitment commitment =
        make_commitment(task.feed_id, task.round, part.own_value, part.salt, idl_key_.public_key);
    env.ledger->submit(make_message(MessageKind::Commit, idl_key_, encode_commitment(commitment)));
    part.phase = Phase::Committed;
    if (trace) {
        trace({env.tick, id_, task.feed_id, task.round, "committed",
               "value=" + value_to_string(part.own_value)});
    }
    participations_.emplace(key, std::move(part));
}

void Node::process_rounds(NodeEnv& env) {
    if (offline_at(env.tick)) {
        return;
    }
    for (auto& [key, part] : participations_) {
        if (part.phase != Phase::Done && part.phase != Phase::Failed) {
            process_round(env, part);
        }
    }
}

void Node::process_round(NodeEnv& env, PulseParticipation& part) {
    RoundView view;
    auto chain_it = env.chains->find(part.chain_id);
    if (chain_it != env.chains->end()) {
        view.chain = &chain_it->second;
        view.nebula = chain_it->second.nebula(part.nebula_id);
    }
    auto feed_it = env.feeds->find(part.feed_id);
    view.feed = feed_it == env.feeds->end() ? nullptr : &feed_it->second;
    if (!view.ok()) {
        fail_round(env, part, FailReason::ChainRejected);
        return;
    }
    switch (part.phase) {
    case Phase::Committed:
        try_reveal(env, part, view);
        break;
    case Phase::Revealed:
        try_aggregate_and_sign(env, part, view);
        break;
    case Phase::Aggregated:
    case Phase::Signed:
        try_finish(env, part, view);
        break;
    default:
        break;
    }
}

void Node::try_reveal(NodeEnv& env, PulseParticipation& part, const RoundView& view) {
    const std::size_t required = view.nebula->params.required;
    std::set<NodeId> committed;
    for (const auto& msg : env.ledger->read_messages(MessageKind::Commit, part.feed_id, part.round)) {
        auto author = env.ledger->author_of(msg.author);
        if (author && view.nebula->is_member(*author)) {
            committed.insert(*author);
        }
    }
    if (committed.size() >= required) {
        Reveal reveal;
        reveal.value = faults_.fraud_reveal ? falsified(part.own_value) : part.own_value;
        reveal.salt = part.salt;
        reveal.feed_id = part.feed_id;
        reveal.round = part.round;
        reveal.author = idl_key_.public_key;
        env.ledger->submit(make_message(MessageKind::Reveal, idl_key_, encode_reveal(reveal)));
        set_phase(env, part, Phase::Revealed, "value=" + value_to_string(reveal.value));
        return;
    }
    if (env.tick - part.start_tick >= env.round_timeout) {
        fail_round(env, part, FailReason::InsufficientCommits);
    }
}

void Node::try_aggregate_and_sign(NodeEnv& env, PulseParticipation& part, const RoundView& view) {
    const std::size_t required = view.nebula->params.required;

    std::map<NodeId, Commitment> commits;
    for (const auto& msg : env.ledger->read_messages(MessageKind::Commit, part.feed_id, part.round)) {
        auto author = env.ledger->author_of(msg.author);
        if (!author || !view.nebula->is_member(*author)) {
            continue;
        }
        commits.emplace(*author, decode_commitment(msg.payload));
    }

    std::vector<std::pair<NodeId, Value>> valid;
    std::set<NodeId> seen;
    for (const auto& msg : env.ledger->read_messages(MessageKind::Reveal, part.feed_id, part.round)) {
        auto author = env.ledger->author_of(msg.author);
        if (!author || !view.nebula->is_member(*author) || seen.count(*author)) {
            continue;
        }
        seen.insert(*author);
        Reveal reveal = decode_reveal(msg.payload);

        auto commit_it = commits.find(*author);
        if (commit_it == commits.end()) {
            // Copying attack: a reveal with no prior finalized commit never
            // enters the aggregate.
            if (report_fraud) {
                report_fraud({env.tick, *author, part.feed_id, part.round, "reveal-without-commit"});
            }
            if (observe && *author != id_) {
                observe({id_, *author, AutoObservation::Fraud, "reveal-without-commit"});
            }
            continue;
        }
        if (!value_type_matches(reveal.value, view.feed->output)) {
            if (report_fraud) {
                report_fraud({env.tick, *author, part.feed_id, part.round, "type-mismatch"});
            }
            if (observe && *author != id_) {
                observe({id_, *author, AutoObservation::Fraud, "type-mismatch"});
            }
            continue;
        }
        if (open_reveal(commit_it->second, reveal) == RevealCheck::Fraudulent) {
            if (report_fraud) {
                report_fraud({env.tick, *author, part.feed_id, part.round, "reveal-mismatch"});
            }
            if (observe && *author != id_) {
                observe({id_, *author, AutoObservation::Fraud, "reveal-mismatch"});
            }
            continue;
        }
        valid.emplace_back(*author, reveal.value);
    }

    if (valid.size() < required) {
        if (env.tick - part.start_tick >= env.round_timeout) {
            fail_round(env, part, FailReason::InsufficientReveals);
        }
        return;
    }

    std::vector<Value> values;
    values.reserve(valid.size());
    for (const auto& [node, value] : valid) {
        values.push_back(value);
    }
    Value agg = aggregate_values(std::move(values), view.feed->aggregation);
    agg = biased(agg, faults_.divergence_offset);
    part.agg_value = agg;
    part.agg_digest = value_digest(agg);
    part.valid_reveals = valid.size();
    set_phase(env, part, Phase::Aggregated,
              "value=" + value_to_string(agg) + " reveals=" + std::to_string(valid.size()));

    // Divergence policing is numeric only; a text feed has no tolerance band.
    if (view.feed->output == OutputType::Integer && observe) {
        const double agg_d = static_cast<double>(std::get<std::int64_t>(agg));
        for (const auto& [node, value] : valid) {
            if (node == id_) {
                continue;
            }
            const double v = static_cast<double>(std::get<std::int64_t>(value));
            if (std::abs(v - agg_d) > env.divergence_tolerance * std::abs(agg_d)) {
                observe({id_, node, AutoObservation::Divergence,
                         part.feed_id + "#" + std::to_string(part.round)});
            }
        }
    }

    const KeyPair* signing_key = chain_key(part.chain_id);
    if (signing_key == nullptr) {
        fail_round(env, part, FailReason::ChainRejected);
        return;
    }
    AggSignaturePayload payload;
    payload.agg_digest = part.agg_digest;
    payload.timestamp = static_cast<std::int64_t>(env.tick);
    payload.feed_id = part.feed_id;
    payload.nebula_id = part.nebula_id;
    payload.round = part.round;
    payload.proof = sign_message(*signing_key,
                                 pulse_signing_payload(part.agg_digest, payload.timestamp,
                                                       part.feed_id, part.nebula_id, part.round));
    part.sign_timestamp = payload.timestamp;
    env.ledger->submit(
        make_message(MessageKind::AggSignature, idl_key_, encode_agg_signature(payload)));
    set_phase(env, part, Phase::Signed, "digest=" + part.agg_digest.hex().substr(0, 12));
}

void Node::try_finish(NodeEnv& env, PulseParticipation& part, const RoundView& view) {
    if (view.nebula->pulse_log.count(part.round)) {
        finish_round(env, part);
        return;
    }

    struct Candidate {
        std::vector<Proof> proofs;
        std::set<Bytes> signers;
    };
    std::map<std::pair<Digest, std::int64_t>, Candidate> groups;
    for (const auto& msg :
         env.ledger->read_messages(MessageKind::AggSignature, part.feed_id, part.round)) {
        AggSignaturePayload p = decode_agg_signature(msg.payload);
        if (p.nebula_id != part.nebula_id) {
            continue;
        }
        const bool member_key = std::any_of(
            view.nebula->oracle_set.begin(), view.nebula->oracle_set.end(),
            [&](const OracleEntry& e) { return e.public_key == p.proof.signer; });
        if (!member_key) {
            continue;
        }
        if (!verify_proof(p.proof, pulse_signing_payload(p.agg_digest, p.timestamp, p.feed_id,
                                                         p.nebula_id, p.round))) {
            continue;
        }
        Candidate& c = groups[{p.agg_digest, p.timestamp}];
        if (c.signers.insert(p.proof.signer).second) {
            c.proofs.push_back(p.proof);
        }
    }

    const std::size_t required = view.nebula->params.required;
    const std::map<std::pair<Digest, std::int64_t>, Candidate>::value_type* best = nullptr;
    for (const auto& entry : groups) {
        if (entry.second.proofs.size() < required) {
            continue;
        }
        if (best == nullptr || entry.second.proofs.size() > best->second.proofs.size()) {
            best = &entry;
        }
    }

    const OracleEntry* leader = view.nebula->expected_leader(view.chain->height());
    const bool is_leader = leader != nullptr && leader->node_id == id_;

    if (is_leader && best != nullptr) {
        const KeyPair* signing_key = chain_key(part.chain_id);
        TxStatus status =
            view.chain->pulse_tx(part.nebula_id, part.round, best->first.first, best->first.second,
                                 signing_key->public_key, best->second.proofs);
        if (trace) {
            trace({env.tick, id_, part.feed_id, part.round, "pulse-submitted",
                   "proofs=" + std::to_string(best->second.proofs.size()) +
                       " result=" + to_string(status)});
        }
        if (status == TxStatus::Ok) {
            std::vector<std::string> recipients;
            for (const auto& [contract_id, sub] : view.nebula->subscriptions) {
                if (sub.active) {
                    recipients.push_back(contract_id);
                }
            }
            DeliveryReport report =
                view.chain->send_data_tx(part.nebula_id, part.round, part.agg_value, recipients);
            if (trace) {
                trace({env.tick, id_, part.feed_id, part.round, "data-sent",
                       "recipients=" + std::to_string(recipients.size()) +
                           " delivered=" + std::to_string(report.delivered())});
            }
            finish_round(env, part);
            return;
        }
        if (status == TxStatus::DuplicateRound) {
            finish_round(env, part);
            return;
        }
        fail_round(env, part, FailReason::ChainRejected);
        return;
    }

    if (is_leader) {
        if (env.tick - part.start_tick >= env.round_timeout + 2) {
            fail_round(env, part, FailReason::NoQuorumDigest);
        }
        return;
    }

    if (env.tick - part.start_tick >= env.round_timeout + 3) {
        fail_round(env, part, best == nullptr ? FailReason::NoQuorumDigest : FailReason::Timeout);
    }
}

void Node::fail_round(NodeEnv& env, PulseParticipation& part, FailReason reason) {
    const bool was_participating = part.phase != Phase::Idle;
    part.fail = reason;
    set_phase(env, part, Phase::Failed, to_string(reason));
    if (was_participating) {
        raise_liveness_observations(env, part);
    }
}

void Node::finish_round(NodeEnv& env, PulseParticipation& part) {
    set_phase(env, part, Phase::Done, "");
    raise_liveness_observations(env, part);
}

void Node::raise_liveness_observations(NodeEnv& env, const PulseParticipation& part) {
    if (!observe) {
        return;
    }
    std::set<NodeId> committed;
    for (const auto& msg : env.ledger->read_messages(MessageKind::Commit, part.feed_id, part.round)) {
        if (auto author = env.ledger->author_of(msg.author)) {
            committed.insert(*author);
        }
    }
    std::set<NodeId> revealed;
    for (const auto& msg : env.ledger->read_messages(MessageKind::Reveal, part.feed_id, part.round)) {
        if (auto author = env.ledger->author_of(msg.author)) {
            revealed.insert(*author);
        }
    }
    for (const NodeId& member : part.expected_members) {
        if (member == id_) {
            continue;
        }
        if (!committed.count(member)) {
            observe({id_, member, AutoObservation::Unresponsive,
                     part.feed_id + "#" + std::to_string(part.round)});
        } else if (!revealed.count(member)) {
            observe({id_, member, AutoObservation::StoppedProcessing,
                     part.feed_id + "#" + std::to_string(part.round)});
        }
    }
}

void Node::set_phase(NodeEnv& env, PulseParticipation& part, Phase phase, const std::string& detail) {
    part.phase = phase;
    if (trace) {
        trace({env.tick, id_, part.feed_id, part.round, to_string(phase), detail});
    }
}

} // namespace gravity
