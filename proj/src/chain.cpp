// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/chain.hpp"

#include <algorithm>
#include <set>

#include "gravity/canonical.hpp"

namespace gravity {

std::string to_string(TxStatus s) {
    switch (s) {
    case TxStatus::Ok: return "ok";
    case TxStatus::InsufficientDeposit: return "insufficient-deposit";
    case TxStatus::InsufficientFunds: return "insufficient-funds";
    case TxStatus::AlreadyRegistered: return "already-registered";
    case TxStatus::NotRegistered: return "not-registered";
    case TxStatus::Locked: return "locked";
    case TxStatus::FeeUnpaid: return "fee-unpaid";
    case TxStatus::BadParams: return "bad-params";
    case TxStatus::BelowMinScore: return "below-min-score";
    case TxStatus::OracleSetFull: return "oracle-set-full";
    case TxStatus::AlreadyMember: return "already-member";
    case TxStatus::WrongLeader: return "wrong-leader";
    case TxStatus::InsufficientSignatures: return "insufficient-signatures";
    case TxStatus::StaleTimestamp: return "stale-timestamp";
    case TxStatus::DuplicateRound: return "duplicate-round";
    case TxStatus::NoVerifiedPulse: return "no-verified-pulse";
    case TxStatus::HashMismatch: return "hash-mismatch";
    case TxStatus::NotSubscribed: return "not-subscribed";
    case TxStatus::PaymentFailed: return "payment-failed";
    case TxStatus::NotConsul: return "not-consul";
    case TxStatus::UnknownNebula: return "unknown-nebula";
    case TxStatus::UnknownContract: return "unknown-contract";
    case TxStatus::NothingToWithdraw: return "nothing-to-withdraw";
    }
    return "?";
}

bool NebulaContract::is_member(const NodeId& id) const {
    return std::any_of(oracle_set.begin(), oracle_set.end(),
                       [&](const OracleEntry& e) { return e.node_id == id; });
}

const OracleEntry* NebulaContract::expected_leader(std::uint64_t height) const {
    if (oracle_set.empty()) {
        return nullptr;
    }
    return &oracle_set[height % oracle_set.size()];
}

Bytes pulse_signing_payload(const Digest& agg_digest, std::int64_t timestamp, const FeedId& feed_id,
                            const NebulaId& nebula_id, std::int64_t round) {
    CanonicalWriter w;
    w.add_bytes(agg_digest.bytes);
    w.add_i64(timestamp);
    w.add_str(feed_id);
    w.add_str(nebula_id);
    w.add_i64(round);
    return w.take();
}

Digest value_digest(const Value& value) {
    return hash_bytes(CanonicalWriter{}.add_value(value).take());
}

std::size_t DeliveryReport::delivered() const {
    std::size_t n = 0;
    for (const auto& o : outcomes) {
        if (o.status == TxStatus::Ok) {
            ++n;
        }
    }
    return n;
}

TargetChain::TargetChain(ChainConfig config) : config_(std::move(config)) {
    if (config_.token_supply < 0 || config_.min_deposit < 1) {
        throw std::invalid_argument("bad chain config");
    }
    accounts_[kReserveAccount] = config_.token_supply;
}

std::int64_t TargetChain::balance(const std::string& account) const {
    auto it = accounts_.find(account);
    return it == accounts_.end() ? 0 : it->second;
}

TxStatus TargetChain::transfer(const std::string& from, const std::string& to, std::int64_t amount) {
    if (amount < 0) {
        return log_tx("transfer", from + "->" + to, amount, TxStatus::BadParams);
    }
    if (balance(from) < amount) {
        return log_tx("transfer", from + "->" + to, amount, TxStatus::InsufficientFunds);
    }
    accounts_[from] -= amount;
    accounts_[to] += amount;
    return log_tx("transfer", from + "->" + to, amount, TxStatus::Ok);
}

TxStatus TargetChain::register_node(const NodeId& node_id, const Bytes& public_key,
                                    std::int64_t deposit) {
    auto it = registrations_.find(node_id);
    if (it != registrations_.end() && (it->second.active || !it->second.deposit_released)) {
        return log_tx("register", node_id, deposit, TxStatus::AlreadyRegistered);
    }
    if (deposit < config_.min_deposit) {
        return log_tx("register", node_id, deposit, TxStatus::InsufficientDeposit);
    }
    if (balance(node_id) < deposit + config_.registration_fee) {
        return log_tx("register", node_id, deposit, TxStatus::InsufficientFunds);
    }
    accounts_[node_id] -= deposit + config_.registration_fee;
    treasury_ += config_.registration_fee;

    RegistrationRecord rec;
    rec.public_key = public_key;
    rec.registration_height = height_;
    rec.deposit = deposit;
    rec.active = true;
    registrations_[node_id] = rec;
    return log_tx("register", node_id, deposit, TxStatus::Ok);
}

TxStatus TargetChain::deactivate_node(const NodeId& node_id) {
    auto it = registrations_.find(node_id);
    if (it == registrations_.end() || !it->second.active) {
        return log_tx("deactivate", node_id, 0, TxStatus::NotRegistered);
    }
    RegistrationRecord& rec = it->second;
    rec.active = false;
    rec.exit_height = height_;
    const double score = registered_score(node_id).value_or(0.0);
    // Zero reputation at exit keeps the deposit locked for a full period
    // from the exit; otherwise the lock runs from the registration.
    if (score == 0.0) {
        rec.release_height = height_ + config_.lock_period;
    } else {
        rec.release_height = rec.registration_height + config_.lock_period;
    }
    return log_tx("deactivate", node_id, 0, TxStatus::Ok);
}

TxStatus TargetChain::release_deposit(const NodeId& node_id) {
    auto it = registrations_.find(node_id);
    if (it == registrations_.end()) {
        return log_tx("release-deposit", node_id, 0, TxStatus::NotRegistered);
    }
    RegistrationRecord& rec = it->second;
    if (rec.deposit_released) {
        return log_tx("release-deposit", node_id, 0, TxStatus::NothingToWithdraw);
    }
    if (rec.active || !rec.release_height || height_ < *rec.release_height) {
        return log_tx("release-deposit", node_id, 0, TxStatus::Locked);
    }
    rec.deposit_released = true;
    accounts_[node_id] += rec.deposit;
    return log_tx("release-deposit", node_id, rec.deposit, TxStatus::Ok);
}

const RegistrationRecord* TargetChain::registration(const NodeId& node_id) const {
    auto it = registrations_.find(node_id);
    return it == registrations_.end() ? nullptr : &it->second;
}

bool TargetChain::is_active_node(const NodeId& node_id) const {
    const auto* rec = registration(node_id);
    return rec != nullptr && rec->active;
}

TxStatus TargetChain::write_scores(const NodeId& caller, const std::vector<GravityScore>& scores) {
    if (std::find(consul_register_.begin(), consul_register_.end(), caller) ==
        consul_register_.end()) {
        return log_tx("write-scores", caller, 0, TxStatus::NotConsul);
    }
    std::vector<GravityScore> sorted = scores;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.node_id < b.node_id; });
    score_register_ = std::move(sorted);
    return log_tx("write-scores", caller, 0, TxStatus::Ok);
}

TxStatus TargetChain::update_consuls(const NodeId& caller, std::vector<NodeId> members) {
    if (std::find(consul_register_.begin(), consul_register_.end(), caller) ==
        consul_register_.end()) {
        return log_tx("update-consuls", caller, 0, TxStatus::NotConsul);
    }
    consul_register_ = std::move(members);
    return log_tx("update-consuls", caller, 0, TxStatus::Ok);
}

void TargetChain::seed_scores(const std::vector<GravityScore>& scores) {
    std::vector<GravityScore> sorted = scores;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.node_id < b.node_id; });
    score_register_ = std::move(sorted);
}

void TargetChain::seed_consuls(std::vector<NodeId> members) {
    consul_register_ = std::move(members);
}

std::optional<double> TargetChain::registered_score(const NodeId& node_id) const {
    for (const auto& s : score_register_) {
        if (s.node_id == node_id) {
            return s.score;
        }
    }
    return std::nullopt;
}

TxStatus TargetChain::create_nebula(const std::string& creator_account, const NebulaParams& params) {
    if (nebulae_.count(params.nebula_id)) {
        return log_tx("create-nebula", params.nebula_id, 0, TxStatus::AlreadyRegistered);
    }
    if (params.required == 0 || params.required > params.capacity || params.min_score < 0.0 ||
        params.min_score > 100.0 || params.price < 0) {
        return log_tx("create-nebula", params.nebula_id, 0, TxStatus::BadParams);
    }
    if (balance(creator_account) < config_.registration_fee) {
        return log_tx("create-nebula", params.nebula_id, 0, TxStatus::FeeUnpaid);
    }
    accounts_[creator_account] -= config_.registration_fee;
    treasury_ += config_.registration_fee;
    NebulaContract neb;
    neb.params = params;
    nebulae_.emplace(params.nebula_id, std::move(neb));
    feed_registry_.emplace_back(params.feed_id, params.nebula_id);
    return log_tx("create-nebula", params.nebula_id, config_.registration_fee, TxStatus::Ok);
}

TxStatus TargetChain::admit_oracle(const NebulaId& nebula_id, const NodeId& node_id) {
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("admit-oracle", nebula_id + ":" + node_id, 0, TxStatus::UnknownNebula);
    }
    NebulaContract& neb = it->second;
    const auto* rec = registration(node_id);
    if (rec == nullptr || !rec->active) {
        return log_tx("admit-oracle", nebula_id + ":" + node_id, 0, TxStatus::NotRegistered);
    }
    if (neb.is_member(node_id)) {
        return log_tx("admit-oracle", nebula_id + ":" + node_id, 0, TxStatus::AlreadyMember);
    }
    if (neb.oracle_set.size() >= neb.params.capacity) {
        return log_tx("admit-oracle", nebula_id + ":" + node_id, 0, TxStatus::OracleSetFull);
    }
    if (registered_score(node_id).value_or(0.0) < neb.params.min_score) {
        return log_tx("admit-oracle", nebula_id + ":" + node_id, 0, TxStatus::BelowMinScore);
    }
    neb.oracle_set.push_back({node_id, rec->public_key});
    return log_tx("admit-oracle", nebula_id + ":" + node_id, 0, TxStatus::Ok);
}

TxStatus TargetChain::remove_oracle(const NebulaId& nebula_id, const NodeId& node_id) {
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("remove-oracle", nebula_id + ":" + node_id, 0, TxStatus::UnknownNebula);
    }
    auto& set = it->second.oracle_set;
    auto member = std::find_if(set.begin(), set.end(),
                               [&](const OracleEntry& e) { return e.node_id == node_id; });
    if (member == set.end()) {
        return log_tx("remove-oracle", nebula_id + ":" + node_id, 0, TxStatus::NotRegistered);
    }
    set.erase(member);
    return log_tx("remove-oracle", nebula_id + ":" + node_id, 0, TxStatus::Ok);
}

NebulaContract* TargetChain::nebula(const NebulaId& nebula_id) {
    auto it = nebulae_.find(nebula_id);
    return it == nebulae_.end() ? nullptr : &it->second;
}

const NebulaContract* TargetChain::nebula(const NebulaId& nebula_id) const {
    auto it = nebulae_.find(nebula_id);
    return it == nebulae_.end() ? nullptr : &it->second;
}

TxStatus TargetChain::pulse_tx(const NebulaId& nebula_id, std::int64_t round,
                               const Digest& agg_digest, std::int64_t timestamp,
                               const Bytes& leader_key, const std::vector<Proof>& signatures) {
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("pulse", nebula_id, round, TxStatus::UnknownNebula);
    }
    NebulaContract& neb = it->second;

    const OracleEntry* expected = neb.expected_leader(height_);
    if (expected == nullptr || expected->public_key != leader_key) {
        return log_tx("pulse", nebula_id, round, TxStatus::WrongLeader);
    }

    const Bytes payload =
        pulse_signing_payload(agg_digest, timestamp, neb.params.feed_id, nebula_id, round);
    std::vector<NodeId> valid_signers;
    std::set<Bytes> seen_signers;
    for (const Proof& proof : signatures) {
        if (seen_signers.count(proof.signer)) {
            continue; // one vote per oracle
        }
        auto member = std::find_if(neb.oracle_set.begin(), neb.oracle_set.end(),
                                   [&](const OracleEntry& e) { return e.public_key == proof.signer; });
        if (member == neb.oracle_set.end()) {
            continue;
        }
        if (!verify_proof(proof, payload)) {
            continue;
        }
        seen_signers.insert(proof.signer);
        valid_signers.push_back(member->node_id);
    }
    if (valid_signers.size() < neb.params.required) {
        return log_tx("pulse", nebula_id, round, TxStatus::InsufficientSignatures);
    }

    const auto h = static_cast<std::int64_t>(height_);
    const auto window = static_cast<std::int64_t>(config_.freshness_window);
    if (timestamp > h + window || timestamp < h - window) {
        return log_tx("pulse", nebula_id, round, TxStatus::StaleTimestamp);
    }

    if (neb.pulse_log.count(round)) {
        return log_tx("pulse", nebula_id, round, TxStatus::DuplicateRound);
    }

    std::sort(valid_signers.begin(), valid_signers.end());
    neb.pulse_log[round] = PulseRecord{agg_digest, height_, expected->node_id};
    neb.pulse_signers[round] = valid_signers;
    for (const NodeId& signer : valid_signers) {
        ++neb.activity_log[signer];
    }
    return log_tx("pulse", nebula_id, round, TxStatus::Ok);
}

DeliveryReport TargetChain::send_data_tx(const NebulaId& nebula_id, std::int64_t round,
                                         const Value& value,
                                         const std::vector<std::string>& recipients) {
    DeliveryReport report;
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        report.status = TxStatus::UnknownNebula;
        log_tx("send-data", nebula_id, round, report.status);
        return report;
    }
    NebulaContract& neb = it->second;
    auto pulse = neb.pulse_log.find(round);
    if (pulse == neb.pulse_log.end()) {
        report.status = TxStatus::NoVerifiedPulse;
        log_tx("send-data", nebula_id, round, report.status);
        return report;
    }
    // Data integrity gate for the whole transaction: the transmitted value
    // must match the digest the pulse verified.
    const bool value_ok = value_digest(value) == pulse->second.agg_digest;

    for (const std::string& contract_id : recipients) {
        DeliveryOutcome outcome;
        outcome.contract_id = contract_id;
        if (!value_ok) {
            outcome.status = TxStatus::HashMismatch;
            report.outcomes.push_back(outcome);
            log_tx("deliver", nebula_id + "->" + contract_id, round, outcome.status);
            continue;
        }
        auto user_it = users_.find(contract_id);
        auto sub_it = neb.subscriptions.find(contract_id);
        if (user_it == users_.end() || sub_it == neb.subscriptions.end()) {
            outcome.status = TxStatus::NotSubscribed;
            report.outcomes.push_back(outcome);
            log_tx("deliver", nebula_id + "->" + contract_id, round, outcome.status);
            continue;
        }
        Subscription& sub = sub_it->second;
        if (!sub.active) {
            outcome.status = TxStatus::PaymentFailed;
            report.outcomes.push_back(outcome);
            log_tx("deliver", nebula_id + "->" + contract_id, round, outcome.status);
            continue;
        }
        const std::int64_t price = neb.params.price;
        bool paid = false;
        if (sub.mode == PayMode::Deposit) {
            if (sub.balance >= price) {
                sub.balance -= price;
                paid = true;
            }
        } else {
            if (balance(contract_id) >= price) {
                accounts_[contract_id] -= price;
                paid = true;
            }
        }
        if (!paid) {
            sub.active = false; // suspended until the user reactivates
            outcome.status = TxStatus::PaymentFailed;
            outcome.suspended_now = true;
            report.outcomes.push_back(outcome);
            log_tx("deliver", nebula_id + "->" + contract_id, round, outcome.status);
            continue;
        }
        neb.undistributed += price;
        ReceivedRecord rec;
        rec.feed_id = neb.params.feed_id;
        rec.round = round;
        rec.height = height_;
        if (user_it->second.kind == ContractKind::Data) {
            rec.value = value;
        }
        user_it->second.received_log.push_back(std::move(rec));
        outcome.status = TxStatus::Ok;
        report.outcomes.push_back(outcome);
        log_tx("deliver", nebula_id + "->" + contract_id, round, TxStatus::Ok);
    }
    return report;
}

TxStatus TargetChain::register_user_contract(const std::string& contract_id, ContractKind kind) {
    if (users_.count(contract_id)) {
        return log_tx("register-contract", contract_id, 0, TxStatus::AlreadyRegistered);
    }
    UserContract contract;
    contract.contract_id = contract_id;
    contract.kind = kind;
    users_.emplace(contract_id, std::move(contract));
    return log_tx("register-contract", contract_id, 0, TxStatus::Ok);
}

const UserContract* TargetChain::user_contract(const std::string& contract_id) const {
    auto it = users_.find(contract_id);
    return it == users_.end() ? nullptr : &it->second;
}

TxStatus TargetChain::subscribe(const std::string& contract_id, const NebulaId& nebula_id,
                                const std::string& method, PayMode mode) {
    if (!users_.count(contract_id)) {
        return log_tx("subscribe", contract_id, 0, TxStatus::UnknownContract);
    }
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("subscribe", contract_id, 0, TxStatus::UnknownNebula);
    }
    Subscription sub;
    sub.method = method;
    sub.mode = mode;
    it->second.subscriptions[contract_id] = sub;
    return log_tx("subscribe", contract_id + "@" + nebula_id, 0, TxStatus::Ok);
}

TxStatus TargetChain::deposit_subscription(const std::string& contract_id,
                                           const NebulaId& nebula_id, std::int64_t amount) {
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("sub-deposit", contract_id, amount, TxStatus::UnknownNebula);
    }
    auto sub_it = it->second.subscriptions.find(contract_id);
    if (sub_it == it->second.subscriptions.end()) {
        return log_tx("sub-deposit", contract_id, amount, TxStatus::NotSubscribed);
    }
    if (amount < 0 || balance(contract_id) < amount) {
        return log_tx("sub-deposit", contract_id, amount, TxStatus::InsufficientFunds);
    }
    accounts_[contract_id] -= amount;
    sub_it->second.balance += amount;
    return log_tx("sub-deposit", contract_id + "@" + nebula_id, amount, TxStatus::Ok);
}

TxStatus TargetChain::reactivate(const std::string& contract_id, const NebulaId& nebula_id) {
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("reactivate", contract_id, 0, TxStatus::UnknownNebula);
    }
    auto sub_it = it->second.subscriptions.find(contract_id);
    if (sub_it == it->second.subscriptions.end()) {
        return log_tx("reactivate", contract_id, 0, TxStatus::NotSubscribed);
    }
    sub_it->second.active = true;
    return log_tx("reactivate", contract_id + "@" + nebula_id, 0, TxStatus::Ok);
}

TxStatus TargetChain::credit_withdrawable(const NebulaId& nebula_id, const NodeId& node_id,
                                          std::int64_t amount) {
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("credit-reward", node_id, amount, TxStatus::UnknownNebula);
    }
    NebulaContract& neb = it->second;
    if (amount < 0 || neb.undistributed < amount) {
        return log_tx("credit-reward", node_id, amount, TxStatus::InsufficientFunds);
    }
    neb.undistributed -= amount;
    neb.withdrawable[node_id] += amount;
    return log_tx("credit-reward", nebula_id + ":" + node_id, amount, TxStatus::Ok);
}

TxStatus TargetChain::withdraw(const NodeId& node_id, const NebulaId& nebula_id) {
    auto it = nebulae_.find(nebula_id);
    if (it == nebulae_.end()) {
        return log_tx("withdraw", node_id, 0, TxStatus::UnknownNebula);
    }
    NebulaContract& neb = it->second;
    auto w = neb.withdrawable.find(node_id);
    if (w == neb.withdrawable.end() || w->second <= 0) {
        return log_tx("withdraw", node_id, 0, TxStatus::NothingToWithdraw);
    }
    const std::int64_t amount = w->second;
    w->second = 0;
    accounts_[node_id] += amount;
    return log_tx("withdraw", nebula_id + ":" + node_id, amount, TxStatus::Ok);
}

std::int64_t TargetChain::tracked_total() const {
    std::int64_t total = treasury_;
    for (const auto& [account, bal] : accounts_) {
        total += bal;
    }
    for (const auto& [node, rec] : registrations_) {
        if (!rec.deposit_released) {
            total += rec.deposit;
        }
    }
    for (const auto& [id, neb] : nebulae_) {
        total += neb.undistributed;
        for (const auto& [contract, sub] : neb.subscriptions) {
            total += sub.balance;
        }
        for (const auto& [node, amount] : neb.withdrawable) {
            total += amount;
        }
    }
    return total;
}

TxStatus TargetChain::log_tx(const std::string& kind, const std::string& parties,
                             std::int64_t amount, TxStatus status) {
    txs_.push_back({height_, kind, parties, amount, to_string(status)});
    return status;
}

void TargetChain::dump_txs(std::ostream& out) const {
    for (const auto& tx : txs_) {
        out << tx.height << ' ' << tx.kind << ' ' << tx.parties << ' ' << tx.amount << ' '
            << tx.result << '\n';
    }
}

} // namespace gravity
