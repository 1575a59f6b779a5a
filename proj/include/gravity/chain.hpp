// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gravity/crypto.hpp"
#include "gravity/reputation.hpp"

namespace gravity {

// Account holding the not-yet-issued part of the token supply; genesis
// balances and mid-run sybil funding are transfers out of it, so the chain
// total is conserved from the first tick.
inline constexpr const char* kReserveAccount = "@reserve";

struct ChainConfig {
    ChainId chain_id;
    std::int64_t token_supply = 0;
    std::int64_t min_deposit = 1;
    std::uint64_t lock_period = 365; // "one year", in ticks
    std::int64_t registration_fee = 1;
    std::uint64_t freshness_window = 2; // |timestamp - height| bound for pulse txs
};

enum class TxStatus {
    Ok,
    InsufficientDeposit,
    InsufficientFunds,
    AlreadyRegistered,
    NotRegistered,
    Locked,
    FeeUnpaid,
    BadParams,
    BelowMinScore,
    OracleSetFull,
    AlreadyMember,
    WrongLeader,
    InsufficientSignatures,
    StaleTimestamp,
    DuplicateRound,
    NoVerifiedPulse,
    HashMismatch,
    NotSubscribed,
    PaymentFailed,
    NotConsul,
    UnknownNebula,
    UnknownContract,
    NothingToWithdraw,
};

std::string to_string(TxStatus s);

struct RegistrationRecord {
    Bytes public_key;
    std::uint64_t registration_height = 0;
    std::int64_t deposit = 0;
    bool active = false;
    std::optional<std::uint64_t> exit_height;
    std::optional<std::uint64_t> release_height;
    bool deposit_released = false;
};

enum class PayMode { Deposit, PerCall };

struct Subscription {
    std::string method;
    PayMode mode = PayMode::Deposit;
    std::int64_t balance = 0; // deposit mode only; held by the nebula
    bool active = true;
};

enum class ContractKind { Data, Trigger };

struct ReceivedRecord {
    FeedId feed_id;
    std::int64_t round = 0;
    std::optional<Value> value; // empty for trigger invocations
    std::uint64_t height = 0;
};

struct UserContract {
    std::string contract_id;
    ContractKind kind = ContractKind::Data;
    std::vector<ReceivedRecord> received_log;
};

struct NebulaParams {
    NebulaId nebula_id;
    FeedId feed_id;
    std::size_t capacity = 0; // N: maximum oracle count
    std::size_t required = 0; // K: valid signatures needed
    double min_score = 0.0;
    std::int64_t price = 0; // per delivery
};

struct OracleEntry {
    NodeId node_id;
    Bytes public_key;
};

struct PulseRecord {
    Digest agg_digest;
    std::uint64_t height = 0;
    NodeId leader;
};

// Per-feed verification contract: holds the oracle set and K-of-N rule,
// the pulse log, subscriptions and the undistributed reward pool.
struct NebulaContract {
    NebulaParams params;
    std::vector<OracleEntry> oracle_set; // admission order; leader index rotates over it
    std::map<std::string, Subscription> subscriptions;
    std::map<std::int64_t, PulseRecord> pulse_log;
    std::map<std::int64_t, std::vector<NodeId>> pulse_signers;
    std::map<NodeId, std::int64_t> activity_log; // lifetime valid-signature counts
    std::int64_t undistributed = 0;
    std::map<NodeId, std::int64_t> withdrawable;

    bool is_member(const NodeId& id) const;
    const OracleEntry* expected_leader(std::uint64_t height) const;
};

// Canonical payload each oracle signs over its aggregate and NEBULA-SC
// verifies inside pulse_tx.
Bytes pulse_signing_payload(const Digest& agg_digest, std::int64_t timestamp, const FeedId& feed_id,
                            const NebulaId& nebula_id, std::int64_t round);

// Digest stored by pulse_tx and re-checked at delivery time.
Digest value_digest(const Value& value);

struct DeliveryOutcome {
    std::string contract_id;
    TxStatus status = TxStatus::Ok;
    bool suspended_now = false;
};

struct DeliveryReport {
    TxStatus status = TxStatus::Ok; // tx-level gate; per-recipient below
    std::vector<DeliveryOutcome> outcomes;

    std::size_t delivered() const;
};

struct TxRecord {
    std::uint64_t height = 0;
    std::string kind;
    std::string parties;
    std::int64_t amount = 0;
    std::string result;
};

// One simulated target blockchain: accounts, SYSTEM-SC, nebula instances and
// user contracts, advanced one height per tick by the simulation loop.
class TargetChain {
public:
    explicit TargetChain(ChainConfig config);

    const ChainConfig& config() const { return config_; }
    std::uint64_t height() const { return height_; }
    void advance_height() { ++height_; }

    // -- accounts ---------------------------------------------------------
    std::int64_t balance(const std::string& account) const;
    TxStatus transfer(const std::string& from, const std::string& to, std::int64_t amount);
    std::int64_t treasury() const { return treasury_; }

    // -- SYSTEM-SC --------------------------------------------------------
    TxStatus register_node(const NodeId& node_id, const Bytes& public_key, std::int64_t deposit);
    TxStatus deactivate_node(const NodeId& node_id);
    TxStatus release_deposit(const NodeId& node_id);
    const RegistrationRecord* registration(const NodeId& node_id) const;
    bool is_active_node(const NodeId& node_id) const;

    TxStatus write_scores(const NodeId& caller, const std::vector<GravityScore>& scores);
    TxStatus update_consuls(const NodeId& caller, std::vector<NodeId> members);
    // Genesis installation, before any tick runs.
    void seed_scores(const std::vector<GravityScore>& scores);
    void seed_consuls(std::vector<NodeId> members);
    const std::vector<GravityScore>& score_register() const { return score_register_; }
    const std::vector<NodeId>& consul_register() const { return consul_register_; }
    std::optional<double> registered_score(const NodeId& node_id) const;

    // -- NEBULA-SC --------------------------------------------------------
    TxStatus create_nebula(const std::string& creator_account, const NebulaParams& params);
    TxStatus admit_oracle(const NebulaId& nebula_id, const NodeId& node_id);
    TxStatus remove_oracle(const NebulaId& nebula_id, const NodeId& node_id);
    NebulaContract* nebula(const NebulaId& nebula_id);
    const NebulaContract* nebula(const NebulaId& nebula_id) const;
    const std::map<NebulaId, NebulaContract>& nebulae() const { return nebulae_; }

    TxStatus pulse_tx(const NebulaId& nebula_id, std::int64_t round, const Digest& agg_digest,
                      std::int64_t timestamp, const Bytes& leader_key,
                      const std::vector<Proof>& signatures);
    DeliveryReport send_data_tx(const NebulaId& nebula_id, std::int64_t round, const Value& value,
                                const std::vector<std::string>& recipients);

    // -- USER-SC ----------------------------------------------------------
    TxStatus register_user_contract(const std::string& contract_id, ContractKind kind);
    const UserContract* user_contract(const std::string& contract_id) const;
    TxStatus subscribe(const std::string& contract_id, const NebulaId& nebula_id,
                       const std::string& method, PayMode mode);
    TxStatus deposit_subscription(const std::string& contract_id, const NebulaId& nebula_id,
                                  std::int64_t amount);
    TxStatus reactivate(const std::string& contract_id, const NebulaId& nebula_id);

    // -- economy hooks ----------------------------------------------------
    TxStatus credit_withdrawable(const NebulaId& nebula_id, const NodeId& node_id, std::int64_t amount);
    TxStatus withdraw(const NodeId& node_id, const NebulaId& nebula_id);

    // -- invariants & observability ----------------------------------------
    std::int64_t tracked_total() const;
    bool conserved() const { return tracked_total() == config_.token_supply; }

    const std::vector<TxRecord>& tx_log() const { return txs_; }
    void dump_txs(std::ostream& out) const;

private:
    TxStatus log_tx(const std::string& kind, const std::string& parties, std::int64_t amount,
                    TxStatus status);

    ChainConfig config_;
    std::uint64_t height_ = 0;
    std::map<std::string, std::int64_t> accounts_;
    std::int64_t treasury_ = 0;
    std::map<NodeId, RegistrationRecord> registrations_;
    std::vector<GravityScore> score_register_; // sorted by node id
    std::vector<NodeId> consul_register_;
    std::vector<std::pair<FeedId, NebulaId>> feed_registry_;
    std::map<NebulaId, NebulaContract> nebulae_;
    std::map<std::string, UserContract> users_;
    std::vector<TxRecord> txs_;
};

} // namespace gravity
