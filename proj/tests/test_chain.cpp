// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gravity/chain.hpp"
#include "gravity/rng.hpp"

using namespace gravity;

namespace {

ChainConfig small_config() {
    ChainConfig cfg;
    cfg.chain_id = "alpha";
    cfg.token_supply = 100000;
    cfg.min_deposit = 10;
    cfg.lock_period = 365;
    cfg.registration_fee = 1;
    cfg.freshness_window = 2;
    return cfg;
}

struct Fixture {
    TargetChain chain{small_config()};
    std::map<NodeId, KeyPair> keys;
    DeterministicRng rng{71};

    NodeId add_node(const std::string& id, std::int64_t funds = 1000, std::int64_t deposit = 10) {
        keys.emplace(id, keypair_from_seed(rng.fork("key:" + id).next_block()));
        chain.transfer(kReserveAccount, id, funds);
        REQUIRE(chain.register_node(id, keys.at(id).public_key, deposit) == TxStatus::Ok);
        return id;
    }

    // Installs a register listing every node at the given score and makes
    // node_ids[0] the consul.
    void install_scores(double score) {
        std::vector<GravityScore> scores;
        for (const auto& [id, key] : keys) {
            scores.push_back({id, score});
        }
        chain.seed_scores(scores);
        chain.seed_consuls({keys.begin()->first});
    }

    NebulaContract& make_nebula(std::size_t n, std::size_t k, double min_score = 0.0,
                                std::int64_t price = 1) {
        NebulaParams params;
        params.nebula_id = "neb";
        params.feed_id = "feed";
        params.capacity = n;
        params.required = k;
        params.min_score = min_score;
        params.price = price;
        REQUIRE(chain.create_nebula(keys.begin()->first, params) == TxStatus::Ok);
        for (const auto& [id, key] : keys) {
            if (chain.nebula("neb")->oracle_set.size() >= n) {
                break;
            }
            REQUIRE(chain.admit_oracle("neb", id) == TxStatus::Ok);
        }
        return *chain.nebula("neb");
    }

    std::vector<Proof> sign_pulse(const Digest& digest, std::int64_t ts, std::int64_t round,
                                  std::size_t signer_count) {
        std::vector<Proof> proofs;
        const Bytes payload = pulse_signing_payload(digest, ts, "feed", "neb", round);
        std::size_t used = 0;
        for (const auto& entry : chain.nebula("neb")->oracle_set) {
            if (used++ >= signer_count) {
                break;
            }
            proofs.push_back(sign_message(keys.at(entry.node_id), payload));
        }
        return proofs;
    }

    const OracleEntry& leader_now() {
        return *chain.nebula("neb")->expected_leader(chain.height());
    }
};

} // namespace

TEST_CASE("registration enforces the minimum deposit and locks it") {
    Fixture f;
    f.chain.transfer(kReserveAccount, "node-a", 100);

    DeterministicRng rng(1);
    KeyPair key = keypair_from_seed(rng.next_block());
    CHECK(f.chain.register_node("node-a", key.public_key, 9) == TxStatus::InsufficientDeposit);
    CHECK(f.chain.register_node("node-a", key.public_key, 10) == TxStatus::Ok);
    CHECK(f.chain.register_node("node-a", key.public_key, 10) == TxStatus::AlreadyRegistered);

    // deposit + fee left the account; deposit is tracked as locked.
    CHECK(f.chain.balance("node-a") == 100 - 10 - 1);
    CHECK(f.chain.registration("node-a")->deposit == 10);
    CHECK(f.chain.treasury() == 1);
    CHECK(f.chain.conserved());
}

TEST_CASE("a large deposit registers but grants no score") {
    Fixture f;
    f.add_node("whale", 1000, 100);
    CHECK(f.chain.registration("whale")->deposit == 100);
    CHECK_FALSE(f.chain.registered_score("whale").has_value());
    CHECK(f.chain.conserved());
}

TEST_CASE("deposit lifecycle: zero-score exit locks from exit, scored exit from registration") {
    Fixture f;
    f.add_node("zero", 1000, 10);
    f.add_node("scored", 1000, 10);
    f.chain.seed_consuls({"zero"});
    f.chain.seed_scores({{"zero", 0.0}, {"scored", 40.0}});

    for (int i = 0; i < 100; ++i) {
        f.chain.advance_height(); // height 100, registration was at 0
    }
    CHECK(f.chain.deactivate_node("zero") == TxStatus::Ok);
    CHECK(f.chain.deactivate_node("scored") == TxStatus::Ok);
    CHECK(f.chain.deactivate_node("scored") == TxStatus::NotRegistered);

    CHECK(*f.chain.registration("zero")->release_height == 100 + 365);
    CHECK(*f.chain.registration("scored")->release_height == 0 + 365);

    CHECK(f.chain.release_deposit("zero") == TxStatus::Locked);
    CHECK(f.chain.release_deposit("scored") == TxStatus::Locked);

    while (f.chain.height() < 365) {
        f.chain.advance_height();
    }
    CHECK(f.chain.release_deposit("scored") == TxStatus::Ok);
    CHECK(f.chain.release_deposit("scored") == TxStatus::NothingToWithdraw);
    CHECK(f.chain.release_deposit("zero") == TxStatus::Locked);

    while (f.chain.height() < 465) {
        f.chain.advance_height();
    }
    CHECK(f.chain.release_deposit("zero") == TxStatus::Ok);
    CHECK(f.chain.conserved());
}

TEST_CASE("active nodes cannot release their deposit") {
    Fixture f;
    f.add_node("busy");
    CHECK(f.chain.release_deposit("busy") == TxStatus::Locked);
}

TEST_CASE("create_nebula validates parameters and charges the fee") {
    Fixture f;
    f.add_node("creator");
    NebulaParams params;
    params.nebula_id = "neb";
    params.feed_id = "feed";
    params.capacity = 11;
    params.required = 12;
    CHECK(f.chain.create_nebula("creator", params) == TxStatus::BadParams);

    params.required = 8;
    const std::int64_t before = f.chain.balance("creator");
    CHECK(f.chain.create_nebula("creator", params) == TxStatus::Ok);
    CHECK(f.chain.balance("creator") == before - 1);

    CHECK(f.chain.create_nebula("pauper-nebula", params) == TxStatus::AlreadyRegistered);
    params.nebula_id = "neb2";
    CHECK(f.chain.create_nebula("broke", params) == TxStatus::FeeUnpaid);
    CHECK(f.chain.conserved());
}

TEST_CASE("oracle admission respects the score threshold") {
    Fixture f;
    for (int i = 0; i < 3; ++i) {
        f.add_node("n" + std::to_string(i));
    }
    f.chain.seed_scores({{"n0", 50.0}, {"n1", 10.0}, {"n2", 50.0}});
    f.chain.seed_consuls({"n0"});

    NebulaParams params;
    params.nebula_id = "neb";
    params.feed_id = "feed";
    params.capacity = 2;
    params.required = 1;
    params.min_score = 20.0;
    REQUIRE(f.chain.create_nebula("n0", params) == TxStatus::Ok);

    CHECK(f.chain.admit_oracle("neb", "n0") == TxStatus::Ok);
    CHECK(f.chain.admit_oracle("neb", "n1") == TxStatus::BelowMinScore);
    CHECK(f.chain.admit_oracle("neb", "n0") == TxStatus::AlreadyMember);
    CHECK(f.chain.admit_oracle("neb", "n2") == TxStatus::Ok);
    CHECK(f.chain.admit_oracle("neb", "n1") == TxStatus::OracleSetFull);
    CHECK(f.chain.admit_oracle("ghost", "n1") == TxStatus::UnknownNebula);
}

TEST_CASE("pulse_tx: 8 of 11 accepted, 7 of 11 rejected") {
    Fixture f;
    for (int i = 0; i < 11; ++i) {
        f.add_node("node-" + std::string(1, static_cast<char>('a' + i)));
    }
    f.install_scores(80.0);
    f.make_nebula(11, 8);
    f.chain.advance_height();

    const Digest digest = hash_bytes(to_bytes("agg"));
    const auto ts = static_cast<std::int64_t>(f.chain.height());

    auto seven = f.sign_pulse(digest, ts, 1, 7);
    CHECK(f.chain.pulse_tx("neb", 1, digest, ts, f.leader_now().public_key, seven) ==
          TxStatus::InsufficientSignatures);

    auto eight = f.sign_pulse(digest, ts, 1, 8);
    CHECK(f.chain.pulse_tx("neb", 1, digest, ts, f.leader_now().public_key, eight) == TxStatus::Ok);
    CHECK(f.chain.nebula("neb")->pulse_log.count(1) == 1);
    CHECK(f.chain.nebula("neb")->pulse_signers.at(1).size() == 8);

    // Activity log incremented exactly for the valid signers.
    std::int64_t total_activity = 0;
    for (const auto& [node, count] : f.chain.nebula("neb")->activity_log) {
        total_activity += count;
    }
    CHECK(total_activity == 8);
}

TEST_CASE("pulse_tx rejects wrong leader, stale timestamp, duplicate round, bad signers") {
    Fixture f;
    for (int i = 0; i < 11; ++i) {
        f.add_node("node-" + std::string(1, static_cast<char>('a' + i)));
    }
    f.install_scores(80.0);
    f.make_nebula(11, 8);
    f.chain.advance_height();

    const Digest digest = hash_bytes(to_bytes("agg"));
    const auto ts = static_cast<std::int64_t>(f.chain.height());
    auto proofs = f.sign_pulse(digest, ts, 1, 9);

    // Correct signatures, submitted by a non-leader.
    const auto& set = f.chain.nebula("neb")->oracle_set;
    const OracleEntry& leader = f.leader_now();
    const OracleEntry& not_leader =
        set[(f.chain.height() + 1) % set.size()];
    CHECK(f.chain.pulse_tx("neb", 1, digest, ts, not_leader.public_key, proofs) ==
          TxStatus::WrongLeader);

    CHECK(f.chain.pulse_tx("neb", 1, digest, ts - 3, leader.public_key,
                           f.sign_pulse(digest, ts - 3, 1, 9)) == TxStatus::StaleTimestamp);

    // Duplicate signatures from one signer only count once.
    auto duplicated = f.sign_pulse(digest, ts, 1, 4);
    duplicated.insert(duplicated.end(), duplicated.begin(), duplicated.end());
    CHECK(f.chain.pulse_tx("neb", 1, digest, ts, leader.public_key, duplicated) ==
          TxStatus::InsufficientSignatures);

    CHECK(f.chain.pulse_tx("neb", 1, digest, ts, leader.public_key, proofs) == TxStatus::Ok);
    CHECK(f.chain.pulse_tx("neb", 1, digest, ts, leader.public_key, proofs) ==
          TxStatus::DuplicateRound);
    CHECK(f.chain.conserved());
}

TEST_CASE("send_data_tx delivers, charges and credits the reward pool") {
    Fixture f;
    f.add_node("oracle-a");
    f.install_scores(80.0);
    f.make_nebula(1, 1, 0.0, 1);
    f.chain.register_user_contract("user-1", ContractKind::Data);
    f.chain.transfer(kReserveAccount, "user-1", 100);
    f.chain.subscribe("user-1", "neb", "onData", PayMode::Deposit);
    f.chain.deposit_subscription("user-1", "neb", 10);
    f.chain.advance_height();

    const Value value{std::int64_t{12345}};
    const Digest digest = value_digest(value);
    const auto ts = static_cast<std::int64_t>(f.chain.height());
    REQUIRE(f.chain.pulse_tx("neb", 1, digest, ts, f.leader_now().public_key,
                             f.sign_pulse(digest, ts, 1, 1)) == TxStatus::Ok);

    auto report = f.chain.send_data_tx("neb", 1, value, {"user-1"});
    CHECK(report.delivered() == 1);
    CHECK(f.chain.nebula("neb")->subscriptions.at("user-1").balance == 9);
    CHECK(f.chain.nebula("neb")->undistributed == 1);
    const auto& log = f.chain.user_contract("user-1")->received_log;
    REQUIRE(log.size() == 1);
    CHECK(log.front().value == value);
    CHECK(log.front().round == 1);

    // Tampered value: blocked by the digest gate, nothing charged.
    auto bad = f.chain.send_data_tx("neb", 1, Value{std::int64_t{999}}, {"user-1"});
    CHECK(bad.outcomes.front().status == TxStatus::HashMismatch);
    CHECK(f.chain.nebula("neb")->subscriptions.at("user-1").balance == 9);
    CHECK(f.chain.user_contract("user-1")->received_log.size() == 1);

    auto unsubscribed = f.chain.send_data_tx("neb", 1, value, {"someone-else"});
    CHECK(unsubscribed.outcomes.front().status == TxStatus::NotSubscribed);

    auto no_pulse = f.chain.send_data_tx("neb", 2, value, {"user-1"});
    CHECK(no_pulse.status == TxStatus::NoVerifiedPulse);
    CHECK(f.chain.conserved());
}

TEST_CASE("per-call subscriptions suspend on failed payment and reactivate") {
    Fixture f;
    f.add_node("oracle-a");
    f.install_scores(80.0);
    f.make_nebula(1, 1, 0.0, 5);
    f.chain.register_user_contract("payer", ContractKind::Data);
    f.chain.transfer(kReserveAccount, "payer", 7);
    f.chain.subscribe("payer", "neb", "onData", PayMode::PerCall);
    f.chain.advance_height();

    const Value value{std::int64_t{1}};
    const Digest digest = value_digest(value);
    const auto ts = static_cast<std::int64_t>(f.chain.height());
    REQUIRE(f.chain.pulse_tx("neb", 1, digest, ts, f.leader_now().public_key,
                             f.sign_pulse(digest, ts, 1, 1)) == TxStatus::Ok);

    CHECK(f.chain.send_data_tx("neb", 1, value, {"payer"}).delivered() == 1);
    CHECK(f.chain.balance("payer") == 2);

    f.chain.advance_height();
    const auto ts2 = static_cast<std::int64_t>(f.chain.height());
    REQUIRE(f.chain.pulse_tx("neb", 2, digest, ts2, f.leader_now().public_key,
                             f.sign_pulse(digest, ts2, 2, 1)) == TxStatus::Ok);
    auto failed = f.chain.send_data_tx("neb", 2, value, {"payer"});
    CHECK(failed.outcomes.front().status == TxStatus::PaymentFailed);
    CHECK(failed.outcomes.front().suspended_now);
    CHECK_FALSE(f.chain.nebula("neb")->subscriptions.at("payer").active);

    // Still suspended: delivery is refused even with funds present.
    f.chain.transfer(kReserveAccount, "payer", 100);
    auto refused = f.chain.send_data_tx("neb", 2, value, {"payer"});
    CHECK(refused.outcomes.front().status == TxStatus::PaymentFailed);

    CHECK(f.chain.reactivate("payer", "neb") == TxStatus::Ok);
    CHECK(f.chain.send_data_tx("neb", 2, value, {"payer"}).delivered() == 1);
    CHECK(f.chain.conserved());
}

TEST_CASE("trigger contracts are invoked without a value") {
    Fixture f;
    f.add_node("oracle-a");
    f.install_scores(80.0);
    f.make_nebula(1, 1, 0.0, 1);
    f.chain.register_user_contract("trigger-1", ContractKind::Trigger);
    f.chain.transfer(kReserveAccount, "trigger-1", 10);
    f.chain.subscribe("trigger-1", "neb", "poke", PayMode::PerCall);
    f.chain.advance_height();

    const Value value{std::int64_t{777}};
    const Digest digest = value_digest(value);
    const auto ts = static_cast<std::int64_t>(f.chain.height());
    REQUIRE(f.chain.pulse_tx("neb", 1, digest, ts, f.leader_now().public_key,
                             f.sign_pulse(digest, ts, 1, 1)) == TxStatus::Ok);
    CHECK(f.chain.send_data_tx("neb", 1, value, {"trigger-1"}).delivered() == 1);
    const auto& log = f.chain.user_contract("trigger-1")->received_log;
    REQUIRE(log.size() == 1);
    CHECK_FALSE(log.front().value.has_value());
}

TEST_CASE("write_scores requires a consul and replaces the register atomically") {
    Fixture f;
    f.add_node("consul");
    f.add_node("pleb");
    f.chain.seed_consuls({"consul"});

    CHECK(f.chain.write_scores("pleb", {{"pleb", 100.0}}) == TxStatus::NotConsul);
    CHECK(f.chain.write_scores("consul", {{"pleb", 60.0}, {"consul", 90.0}}) == TxStatus::Ok);
    CHECK(*f.chain.registered_score("pleb") == 60.0);
    CHECK(*f.chain.registered_score("consul") == 90.0);

    // Register replacement drops stale entries.
    CHECK(f.chain.write_scores("consul", {{"consul", 95.0}}) == TxStatus::Ok);
    CHECK_FALSE(f.chain.registered_score("pleb").has_value());
}

TEST_CASE("score registers stay identical across chains after the same write") {
    TargetChain a{small_config()};
    ChainConfig cfg_b = small_config();
    cfg_b.chain_id = "beta";
    TargetChain b{cfg_b};
    for (TargetChain* chain : {&a, &b}) {
        chain->transfer(kReserveAccount, "consul", 100);
        DeterministicRng rng(5);
        chain->register_node("consul", keypair_from_seed(rng.next_block()).public_key, 10);
        chain->seed_consuls({"consul"});
    }
    const std::vector<GravityScore> scores = {{"x", 10.0}, {"consul", 90.0}};
    CHECK(a.write_scores("consul", scores) == TxStatus::Ok);
    CHECK(b.write_scores("consul", scores) == TxStatus::Ok);
    REQUIRE(a.score_register().size() == b.score_register().size());
    for (std::size_t i = 0; i < a.score_register().size(); ++i) {
        CHECK(a.score_register()[i].node_id == b.score_register()[i].node_id);
        CHECK(a.score_register()[i].score == b.score_register()[i].score);
    }
}

TEST_CASE("withdrawals move credited rewards exactly once") {
    Fixture f;
    f.add_node("oracle-a");
    f.install_scores(80.0);
    f.make_nebula(1, 1, 0.0, 12);
    f.chain.register_user_contract("user-1", ContractKind::Data);
    f.chain.transfer(kReserveAccount, "user-1", 12);
    f.chain.subscribe("user-1", "neb", "onData", PayMode::Deposit);
    f.chain.deposit_subscription("user-1", "neb", 12);
    f.chain.advance_height();

    const Value value{std::int64_t{5}};
    const Digest digest = value_digest(value);
    const auto ts = static_cast<std::int64_t>(f.chain.height());
    REQUIRE(f.chain.pulse_tx("neb", 1, digest, ts, f.leader_now().public_key,
                             f.sign_pulse(digest, ts, 1, 1)) == TxStatus::Ok);
    REQUIRE(f.chain.send_data_tx("neb", 1, value, {"user-1"}).delivered() == 1);
    CHECK(f.chain.nebula("neb")->undistributed == 12);

    CHECK(f.chain.credit_withdrawable("neb", "oracle-a", 12) == TxStatus::Ok);
    const std::int64_t before = f.chain.balance("oracle-a");
    CHECK(f.chain.withdraw("oracle-a", "neb") == TxStatus::Ok);
    CHECK(f.chain.balance("oracle-a") == before + 12);
    CHECK(f.chain.withdraw("oracle-a", "neb") == TxStatus::NothingToWithdraw);
    CHECK(f.chain.withdraw("stranger", "neb") == TxStatus::NothingToWithdraw);
    CHECK(f.chain.conserved());
}
