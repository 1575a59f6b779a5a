// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "gravity/canonical.hpp"
#include "gravity/ledger.hpp"
#include "gravity/rng.hpp"

using namespace gravity;

namespace {

struct TestNet {
    std::map<NodeId, KeyPair> keys;
    Ledger ledger;

    explicit TestNet(std::size_t node_count, std::size_t consul_count) {
        DeterministicRng rng(101);
        std::vector<GravityScore> scores;
        for (std::size_t i = 0; i < node_count; ++i) {
            NodeId id = "n" + std::to_string(i);
            keys.emplace(id, keypair_from_seed(rng.fork("k:" + id).next_block()));
            ledger.register_author(id, keys.at(id).public_key);
            scores.push_back({id, 100.0 - static_cast<double>(i)});
        }
        ledger.rotate_consuls(scores, consul_count);
    }

    LedgerMessage commit_from(const NodeId& node, const FeedId& feed, std::int64_t round,
                              std::int64_t value) {
        DeterministicRng rng(7000 + round);
        Commitment c = make_commitment(feed, round, Value{value}, rng.fork(node).next_block(),
                                       keys.at(node).public_key);
        return make_message(MessageKind::Commit, keys.at(node), encode_commitment(c));
    }

    Ledger::ConsulSigner honest_signer() {
        return [this](const NodeId& id, const Digest& digest) -> std::optional<Proof> {
            return sign_message(keys.at(id), digest.bytes);
        };
    }

    Ledger::ConsulSigner withholding_signer(std::set<NodeId> faulty) {
        return [this, faulty = std::move(faulty)](const NodeId& id,
                                                  const Digest& digest) -> std::optional<Proof> {
            if (faulty.count(id)) {
                return std::nullopt;
            }
            return sign_message(keys.at(id), digest.bytes);
        };
    }
};

} // namespace

TEST_CASE("quorum arithmetic is floor(2M/3)+1") {
    for (std::size_t m = 1; m <= 20; ++m) {
        CHECK(Ledger::quorum_for(m) == (2 * m) / 3 + 1);
    }
    CHECK(Ledger::quorum_for(5) == 4);
    CHECK(Ledger::quorum_for(11) == 8);
}

TEST_CASE("submit accepts registered authors once and rejects the rest") {
    TestNet net(3, 3);
    LedgerMessage msg = net.commit_from("n0", "feed", 1, 42);
    CHECK(net.ledger.submit(msg) == SubmitResult::Accepted);
    CHECK(net.ledger.submit(msg) == SubmitResult::Duplicate);

    LedgerMessage tampered = net.commit_from("n1", "feed", 1, 43);
    tampered.payload.push_back(0xFF);
    CHECK(net.ledger.submit(tampered) == SubmitResult::BadSignature);

    DeterministicRng rng(999);
    KeyPair stranger = keypair_from_seed(rng.next_block());
    Commitment c = make_commitment("feed", 1, Value{std::int64_t{7}}, rng.next_block(),
                                   stranger.public_key);
    LedgerMessage unknown = make_message(MessageKind::Commit, stranger, encode_commitment(c));
    CHECK(net.ledger.submit(unknown) == SubmitResult::UnknownAuthor);
}

TEST_CASE("finalize reaches quorum with honest consuls (M=5 -> 4 proofs)") {
    TestNet net(5, 5);
    for (int i = 0; i < 3; ++i) {
        net.ledger.submit(net.commit_from("n" + std::to_string(i), "feed", 1, i));
    }
    auto outcome = net.ledger.finalize_block(1, net.honest_signer());
    CHECK(outcome.finalized);
    CHECK(outcome.quorum == 4);
    CHECK(outcome.proofs == 5);
    CHECK(net.ledger.blocks().size() == 1);
    CHECK(net.ledger.blocks().front().messages.size() == 3);
    CHECK(net.ledger.pending_count() == 0);
}

TEST_CASE("two withholding consuls out of five block finalization") {
    TestNet net(5, 5);
    net.ledger.submit(net.commit_from("n0", "feed", 1, 1));
    auto outcome = net.ledger.finalize_block(1, net.withholding_signer({"n2", "n3"}));
    CHECK_FALSE(outcome.finalized);
    CHECK(net.ledger.blocks().empty());
    CHECK(net.ledger.pending_count() == 1); // messages stay pending

    // One faulty consul is tolerated: 4 of 5 proofs meet the quorum. Tick 3
    // puts an online consul in the proposer slot.
    auto retry = net.ledger.finalize_block(3, net.withholding_signer({"n2"}));
    CHECK(retry.finalized);
    CHECK(retry.proofs == 4);
    CHECK(net.ledger.blocks().front().messages.size() == 1);
}

TEST_CASE("empty pending pool still finalizes an empty block with consecutive heights") {
    TestNet net(4, 4);
    auto first = net.ledger.finalize_block(1, net.honest_signer());
    auto second = net.ledger.finalize_block(2, net.honest_signer());
    CHECK(first.finalized);
    CHECK(second.finalized);
    CHECK(net.ledger.blocks()[0].height == 0);
    CHECK(net.ledger.blocks()[1].height == 1);
    CHECK(net.ledger.blocks()[1].parent_digest == net.ledger.blocks()[0].digest());
}

TEST_CASE("proposer rotates by tick over the consul set") {
    TestNet net(3, 3);
    for (int i = 0; i < 6; ++i) {
        auto outcome = net.ledger.finalize_block(static_cast<std::uint64_t>(i), net.honest_signer());
        CHECK(outcome.proposer == net.ledger.consuls().members[i % 3]);
    }
    // A dead proposer blocks only its own slot, not the slots after it.
    auto stalled = net.ledger.finalize_block(6, net.withholding_signer({net.ledger.consuls().members[0]}));
    CHECK_FALSE(stalled.finalized);
    auto next = net.ledger.finalize_block(7, net.honest_signer());
    CHECK(next.finalized);
}

TEST_CASE("read_messages returns only finalized messages matching the filter") {
    TestNet net(5, 5);
    for (int i = 0; i < 8; ++i) {
        net.ledger.submit(net.commit_from("n" + std::to_string(i % 5), "feed", 1 + (i % 2), 10 + i));
    }
    // Nothing finalized yet.
    CHECK(net.ledger.read_messages(MessageKind::Commit, "feed", 1).empty());
    net.ledger.finalize_block(1, net.honest_signer());

    auto round1 = net.ledger.read_messages(MessageKind::Commit, "feed", 1);
    auto round2 = net.ledger.read_messages(MessageKind::Commit, "feed", 2);
    CHECK(round1.size() == 4);
    CHECK(round2.size() == 4);
    CHECK(net.ledger.read_messages(MessageKind::Commit, "feed", 3).empty());
    CHECK(net.ledger.read_messages(MessageKind::Reveal, "feed", 1).empty());

    // Finality is irreversible: the same read keeps returning them.
    net.ledger.finalize_block(2, net.honest_signer());
    CHECK(net.ledger.read_messages(MessageKind::Commit, "feed", 1).size() == 4);
}

TEST_CASE("blocks order messages by author then digest") {
    TestNet net(5, 5);
    net.ledger.submit(net.commit_from("n3", "feed", 1, 1));
    net.ledger.submit(net.commit_from("n1", "feed", 1, 2));
    net.ledger.submit(net.commit_from("n1", "feed", 2, 3));
    net.ledger.finalize_block(1, net.honest_signer());
    const auto& msgs = net.ledger.blocks().front().messages;
    REQUIRE(msgs.size() == 3);
    CHECK(msgs[0].author <= msgs[1].author);
    CHECK(msgs[1].author <= msgs[2].author);
    if (msgs[0].author == msgs[1].author) {
        CHECK(msgs[0].digest() < msgs[1].digest());
    }
}

TEST_CASE("consul rotation selects top scores with id tiebreak and keeps previous on shortfall") {
    TestNet net(6, 5);
    std::vector<GravityScore> scores = {{"n0", 100}, {"n1", 90}, {"n2", 80},
                                        {"n3", 70},  {"n4", 60}, {"n5", 50}};
    auto outcome = net.ledger.rotate_consuls(scores, 5);
    CHECK(outcome.set.members == std::vector<NodeId>{"n0", "n1", "n2", "n3", "n4"});

    // Tie at the boundary: lower node id wins the seat.
    scores[4].score = 50;
    outcome = net.ledger.rotate_consuls(scores, 5);
    CHECK(outcome.set.members == std::vector<NodeId>{"n0", "n1", "n2", "n3", "n4"});

    auto kept = net.ledger.rotate_consuls({{"n0", 1}, {"n1", 2}}, 5);
    CHECK(kept.kept_previous);
    CHECK(kept.set.members == outcome.set.members);
}

TEST_CASE("chain integrity: replaying blocks reproduces the head digest") {
    TestNet net(5, 5);
    for (int t = 0; t < 5; ++t) {
        net.ledger.submit(net.commit_from("n" + std::to_string(t), "feed", t + 1, t));
        net.ledger.finalize_block(static_cast<std::uint64_t>(t), net.honest_signer());
    }
    Digest parent{};
    for (const auto& block : net.ledger.blocks()) {
        CHECK(block.parent_digest == parent);
        for (const auto& proof : block.finality_proofs) {
            CHECK(verify_proof(proof, block.digest().bytes));
        }
        CHECK(block.finality_proofs.size() >= Ledger::quorum_for(5));
        parent = block.digest();
    }
    CHECK(parent == net.ledger.head_digest());
}

TEST_CASE("identical operation sequences give byte-identical dumps") {
    auto run_once = [] {
        TestNet net(5, 5);
        for (int t = 0; t < 4; ++t) {
            net.ledger.submit(net.commit_from("n1", "feed", t + 1, 7));
            net.ledger.submit(net.commit_from("n0", "feed", t + 1, 7));
            net.ledger.finalize_block(static_cast<std::uint64_t>(t), net.honest_signer());
        }
        std::ostringstream out;
        net.ledger.dump(out);
        return out.str();
    };
    CHECK(run_once() == run_once());
}

TEST_CASE("payload codecs round-trip") {
    DeterministicRng rng(61);
    KeyPair key = keypair_from_seed(rng.next_block());

    Commitment c = make_commitment("feed", 9, Value{std::string("text-point")}, rng.next_block(),
                                   key.public_key);
    Commitment c2 = decode_commitment(encode_commitment(c));
    CHECK(c2.digest == c.digest);
    CHECK(c2.feed_id == c.feed_id);
    CHECK(c2.round == c.round);
    CHECK(c2.author == c.author);

    Reveal r{Value{std::int64_t{-5}}, rng.next_block(), "feed", 9, key.public_key};
    Reveal r2 = decode_reveal(encode_reveal(r));
    CHECK(r2.value == r.value);
    CHECK(r2.salt == r.salt);

    AggSignaturePayload p;
    p.agg_digest = hash_bytes(to_bytes("x"));
    p.timestamp = 12;
    p.feed_id = "feed";
    p.nebula_id = "nebula";
    p.round = 9;
    p.proof = sign_message(key, to_bytes("payload"));
    AggSignaturePayload p2 = decode_agg_signature(encode_agg_signature(p));
    CHECK(p2.agg_digest == p.agg_digest);
    CHECK(p2.timestamp == p.timestamp);
    CHECK(p2.nebula_id == p.nebula_id);
    CHECK(p2.proof == p.proof);

    ScoreUpdatePayload s{"ratee-1", 7.5, ScoreMode::Manual, 33};
    ScoreUpdatePayload s2 = decode_score_update(encode_score_update(s));
    CHECK(s2.ratee == s.ratee);
    CHECK(s2.value == s.value);
    CHECK(s2.mode == s.mode);
    CHECK(s2.tick == s.tick);

    CHECK_THROWS_AS(decode_commitment(encode_reveal(r)), DecodeError);
}
