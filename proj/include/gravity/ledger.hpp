// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "gravity/crypto.hpp"
#include "gravity/reputation.hpp"

namespace gravity {

enum class MessageKind : std::int64_t {
    Commit = 0,
    Reveal = 1,
    AggSignature = 2,
    ScoreUpdate = 3,
};

std::string to_string(MessageKind kind);

// One record on the internal message bus. The author signature covers
// (kind, payload) with the node's IDL key.
struct LedgerMessage {
    MessageKind kind = MessageKind::Commit;
    Bytes author;
    Bytes payload;
    Proof author_signature;

    Bytes signing_bytes() const;
    // Dedup identity: hash of (kind, author, payload). Signatures are
    // deterministic, so they carry no extra identity.
    Digest digest() const;
};

LedgerMessage make_message(MessageKind kind, const KeyPair& idl_key, Bytes payload);
bool verify_message(const LedgerMessage& msg);

// Aggregated-data signature as shared between peers: the inner proof is the
// one NEBULA-SC verifies, signed with the author's key on the target chain.
struct AggSignaturePayload {
    Digest agg_digest;
    std::int64_t timestamp = 0;
    FeedId feed_id;
    NebulaId nebula_id;
    std::int64_t round = 0;
    Proof proof;
};

struct ScoreUpdatePayload {
    NodeId ratee;
    double value = 0.0;
    ScoreMode mode = ScoreMode::Automatic;
    std::int64_t tick = 0; // emission time; distinguishes repeated re-ratings
};

Bytes encode_commitment(const Commitment& c);
Commitment decode_commitment(const Bytes& payload);
Bytes encode_reveal(const Reveal& r);
Reveal decode_reveal(const Bytes& payload);
Bytes encode_agg_signature(const AggSignaturePayload& p);
AggSignaturePayload decode_agg_signature(const Bytes& payload);
Bytes encode_score_update(const ScoreUpdatePayload& p);
ScoreUpdatePayload decode_score_update(const Bytes& payload);

enum class SubmitResult { Accepted, BadSignature, UnknownAuthor, Duplicate };

std::string to_string(SubmitResult r);

// Nodes with the highest Gravity scores; they finalize IDL blocks and write
// the score register to target chains.
struct ConsulSet {
    std::vector<NodeId> members;

    std::size_t size() const { return members.size(); }
    bool contains(const NodeId& id) const;
};

struct LedgerBlock {
    std::uint64_t height = 0;
    Digest parent_digest;
    std::vector<LedgerMessage> messages;
    Bytes proposer;
    std::vector<Proof> finality_proofs;

    Bytes canonical_bytes() const;
    Digest digest() const;
};

// The Internal Distributed Ledger: an append-only message bus finalized by
// consul quorum, floor(2M/3)+1 distinct signatures per block. Single logical
// writer (the simulation tick loop).
class Ledger {
public:
    void register_author(const NodeId& node_id, const Bytes& idl_public_key);
    bool is_registered_author(const Bytes& idl_public_key) const;
    std::optional<NodeId> author_of(const Bytes& idl_public_key) const;

    SubmitResult submit(const LedgerMessage& msg);

    // Produces nullopt for a consul node that withholds (fault injection);
    // honest consuls return a proof over the block digest.
    using ConsulSigner = std::function<std::optional<Proof>(const NodeId&, const Digest&)>;

    struct FinalizeOutcome {
        bool finalized = false;
        std::uint64_t height = 0;
        NodeId proposer;
        std::size_t proofs = 0;
        std::size_t quorum = 0;
    };

    static std::size_t quorum_for(std::size_t consul_count) { return consul_count * 2 / 3 + 1; }

    // One proposal per tick: proposer = consuls[tick mod M], so a dead
    // proposer costs one tick instead of halting the chain; pending messages
    // enter in (author, digest) order. On NoQuorum nothing is produced and
    // the pool is kept.
    FinalizeOutcome finalize_block(std::uint64_t tick, const ConsulSigner& signer);

    const std::vector<LedgerBlock>& blocks() const { return blocks_; }
    std::size_t pending_count() const { return pending_.size(); }
    Digest head_digest() const;

    // Finalized messages only, in block order.
    std::vector<LedgerMessage> read_messages(MessageKind kind, const FeedId& feed_id,
                                             std::int64_t round) const;
    std::vector<LedgerMessage> read_kind(MessageKind kind) const;

    // Top-M by (score desc, node id asc). With fewer than M scored nodes the
    // previous set is kept (a warning is reported through the outcome flag)
    // unless no set exists yet, in which case all nodes form the bootstrap
    // set.
    struct RotationOutcome {
        ConsulSet set;
        bool kept_previous = false;
    };
    RotationOutcome rotate_consuls(const std::vector<GravityScore>& scores, std::size_t m);
    const ConsulSet& consuls() const { return consuls_; }
    void seed_consuls(ConsulSet set) { consuls_ = std::move(set); }

    void dump(std::ostream& out) const;

private:
    struct PendingEntry {
        LedgerMessage msg;
        Digest digest;
    };

    struct IndexKey {
        std::optional<FeedId> feed;
        std::optional<std::int64_t> round;
    };

    static IndexKey index_message(const LedgerMessage& msg);

    std::map<Bytes, NodeId> authors_;
    std::vector<PendingEntry> pending_;
    std::set<Digest> seen_;
    std::vector<LedgerBlock> blocks_;
    std::vector<LedgerMessage> finalized_;  // flattened block order
    std::vector<IndexKey> finalized_index_; // aligned with finalized_
    ConsulSet consuls_;
};

} // namespace gravity
