// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/ledger.hpp"

#include <algorithm>

#include "gravity/canonical.hpp"

namespace gravity {

std::string to_string(MessageKind kind) {
    switch (kind) {
    case MessageKind::Commit: return "commit";
    case MessageKind::Reveal: return "reveal";
    case MessageKind::AggSignature: return "agg-signature";
    case MessageKind::ScoreUpdate: return "score-update";
    }
    return "?";
}

std::string to_string(SubmitResult r) {
    switch (r) {
    case SubmitResult::Accepted: return "accepted";
    case SubmitResult::BadSignature: return "bad-signature";
    case SubmitResult::UnknownAuthor: return "unknown-author";
    case SubmitResult::Duplicate: return "duplicate";
    }
    return "?";
}

Bytes LedgerMessage::signing_bytes() const {
    return CanonicalWriter{}.add_i64(static_cast<std::int64_t>(kind)).add_bytes(payload).take();
}

Digest LedgerMessage::digest() const {
    CanonicalWriter w;
    w.add_i64(static_cast<std::int64_t>(kind));
    w.add_bytes(author);
    w.add_bytes(payload);
    return hash_bytes(w.bytes());
}

LedgerMessage make_message(MessageKind kind, const KeyPair& idl_key, Bytes payload) {
    LedgerMessage msg;
    msg.kind = kind;
    msg.author = idl_key.public_key;
    msg.payload = std::move(payload);
    msg.author_signature = sign_message(idl_key, msg.signing_bytes());
    return msg;
}

bool verify_message(const LedgerMessage& msg) {
    return msg.author_signature.signer == msg.author &&
           verify_proof(msg.author_signature, msg.signing_bytes());
}

Bytes encode_commitment(const Commitment& c) {
    CanonicalWriter w;
    w.add_bytes(c.digest.bytes);
    w.add_str(c.feed_id);
    w.add_i64(c.round);
    w.add_bytes(c.author);
    return w.take();
}

Commitment decode_commitment(const Bytes& payload) {
    CanonicalReader r(payload);
    Commitment c;
    Bytes digest = r.read_bytes();
    if (digest.size() != kDigestSize) {
        throw DecodeError("commitment digest must be 32 bytes");
    }
    std::copy(digest.begin(), digest.end(), c.digest.bytes.begin());
    c.feed_id = r.read_str();
    c.round = r.read_i64();
    c.author = r.read_bytes();
    r.expect_done();
    return c;
}

Bytes encode_reveal(const Reveal& r) {
    CanonicalWriter w;
    w.add_value(r.value);
    w.add_bytes(r.salt);
    w.add_str(r.feed_id);
    w.add_i64(r.round);
    w.add_bytes(r.author);
    return w.take();
}

Reveal decode_reveal(const Bytes& payload) {
    CanonicalReader r(payload);
    Reveal out;
    out.value = r.read_value();
    Bytes salt = r.read_bytes();
    if (salt.size() != kSaltSize) {
        throw DecodeError("reveal salt must be 32 bytes");
    }
    std::copy(salt.begin(), salt.end(), out.salt.begin());
    out.feed_id = r.read_str();
    out.round = r.read_i64();
    out.author = r.read_bytes();
    r.expect_done();
    return out;
}

Bytes encode_agg_signature(const AggSignaturePayload& p) {
    CanonicalWriter w;
    w.add_bytes(p.agg_digest.bytes);
    w.add_i64(p.timestamp);
    w.add_str(p.feed_id);
    w.add_str(p.nebula_id);
    w.add_i64(p.round);
    w.add_bytes(p.proof.signature);
    w.add_bytes(p.proof.signer);
    return w.take();
}

AggSignaturePayload decode_agg_signature(const Bytes& payload) {
    CanonicalReader r(payload);
    AggSignaturePayload p;
    Bytes digest = r.read_bytes();
    if (digest.size() != kDigestSize) {
        throw DecodeError("aggregate digest must be 32 bytes");
    }
    std::copy(digest.begin(), digest.end(), p.agg_digest.bytes.begin());
    p.timestamp = r.read_i64();
    p.feed_id = r.read_str();
    p.nebula_id = r.read_str();
    p.round = r.read_i64();
    p.proof.signature = r.read_bytes();
    p.proof.signer = r.read_bytes();
    r.expect_done();
    return p;
}

Bytes encode_score_update(const ScoreUpdatePayload& p) {
    CanonicalWriter w;
    w.add_str(p.ratee);
    w.add_f64(p.value);
    w.add_i64(p.mode == ScoreMode::Manual ? 1 : 0);
    w.add_i64(p.tick);
    return w.take();
}

ScoreUpdatePayload decode_score_update(const Bytes& payload) {
    CanonicalReader r(payload);
    ScoreUpdatePayload p;
    p.ratee = r.read_str();
    p.value = r.read_f64();
    p.mode = r.read_i64() == 1 ? ScoreMode::Manual : ScoreMode::Automatic;
    p.tick = r.read_i64();
    r.expect_done();
    return p;
}

bool ConsulSet::contains(const NodeId& id) const {
    return std::find(members.begin(), members.end(), id) != members.end();
}

Bytes LedgerBlock::canonical_bytes() const {
    CanonicalWriter w;
    w.add_u64(height);
    w.add_bytes(parent_digest.bytes);
    w.add_bytes(proposer);
    w.add_u64(messages.size());
    for (const auto& msg : messages) {
        w.add_i64(static_cast<std::int64_t>(msg.kind));
        w.add_bytes(msg.author);
        w.add_bytes(msg.payload);
        w.add_bytes(msg.author_signature.signature);
    }
    return w.take();
}

Digest LedgerBlock::digest() const {
    return hash_bytes(canonical_bytes());
}

void Ledger::register_author(const NodeId& node_id, const Bytes& idl_public_key) {
    authors_[idl_public_key] = node_id;
}

bool Ledger::is_registered_author(const Bytes& idl_public_key) const {
    return authors_.count(idl_public_key) != 0;
}

std::optional<NodeId> Ledger::author_of(const Bytes& idl_public_key) const {
    auto it = authors_.find(idl_public_key);
    if (it == authors_.end()) {
        return std::nullopt;
    }
    return it->second;
}

SubmitResult Ledger::submit(const LedgerMessage& msg) {
    if (!authors_.count(msg.author)) {
        return SubmitResult::UnknownAuthor;
    }
    if (!verify_message(msg)) {
        return SubmitResult::BadSignature;
    }
    const Digest d = msg.digest();
    if (seen_.count(d)) {
        return SubmitResult::Duplicate;
    }
    seen_.insert(d);
    pending_.push_back({msg, d});
    return SubmitResult::Accepted;
}

Ledger::FinalizeOutcome Ledger::finalize_block(std::uint64_t tick, const ConsulSigner& signer) {
    FinalizeOutcome outcome;
    if (consuls_.members.empty()) {
        throw std::logic_error("ledger has no consul set");
    }
    const std::size_t m = consuls_.members.size();
    outcome.quorum = quorum_for(m);
    outcome.height = blocks_.size();

    LedgerBlock block;
    block.height = outcome.height;
    block.parent_digest = blocks_.empty() ? Digest{} : blocks_.back().digest();

    const NodeId& proposer_id = consuls_.members[tick % m];
    outcome.proposer = proposer_id;
    for (const auto& [pk, id] : authors_) {
        if (id == proposer_id) {
            block.proposer = pk;
            break;
        }
    }

    std::sort(pending_.begin(), pending_.end(), [](const PendingEntry& a, const PendingEntry& b) {
        if (a.msg.author != b.msg.author) {
            return a.msg.author < b.msg.author;
        }
        return a.digest < b.digest;
    });
    for (const auto& entry : pending_) {
        block.messages.push_back(entry.msg);
    }

    const Digest block_digest = block.digest();
    // The proposal itself needs a live proposer; a withholding proposer
    // cannot be signed around without view changes, which are out of scope.
    auto proposer_proof = signer(proposer_id, block_digest);
    if (!proposer_proof) {
        return outcome;
    }
    for (const NodeId& consul : consuls_.members) {
        if (consul == proposer_id) {
            block.finality_proofs.push_back(*proposer_proof);
            continue;
        }
        if (auto proof = signer(consul, block_digest)) {
            block.finality_proofs.push_back(*proof);
        }
    }
    outcome.proofs = block.finality_proofs.size();
    if (outcome.proofs < outcome.quorum) {
        return outcome; // NoQuorum: messages stay pending
    }

    outcome.finalized = true;
    for (const auto& msg : block.messages) {
        finalized_.push_back(msg);
        finalized_index_.push_back(index_message(msg));
    }
    blocks_.push_back(std::move(block));
    pending_.clear();
    return outcome;
}

Digest Ledger::head_digest() const {
    return blocks_.empty() ? Digest{} : blocks_.back().digest();
}

Ledger::IndexKey Ledger::index_message(const LedgerMessage& msg) {
    IndexKey key;
    try {
        switch (msg.kind) {
        case MessageKind::Commit: {
            Commitment c = decode_commitment(msg.payload);
            key.feed = c.feed_id;
            key.round = c.round;
            break;
        }
        case MessageKind::Reveal: {
            Reveal r = decode_reveal(msg.payload);
            key.feed = r.feed_id;
            key.round = r.round;
            break;
        }
        case MessageKind::AggSignature: {
            AggSignaturePayload p = decode_agg_signature(msg.payload);
            key.feed = p.feed_id;
            key.round = p.round;
            break;
        }
        case MessageKind::ScoreUpdate:
            break;
        }
    } catch (const DecodeError&) {
        // Undecodable payloads stay unfiltered; readers never see them
        // through feed/round queries.
    }
    return key;
}

std::vector<LedgerMessage> Ledger::read_messages(MessageKind kind, const FeedId& feed_id,
                                                 std::int64_t round) const {
    std::vector<LedgerMessage> out;
    for (std::size_t i = 0; i < finalized_.size(); ++i) {
        const auto& msg = finalized_[i];
        const auto& key = finalized_index_[i];
        if (msg.kind == kind && key.feed == feed_id && key.round == round) {
            out.push_back(msg);
        }
    }
    return out;
}

std::vector<LedgerMessage> Ledger::read_kind(MessageKind kind) const {
    std::vector<LedgerMessage> out;
    for (const auto& msg : finalized_) {
        if (msg.kind == kind) {
            out.push_back(msg);
        }
    }
    return out;
}

Ledger::RotationOutcome Ledger::rotate_consuls(const std::vector<GravityScore>& scores,
                                               std::size_t m) {
    RotationOutcome outcome;
    if (scores.size() < m) {
        if (consuls_.members.empty()) {
            // Bootstrap: take everyone available rather than deadlock.
            std::vector<GravityScore> sorted = scores;
            std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
                if (a.score != b.score) {
                    return a.score > b.score;
                }
                return a.node_id < b.node_id;
            });
            for (const auto& s : sorted) {
                consuls_.members.push_back(s.node_id);
            }
            outcome.set = consuls_;
            return outcome;
        }
        outcome.set = consuls_;
        outcome.kept_previous = true;
        return outcome;
    }
    std::vector<GravityScore> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.node_id < b.node_id;
    });
    ConsulSet next;
    for (std::size_t i = 0; i < m; ++i) {
        next.members.push_back(sorted[i].node_id);
    }
    consuls_ = next;
    outcome.set = std::move(next);
    return outcome;
}

void Ledger::dump(std::ostream& out) const {
    for (const auto& block : blocks_) {
        out << block.height << ' ' << block.digest().hex() << ' ' << to_hex(block.proposer) << ' '
            << block.messages.size();
        for (const auto& msg : block.messages) {
            out << ' ' << msg.digest().hex();
        }
        out << '\n';
    }
}

} // namespace gravity
