// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "gravity/canonical.hpp"

namespace gravity {
namespace {

void ensure_sodium() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
    });
}

Bytes commitment_preimage(const FeedId& feed_id, std::int64_t round, const Value& value,
                          std::span<const std::uint8_t> salt) {
    CanonicalWriter w;
    w.add_str(feed_id);
    w.add_i64(round);
    w.add_value(value);
    w.add_bytes(salt);
    return w.take();
}

} // namespace

Digest hash_bytes(std::span<const std::uint8_t> data) {
    ensure_sodium();
    Digest out;
    crypto_hash_sha256(out.bytes.data(), data.data(), data.size());
    return out;
}

KeyPair keypair_from_seed(const std::array<std::uint8_t, 32>& seed) {
    ensure_sodium();
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
    return kp;
}

Proof sign_message(const KeyPair& key, std::span<const std::uint8_t> message) {
    ensure_sodium();
    if (key.secret_key.size() != crypto_sign_SECRETKEYBYTES) {
        throw std::invalid_argument("malformed secret key");
    }
    Proof proof;
    proof.signature.resize(crypto_sign_BYTES);
    proof.signer = key.public_key;
    crypto_sign_detached(proof.signature.data(), nullptr, message.data(), message.size(),
                         key.secret_key.data());
    return proof;
}

bool verify_proof(const Proof& proof, std::span<const std::uint8_t> message) {
    ensure_sodium();
    if (proof.signature.size() != crypto_sign_BYTES || proof.signer.size() != crypto_sign_PUBLICKEYBYTES) {
        return false;
    }
    return crypto_sign_verify_detached(proof.signature.data(), message.data(), message.size(),
                                       proof.signer.data()) == 0;
}

Commitment make_commitment(const FeedId& feed_id, std::int64_t round, const Value& value,
                           std::span<const std::uint8_t> salt, const Bytes& author) {
    if (salt.size() != kSaltSize) {
        throw std::invalid_argument("salt must be exactly 32 bytes");
    }
    Commitment c;
    c.digest = hash_bytes(commitment_preimage(feed_id, round, value, salt));
    c.feed_id = feed_id;
    c.round = round;
    c.author = author;
    return c;
}

RevealCheck open_reveal(const Commitment& commitment, const Reveal& reveal) {
    if (commitment.feed_id != reveal.feed_id || commitment.round != reveal.round ||
        commitment.author != reveal.author) {
        throw MismatchedContext("commitment and reveal refer to different (feed, round, author)");
    }
    Digest recomputed =
        hash_bytes(commitment_preimage(reveal.feed_id, reveal.round, reveal.value, reveal.salt));
    return recomputed == commitment.digest ? RevealCheck::Valid : RevealCheck::Fraudulent;
}

} // namespace gravity
