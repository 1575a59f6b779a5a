// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>

#include "gravity/common.hpp"

namespace gravity {

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kSaltSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;

// SHA-256 output. Equality is byte-wise; ordering enables map keys and
// deterministic sorts.
struct Digest {
    std::array<std::uint8_t, kDigestSize> bytes{};

    auto operator<=>(const Digest&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

Digest hash_bytes(std::span<const std::uint8_t> data);
inline Digest hash_bytes(const Bytes& data) {
    return hash_bytes(std::span<const std::uint8_t>(data));
}

struct KeyPair {
    Bytes public_key; // 32 bytes (Ed25519)
    Bytes secret_key; // 64 bytes (Ed25519 expanded)
};

// Deterministic key derivation: same 32-byte seed, same pair.
KeyPair keypair_from_seed(const std::array<std::uint8_t, 32>& seed);

// Detached signature plus the public key that claims to cover the message.
struct Proof {
    Bytes signature;
    Bytes signer;

    auto operator<=>(const Proof&) const = default;
};

Proof sign_message(const KeyPair& key, std::span<const std::uint8_t> message);
bool verify_proof(const Proof& proof, std::span<const std::uint8_t> message);

// Published hash binding (feed, round, value, salt) before the value is
// disclosed. The author keeps value and salt private until the reveal stage.
struct Commitment {
    Digest digest;
    FeedId feed_id;
    std::int64_t round = 0;
    Bytes author;
};

struct Reveal {
    Value value;
    std::array<std::uint8_t, kSaltSize> salt{};
    FeedId feed_id;
    std::int64_t round = 0;
    Bytes author;
};

Commitment make_commitment(const FeedId& feed_id, std::int64_t round, const Value& value,
                           std::span<const std::uint8_t> salt, const Bytes& author);

enum class RevealCheck { Valid, Fraudulent };

// Thrown when commitment and reveal do not even refer to the same
// (feed, round, author) context; distinct from a Fraudulent verdict.
class MismatchedContext : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

RevealCheck open_reveal(const Commitment& commitment, const Reveal& reveal);

} // namespace gravity
