// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/rng.hpp"

#include "gravity/canonical.hpp"
#include "gravity/crypto.hpp"

namespace gravity {

DeterministicRng DeterministicRng::fork(const std::string& label) const {
    Bytes preimage = CanonicalWriter{}.add_u64(state_).add_str(label).take();
    Digest d = hash_bytes(preimage);
    std::uint64_t child = 0;
    for (int i = 0; i < 8; ++i) {
        child = (child << 8) | d.bytes[static_cast<std::size_t>(i)];
    }
    return DeterministicRng(child);
}

std::uint64_t DeterministicRng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t DeterministicRng::next_below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("next_below: zero bound");
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v = next_u64();
    while (v >= limit) {
        v = next_u64();
    }
    return v % bound;
}

void DeterministicRng::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t v = next_u64();
        for (int shift = 56; shift >= 0 && i < out.size(); shift -= 8) {
            out[i++] = static_cast<std::uint8_t>((v >> shift) & 0xFF);
        }
    }
}

std::array<std::uint8_t, 32> DeterministicRng::next_block() {
    std::array<std::uint8_t, 32> out{};
    fill(out);
    return out;
}

} // namespace gravity
