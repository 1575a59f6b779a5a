// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "gravity/common.hpp"

namespace gravity {

// All randomness in a run flows from one scenario seed. Streams are forked
// by hashing (seed, label) so per-node sequences are stable under scenario
// edits, and outputs are raw splitmix64 words so byte streams are identical
// on every platform (std::uniform_* distributions are not portable).
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    // Child stream fully determined by (this seed, label).
    DeterministicRng fork(const std::string& label) const;

    std::uint64_t next_u64();
    // Unbiased value in [0, bound) via rejection sampling; bound > 0.
    std::uint64_t next_below(std::uint64_t bound);
    void fill(std::span<std::uint8_t> out);
    std::array<std::uint8_t, 32> next_block();

private:
    std::uint64_t seed_value() const { return state_; }

    std::uint64_t state_;
};

} // namespace gravity
