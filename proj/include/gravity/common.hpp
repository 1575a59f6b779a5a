// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gravity {

using Bytes = std::vector<std::uint8_t>;

using NodeId = std::string;
using ChainId = std::string;
using FeedId = std::string;
using NebulaId = std::string;

// Data-feed value as it travels through commit/reveal and on-chain delivery.
// variant ordering (int before string) is also the cross-type sort order.
using Value = std::variant<std::int64_t, std::string>;

// Numerical transformation applied to a multiset of points, both for
// extractor source merging and for peer-reveal aggregation.
enum class AggRule { Median, Average, Mode };

std::string to_string(AggRule rule);
AggRule agg_rule_from_string(const std::string& name);

std::string value_to_string(const Value& v);

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(const std::string& hex);

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

} // namespace gravity
