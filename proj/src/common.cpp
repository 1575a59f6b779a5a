// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/common.hpp"

#include <stdexcept>

namespace gravity {

std::string to_string(AggRule rule) {
    switch (rule) {
    case AggRule::Median: return "median";
    case AggRule::Average: return "average";
    case AggRule::Mode: return "mode";
    }
    return "?";
}

AggRule agg_rule_from_string(const std::string& name) {
    if (name == "median") return AggRule::Median;
    if (name == "average") return AggRule::Average;
    if (name == "mode") return AggRule::Mode;
    throw std::invalid_argument("unknown aggregation rule: " + name);
}

std::string value_to_string(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return std::to_string(*i);
    }
    return std::get<std::string>(v);
}

std::string to_hex(std::span<const std::uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("invalid hex digit");
}

} // namespace

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) {
        throw std::invalid_argument("odd-length hex string");
    }
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((hex_nibble(hex[2 * i]) << 4) | hex_nibble(hex[2 * i + 1]));
    }
    return out;
}

} // namespace gravity
