// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "gravity/common.hpp"

namespace gravity {

// Canonical byte encoding shared by every place a hash or signature is
// computed: each field is a 4-byte big-endian length followed by the raw
// bytes. Integers are 8-byte big-endian two's complement, strings UTF-8,
// reals the 8-byte big-endian IEEE-754 bit pattern. On-chain and off-chain
// code must hash identical bytes, so nothing else may serialize payloads.
class CanonicalWriter {
public:
    CanonicalWriter& add_bytes(std::span<const std::uint8_t> field);
    CanonicalWriter& add_str(std::string_view field);
    CanonicalWriter& add_i64(std::int64_t field);
    CanonicalWriter& add_u64(std::uint64_t field);
    CanonicalWriter& add_f64(double field);
    CanonicalWriter& add_value(const Value& field);

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// Mirror of CanonicalWriter; throws DecodeError on truncated or trailing
// input so malformed payloads never parse silently.
class CanonicalReader {
public:
    explicit CanonicalReader(std::span<const std::uint8_t> data) : data_(data) {}

    Bytes read_bytes();
    std::string read_str();
    std::int64_t read_i64();
    std::uint64_t read_u64();
    double read_f64();
    Value read_value();

    bool done() const { return pos_ == data_.size(); }
    void expect_done() const;

private:
    std::span<const std::uint8_t> next_field();

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace gravity
