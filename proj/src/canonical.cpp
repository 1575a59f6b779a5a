// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/canonical.hpp"

#include <bit>
#include <cstring>
#include <limits>

namespace gravity {
namespace {

void append_u32_be(std::uint32_t v, Bytes& out) {
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void append_u64_be(std::uint64_t v, Bytes& out) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
    }
}

std::uint64_t load_u64_be(std::span<const std::uint8_t> b) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v = (v << 8) | b[static_cast<std::size_t>(i)];
    }
    return v;
}

} // namespace

CanonicalWriter& CanonicalWriter::add_bytes(std::span<const std::uint8_t> field) {
    if (field.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("canonical field exceeds u32 length");
    }
    append_u32_be(static_cast<std::uint32_t>(field.size()), out_);
    out_.insert(out_.end(), field.begin(), field.end());
    return *this;
}

CanonicalWriter& CanonicalWriter::add_str(std::string_view field) {
    return add_bytes({reinterpret_cast<const std::uint8_t*>(field.data()), field.size()});
}

CanonicalWriter& CanonicalWriter::add_i64(std::int64_t field) {
    return add_u64(static_cast<std::uint64_t>(field));
}

CanonicalWriter& CanonicalWriter::add_u64(std::uint64_t field) {
    append_u32_be(8, out_);
    append_u64_be(field, out_);
    return *this;
}

CanonicalWriter& CanonicalWriter::add_f64(double field) {
    return add_u64(std::bit_cast<std::uint64_t>(field));
}

CanonicalWriter& CanonicalWriter::add_value(const Value& field) {
    if (const auto* i = std::get_if<std::int64_t>(&field)) {
        add_i64(0);
        add_i64(*i);
    } else {
        add_i64(1);
        add_str(std::get<std::string>(field));
    }
    return *this;
}

std::span<const std::uint8_t> CanonicalReader::next_field() {
    if (pos_ + 4 > data_.size()) {
        throw DecodeError("truncated field length");
    }
    std::uint32_t len = (static_cast<std::uint32_t>(data_[pos_]) << 24) |
                        (static_cast<std::uint32_t>(data_[pos_ + 1]) << 16) |
                        (static_cast<std::uint32_t>(data_[pos_ + 2]) << 8) |
                        static_cast<std::uint32_t>(data_[pos_ + 3]);
    pos_ += 4;
    if (pos_ + len > data_.size()) {
        throw DecodeError("truncated field body");
    }
    auto field = data_.subspan(pos_, len);
    pos_ += len;
    return field;
}

Bytes CanonicalReader::read_bytes() {
    auto f = next_field();
    return Bytes(f.begin(), f.end());
}

std::string CanonicalReader::read_str() {
    auto f = next_field();
    return std::string(f.begin(), f.end());
}

std::int64_t CanonicalReader::read_i64() {
    return static_cast<std::int64_t>(read_u64());
}

std::uint64_t CanonicalReader::read_u64() {
    auto f = next_field();
    if (f.size() != 8) {
        throw DecodeError("integer field must be 8 bytes");
    }
    return load_u64_be(f);
}

double CanonicalReader::read_f64() {
    return std::bit_cast<double>(read_u64());
}

Value CanonicalReader::read_value() {
    std::int64_t tag = read_i64();
    if (tag == 0) {
        return Value{read_i64()};
    }
    if (tag == 1) {
        return Value{read_str()};
    }
    throw DecodeError("unknown value tag");
}

void CanonicalReader::expect_done() const {
    if (!done()) {
        throw DecodeError("trailing bytes after payload");
    }
}

} // namespace gravity
