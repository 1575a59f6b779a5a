// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/extractor.hpp"

#include <algorithm>
#include <stdexcept>

namespace gravity {
namespace {

using Int128 = __int128;

Int128 pow10_128(std::int32_t p) {
    Int128 v = 1;
    for (std::int32_t i = 0; i < p; ++i) {
        v *= 10;
    }
    return v;
}

std::int64_t floor_div_i128(Int128 num, Int128 den) {
    Int128 q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) {
        --q;
    }
    if (q > Int128(INT64_MAX) || q < Int128(INT64_MIN)) {
        throw std::overflow_error("merged value out of int64 range");
    }
    return static_cast<std::int64_t>(q);
}

// value as units * 10^(max_scale - scale), on the common denominator
// 10^max_scale.
Int128 rescaled_units(const Decimal& d, std::int32_t max_scale) {
    return Int128(d.units) * pow10_128(max_scale - d.scale);
}

} // namespace

Decimal Decimal::parse(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty decimal literal");
    }
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    std::int64_t units = 0;
    std::int32_t scale = 0;
    bool seen_digit = false;
    bool seen_dot = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c == '.') {
            if (seen_dot) {
                throw std::invalid_argument("malformed decimal literal: " + text);
            }
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') {
            throw std::invalid_argument("malformed decimal literal: " + text);
        }
        seen_digit = true;
        if (units > (INT64_MAX - 9) / 10) {
            throw std::overflow_error("decimal literal out of range: " + text);
        }
        units = units * 10 + (c - '0');
        if (seen_dot) {
            ++scale;
        }
    }
    if (!seen_digit) {
        throw std::invalid_argument("malformed decimal literal: " + text);
    }
    return Decimal{negative ? -units : units, scale};
}

std::string Decimal::str() const {
    if (scale == 0) {
        return std::to_string(units);
    }
    std::int64_t mag = units < 0 ? -units : units;
    std::string digits = std::to_string(mag);
    if (static_cast<std::int32_t>(digits.size()) <= scale) {
        digits.insert(0, static_cast<std::size_t>(scale) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
    return (units < 0 ? "-" : "") + digits;
}

bool Decimal::operator==(const Decimal& other) const {
    const std::int32_t ms = std::max(scale, other.scale);
    return rescaled_units(*this, ms) == rescaled_units(other, ms);
}

bool Decimal::operator<(const Decimal& other) const {
    const std::int32_t ms = std::max(scale, other.scale);
    return rescaled_units(*this, ms) < rescaled_units(other, ms);
}

bool FeedSpec::has_source(const std::string& source_id) const {
    return std::any_of(sources.begin(), sources.end(),
                       [&](const SourceRef& r) { return r.source_id == source_id; });
}

std::vector<std::string> FeedSpec::mandatory_sources() const {
    std::vector<std::string> out;
    for (const auto& r : sources) {
        if (r.mandatory) {
            out.push_back(r.source_id);
        }
    }
    return out;
}

std::optional<RawPoint> MockSource::sample(std::uint64_t tick) const {
    if (silent_ticks.count(tick) || delayed_ticks.count(tick)) {
        return std::nullopt;
    }
    if (auto it = wrong_value.find(tick); it != wrong_value.end()) {
        if (kind == OutputType::Text) {
            return RawPoint{it->second};
        }
        return RawPoint{Decimal::parse(it->second)};
    }
    if (kind == OutputType::Text) {
        if (auto it = overrides.find(tick); it != overrides.end()) {
            return RawPoint{it->second};
        }
        return RawPoint{text_default};
    }
    if (auto it = overrides.find(tick); it != overrides.end()) {
        return RawPoint{Decimal::parse(it->second)};
    }
    // base + step * tick, kept exact on the wider of the two scales.
    const std::int32_t ms = std::max(base.scale, step.scale);
    Int128 units = rescaled_units(base, ms) + rescaled_units(step, ms) * Int128(tick);
    if (units > Int128(INT64_MAX) || units < Int128(INT64_MIN)) {
        throw std::overflow_error("scripted source value out of range");
    }
    return RawPoint{Decimal{static_cast<std::int64_t>(units), ms}};
}

void SourceBook::add(MockSource source) {
    auto id = source.source_id;
    if (!sources_.emplace(std::move(id), std::move(source)).second) {
        throw std::invalid_argument("duplicate source id");
    }
}

bool SourceBook::contains(const std::string& source_id) const {
    return sources_.count(source_id) != 0;
}

const MockSource& SourceBook::get(const std::string& source_id) const {
    auto it = sources_.find(source_id);
    if (it == sources_.end()) {
        throw std::out_of_range("unknown source: " + source_id);
    }
    return it->second;
}

std::int64_t merge_and_scale(std::vector<Decimal> points, AggRule rule, std::int32_t pow10) {
    if (points.empty()) {
        throw std::invalid_argument("no points to merge");
    }
    if (pow10 < 0 || pow10 > 18) {
        throw std::invalid_argument("scale factor out of range");
    }
    std::int32_t ms = 0;
    for (const auto& p : points) {
        ms = std::max(ms, p.scale);
    }
    const Int128 den = pow10_128(ms);
    const Int128 mul = pow10_128(pow10);

    switch (rule) {
    case AggRule::Average: {
        Int128 sum = 0;
        for (const auto& p : points) {
            sum += rescaled_units(p, ms);
        }
        return floor_div_i128(sum * mul, den * Int128(points.size()));
    }
    case AggRule::Median: {
        std::sort(points.begin(), points.end());
        const Decimal& mid = points[(points.size() - 1) / 2]; // lower median
        return floor_div_i128(rescaled_units(mid, ms) * mul, den);
    }
    case AggRule::Mode: {
        std::sort(points.begin(), points.end());
        std::size_t best_count = 0;
        Decimal best = points.front();
        std::size_t i = 0;
        while (i < points.size()) {
            std::size_t j = i;
            while (j < points.size() && points[j] == points[i]) {
                ++j;
            }
            if (j - i > best_count) { // ties keep the smallest value
                best_count = j - i;
                best = points[i];
            }
            i = j;
        }
        return floor_div_i128(rescaled_units(best, ms) * mul, den);
    }
    }
    throw std::logic_error("unreachable merge rule");
}

ExtractResult extract(const FeedSpec& spec, const SourceBook& book,
                      const std::vector<std::string>& bound_sources, std::uint64_t tick) {
    std::vector<Decimal> numeric;
    std::vector<std::string> texts;
    for (const auto& source_id : bound_sources) {
        if (!spec.has_source(source_id)) {
            return ExtractResult::failure("source not in feed spec: " + source_id);
        }
        const MockSource& src = book.get(source_id);
        auto point = src.sample(tick);
        const bool mandatory = std::any_of(
            spec.sources.begin(), spec.sources.end(),
            [&](const SourceRef& r) { return r.source_id == source_id && r.mandatory; });
        if (!point) {
            if (mandatory) {
                return ExtractResult::failure("mandatory source silent: " + source_id);
            }
            continue;
        }
        if (const auto* d = std::get_if<Decimal>(&*point)) {
            numeric.push_back(*d);
        } else {
            texts.push_back(std::get<std::string>(*point));
        }
    }

    ExtractResult out;
    out.point.feed_id = spec.feed_id;
    out.point.tick = tick;
    if (spec.output == OutputType::Text) {
        if (texts.empty()) {
            return ExtractResult::failure("no responsive source produced a point");
        }
        std::sort(texts.begin(), texts.end());
        std::string picked;
        switch (spec.merge_rule) {
        case AggRule::Median:
            picked = texts[(texts.size() - 1) / 2];
            break;
        case AggRule::Mode: {
            std::size_t best_count = 0;
            std::size_t i = 0;
            while (i < texts.size()) {
                std::size_t j = i;
                while (j < texts.size() && texts[j] == texts[i]) {
                    ++j;
                }
                if (j - i > best_count) {
                    best_count = j - i;
                    picked = texts[i];
                }
                i = j;
            }
            break;
        }
        case AggRule::Average:
            return ExtractResult::failure("average is undefined for text feeds");
        }
        out.ok = true;
        out.point.value = Value{picked};
        return out;
    }

    if (numeric.empty()) {
        return ExtractResult::failure("no responsive source produced a point");
    }
    out.ok = true;
    out.point.value = Value{merge_and_scale(std::move(numeric), spec.merge_rule, spec.scale_pow10)};
    return out;
}

} // namespace gravity
