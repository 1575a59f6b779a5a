// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gravity/common.hpp"

namespace gravity {

// Exact base-10 fixed-point value: units / 10^scale. All merge arithmetic
// stays in integers so every platform floors to the same output.
struct Decimal {
    std::int64_t units = 0;
    std::int32_t scale = 0;

    static Decimal parse(const std::string& text);
    static Decimal from_int(std::int64_t v) { return Decimal{v, 0}; }
    std::string str() const;

    bool operator==(const Decimal& other) const;
    bool operator<(const Decimal& other) const;
};

struct SourceRef {
    std::string source_id;
    bool mandatory = false;
};

enum class OutputType { Integer, Text };

// What a data feed is: where the points come from, how they merge, and the
// decimal-to-integer transform applied before on-chain delivery.
struct FeedSpec {
    FeedId feed_id;
    std::vector<SourceRef> sources;
    AggRule merge_rule = AggRule::Median;  // across this node's raw source points
    AggRule aggregation = AggRule::Median; // across peer reveals in a pulse
    std::int32_t scale_pow10 = 0; // output = floor(merged * 10^scale_pow10)
    OutputType output = OutputType::Integer;

    bool has_source(const std::string& source_id) const;
    std::vector<std::string> mandatory_sources() const;
};

using RawPoint = std::variant<Decimal, std::string>;

// Scripted stand-in for an external data API. value(t) = base + step * t,
// with optional per-tick overrides; text sources use the overrides map with
// a default literal. The fault plan makes individual ticks silent, delayed
// (equivalent to missing the tick) or wrong-valued.
struct MockSource {
    std::string source_id;
    OutputType kind = OutputType::Integer;
    Decimal base;
    Decimal step;
    std::map<std::uint64_t, std::string> overrides;
    std::string text_default;

    std::set<std::uint64_t> silent_ticks;
    std::set<std::uint64_t> delayed_ticks;
    std::map<std::uint64_t, std::string> wrong_value;

    std::optional<RawPoint> sample(std::uint64_t tick) const;
};

class SourceBook {
public:
    void add(MockSource source);
    bool contains(const std::string& source_id) const;
    const MockSource& get(const std::string& source_id) const;

private:
    std::map<std::string, MockSource> sources_;
};

struct DataPoint {
    FeedId feed_id;
    std::uint64_t tick = 0;
    Value value;
};

struct ExtractResult {
    bool ok = false;
    DataPoint point;
    std::string error;

    static ExtractResult failure(std::string why) { return {false, {}, std::move(why)}; }
};

// Pure function of (spec, scripts, fault plan, tick). bound_sources is the
// subset of the spec's sources this node's extractor implementation uses; a
// silent mandatory source fails the extraction, a silent recommended source
// just drops out of the merge.
ExtractResult extract(const FeedSpec& spec, const SourceBook& book,
                      const std::vector<std::string>& bound_sources, std::uint64_t tick);

// Exposed for the transform-correctness oracle: floor(points merged by rule,
// scaled by 10^pow10) in exact integer arithmetic.
std::int64_t merge_and_scale(std::vector<Decimal> points, AggRule rule, std::int32_t pow10);

} // namespace gravity
