// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gravity/extractor.hpp"
#include "gravity/rng.hpp"

using namespace gravity;

namespace {

FeedSpec two_source_feed(AggRule merge, std::int32_t decimals) {
    FeedSpec spec;
    spec.feed_id = "pair";
    spec.sources = {{"a", true}, {"b", false}};
    spec.merge_rule = merge;
    spec.scale_pow10 = decimals;
    return spec;
}

MockSource constant_source(const std::string& id, const std::string& value) {
    MockSource src;
    src.source_id = id;
    src.base = Decimal::parse(value);
    return src;
}

// Oracle for the transform invariant: an explicit fraction type, reduced
// lazily, fully separate from the Decimal/i128 path in the implementation.
struct Fraction {
    long long num = 0;
    long long den = 1;

    static Fraction from_decimal(const Decimal& d) {
        long long den = 1;
        for (int i = 0; i < d.scale; ++i) {
            den *= 10;
        }
        return {d.units, den};
    }
    Fraction plus(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
    bool less(const Fraction& o) const { return num * o.den < o.num * den; }
    long long floor_times_pow10(int p) const {
        long long scaled = num;
        for (int i = 0; i < p; ++i) {
            scaled *= 10;
        }
        long long q = scaled / den;
        if (scaled % den != 0 && (scaled < 0) != (den < 0)) {
            --q;
        }
        return q;
    }
};

} // namespace

TEST_CASE("decimal parsing and printing") {
    CHECK(Decimal::parse("1.23").units == 123);
    CHECK(Decimal::parse("1.23").scale == 2);
    CHECK(Decimal::parse("-0.050").units == -50);
    CHECK(Decimal::parse("-0.050").scale == 3);
    CHECK(Decimal::parse("42").str() == "42");
    CHECK(Decimal::parse("1.230").str() == "1.230");
    CHECK(Decimal::parse("0.5") == Decimal::parse("0.50"));
    CHECK_FALSE(Decimal::parse("1.4") < Decimal::parse("1.25"));
    CHECK_THROWS_AS(Decimal::parse("1.2.3"), std::invalid_argument);
    CHECK_THROWS_AS(Decimal::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(Decimal::parse("abc"), std::invalid_argument);
}

TEST_CASE("average of 1.23 and 1.25 with two decimals is 124") {
    SourceBook book;
    book.add(constant_source("a", "1.23"));
    book.add(constant_source("b", "1.25"));
    auto result = extract(two_source_feed(AggRule::Average, 2), book, {"a", "b"}, 1);
    REQUIRE(result.ok);
    CHECK(std::get<std::int64_t>(result.point.value) == 124);
}

TEST_CASE("single source identity transform") {
    SourceBook book;
    book.add(constant_source("a", "42"));
    FeedSpec spec = two_source_feed(AggRule::Median, 0);
    auto result = extract(spec, book, {"a"}, 3);
    REQUIRE(result.ok);
    CHECK(std::get<std::int64_t>(result.point.value) == 42);
}

TEST_CASE("mandatory source silent fails, recommended silent proceeds") {
    SourceBook book;
    MockSource a = constant_source("a", "10.0");
    a.silent_ticks.insert(5);
    book.add(a);
    MockSource b = constant_source("b", "12.0");
    b.silent_ticks.insert(6);
    book.add(b);
    FeedSpec spec = two_source_feed(AggRule::Average, 0);

    auto silent_mandatory = extract(spec, book, {"a", "b"}, 5);
    CHECK_FALSE(silent_mandatory.ok);

    auto silent_recommended = extract(spec, book, {"a", "b"}, 6);
    REQUIRE(silent_recommended.ok);
    CHECK(std::get<std::int64_t>(silent_recommended.point.value) == 10);

    auto both_up = extract(spec, book, {"a", "b"}, 7);
    REQUIRE(both_up.ok);
    CHECK(std::get<std::int64_t>(both_up.point.value) == 11);
}

TEST_CASE("scripted sources follow base + step * tick with overrides and faults") {
    MockSource src;
    src.source_id = "s";
    src.base = Decimal::parse("100.00");
    src.step = Decimal::parse("0.5");
    src.overrides[4] = "777";
    src.wrong_value[6] = "1.0";
    src.delayed_ticks.insert(7);

    auto at = [&](std::uint64_t tick) { return std::get<Decimal>(*src.sample(tick)); };
    CHECK(at(0) == Decimal::parse("100.00"));
    CHECK(at(2) == Decimal::parse("101.00"));
    CHECK(at(4) == Decimal::parse("777"));
    CHECK(at(6) == Decimal::parse("1.0"));
    CHECK_FALSE(src.sample(7).has_value());
}

TEST_CASE("extraction is a pure function of (spec, scripts, tick)") {
    SourceBook book;
    book.add(constant_source("a", "3.14159"));
    book.add(constant_source("b", "2.71828"));
    FeedSpec spec = two_source_feed(AggRule::Median, 4);
    auto r1 = extract(spec, book, {"a", "b"}, 9);
    auto r2 = extract(spec, book, {"a", "b"}, 9);
    REQUIRE(r1.ok);
    REQUIRE(r2.ok);
    CHECK(r1.point.value == r2.point.value);
}

TEST_CASE("transform correctness against an independent fraction oracle") {
    DeterministicRng rng(53);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t count = 1 + rng.next_below(5);
        std::vector<Decimal> points;
        std::vector<Fraction> fractions;
        for (std::size_t i = 0; i < count; ++i) {
            Decimal d{static_cast<std::int64_t>(rng.next_below(200001)) - 100000,
                      static_cast<std::int32_t>(rng.next_below(4))};
            points.push_back(d);
            fractions.push_back(Fraction::from_decimal(d));
        }
        const auto pow10 = static_cast<std::int32_t>(rng.next_below(4));
        const AggRule rule = static_cast<AggRule>(rng.next_below(3));

        Fraction merged;
        switch (rule) {
        case AggRule::Average: {
            Fraction sum{0, 1};
            for (const auto& f : fractions) {
                sum = sum.plus(f);
            }
            merged = {sum.num, sum.den * static_cast<long long>(count)};
            break;
        }
        case AggRule::Median: {
            std::sort(fractions.begin(), fractions.end(),
                      [](const Fraction& x, const Fraction& y) { return x.less(y); });
            merged = fractions[(fractions.size() - 1) / 2];
            break;
        }
        case AggRule::Mode: {
            std::sort(fractions.begin(), fractions.end(),
                      [](const Fraction& x, const Fraction& y) { return x.less(y); });
            std::size_t best_len = 0;
            std::size_t i = 0;
            while (i < fractions.size()) {
                std::size_t j = i;
                while (j < fractions.size() && !fractions[i].less(fractions[j]) &&
                       !fractions[j].less(fractions[i])) {
                    ++j;
                }
                if (j - i > best_len) {
                    best_len = j - i;
                    merged = fractions[i];
                }
                i = j;
            }
            break;
        }
        }
        CHECK(merge_and_scale(points, rule, pow10) == merged.floor_times_pow10(pow10));
    }
}

TEST_CASE("text feeds deliver literal values by mode") {
    MockSource yes;
    yes.source_id = "y";
    yes.kind = OutputType::Text;
    yes.text_default = "yes";
    MockSource no;
    no.source_id = "n";
    no.kind = OutputType::Text;
    no.text_default = "no";
    MockSource no2 = no;
    no2.source_id = "n2";

    SourceBook book;
    book.add(yes);
    book.add(no);
    book.add(no2);

    FeedSpec spec;
    spec.feed_id = "event";
    spec.sources = {{"y", true}, {"n", false}, {"n2", false}};
    spec.merge_rule = AggRule::Mode;
    spec.output = OutputType::Text;

    auto result = extract(spec, book, {"y", "n", "n2"}, 1);
    REQUIRE(result.ok);
    CHECK(std::get<std::string>(result.point.value) == "no");
}

TEST_CASE("binding a source outside the feed spec is an error") {
    SourceBook book;
    book.add(constant_source("a", "1"));
    book.add(constant_source("z", "2"));
    auto result = extract(two_source_feed(AggRule::Median, 0), book, {"a", "z"}, 1);
    CHECK_FALSE(result.ok);
}
