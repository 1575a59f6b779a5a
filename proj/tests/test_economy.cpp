// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "gravity/economy.hpp"
#include "gravity/rng.hpp"

using namespace gravity;

namespace {

std::vector<ImpactRecord> worked_example_impacts() {
    // Activity and score pairs: 0.1*85, four times 0.2*70, 0.1*60, 0.0*90.
    PeriodActivity activity;
    activity.accepted_pulses = 10;
    activity.signature_counts = {{"v", 1},  {"n1", 2}, {"n2", 2},
                                 {"n3", 2}, {"n4", 2}, {"n5", 1}};
    std::map<NodeId, double> scores = {{"v", 85},  {"n1", 70}, {"n2", 70}, {"n3", 70},
                                       {"n4", 70}, {"n5", 60}, {"n6", 90}};
    return compute_impacts({"v", "n1", "n2", "n3", "n4", "n5", "n6"}, activity,
                           [&](const NodeId& id) { return scores.at(id); });
}

} // namespace

TEST_CASE("impacts are activity times normalized score") {
    PeriodActivity activity;
    activity.accepted_pulses = 10;
    activity.signature_counts = {{"all", 10}, {"off", 0}};
    auto impacts = compute_impacts({"all", "off"}, activity, [](const NodeId& id) {
        return id == "all" ? 85.0 : 90.0;
    });
    CHECK(impacts[0].activity == doctest::Approx(1.0));
    CHECK(impacts[0].impact == doctest::Approx(0.85));
    CHECK(impacts[1].activity == doctest::Approx(0.0));
    CHECK(impacts[1].impact == doctest::Approx(0.0));
}

TEST_CASE("worked example: 10% activity at score 85 is 12 of 100 tokens") {
    auto impacts = worked_example_impacts();
    double total = 0.0;
    for (const auto& rec : impacts) {
        total += rec.impact;
    }
    CHECK(impacts[0].impact == doctest::Approx(0.085));
    CHECK(total == doctest::Approx(0.705));

    DistributionReport report = distribute("neb", 1, 100, impacts);
    REQUIRE_FALSE(report.skipped);
    CHECK(report.payouts[0].node_id == "v");
    CHECK(report.payouts[0].share == doctest::Approx(0.085 / 0.705).epsilon(1e-12));
    CHECK(report.payouts[0].amount == 12);

    std::int64_t paid = 0;
    for (const auto& p : report.payouts) {
        paid += p.amount;
    }
    CHECK(paid + report.remainder == 100);
}

TEST_CASE("single active node collects the full pot") {
    PeriodActivity activity;
    activity.accepted_pulses = 4;
    activity.signature_counts = {{"solo", 4}};
    auto impacts = compute_impacts({"solo"}, activity, [](const NodeId&) { return 100.0; });
    DistributionReport report = distribute("neb", 1, 57, impacts);
    CHECK(report.payouts.front().amount == 57);
    CHECK(report.remainder == 0);
}

TEST_CASE("zero pot and zero impacts") {
    auto impacts = worked_example_impacts();
    DistributionReport zero_pot = distribute("neb", 1, 0, impacts);
    for (const auto& p : zero_pot.payouts) {
        CHECK(p.amount == 0);
    }
    CHECK(zero_pot.remainder == 0);

    PeriodActivity idle;
    idle.accepted_pulses = 0;
    auto none = compute_impacts({"a", "b"}, idle, [](const NodeId&) { return 50.0; });
    DistributionReport skipped = distribute("neb", 2, 40, none);
    CHECK(skipped.skipped);
    CHECK(skipped.remainder == 40);
}

TEST_CASE("conservation: payouts plus remainder equal the pot exactly") {
    DeterministicRng rng(83);
    for (int trial = 0; trial < 200; ++trial) {
        PeriodActivity activity;
        activity.accepted_pulses = 1 + static_cast<std::int64_t>(rng.next_below(20));
        std::vector<NodeId> nodes;
        for (std::size_t i = 0; i < 1 + rng.next_below(8); ++i) {
            NodeId id = "n" + std::to_string(i);
            nodes.push_back(id);
            activity.signature_counts[id] =
                static_cast<std::int64_t>(rng.next_below(activity.accepted_pulses + 1));
        }
        auto impacts = compute_impacts(nodes, activity, [&](const NodeId& id) {
            return static_cast<double>((id.back() - '0') * 10 % 101);
        });
        const auto pot = static_cast<std::int64_t>(rng.next_below(10000));
        DistributionReport report = distribute("neb", trial, pot, impacts);
        std::int64_t paid = 0;
        for (const auto& p : report.payouts) {
            CHECK(p.amount >= 0);
            paid += p.amount;
        }
        CHECK(paid + report.remainder == pot);
        CHECK(report.remainder >= 0);
    }
}

TEST_CASE("payout order matches impact order and scaling leaves shares unchanged") {
    auto impacts = worked_example_impacts();
    DistributionReport base = distribute("neb", 1, 1000, impacts);

    auto doubled = impacts;
    for (auto& rec : doubled) {
        rec.impact *= 2.0;
    }
    DistributionReport twice = distribute("neb", 1, 1000, doubled);
    REQUIRE(base.payouts.size() == twice.payouts.size());
    for (std::size_t i = 0; i < base.payouts.size(); ++i) {
        CHECK(base.payouts[i].share == twice.payouts[i].share);
        CHECK(base.payouts[i].amount == twice.payouts[i].amount);
    }
    for (std::size_t i = 0; i < impacts.size(); ++i) {
        for (std::size_t j = 0; j < impacts.size(); ++j) {
            if (impacts[i].impact > impacts[j].impact) {
                CHECK(base.payouts[i].amount >= base.payouts[j].amount);
            }
        }
    }
    // Zero impact always pays zero.
    CHECK(base.payouts.back().amount == 0);
}

TEST_CASE("period activity windows select pulses by height") {
    NebulaContract neb;
    neb.pulse_log[1] = {Digest{}, 5, "leader"};
    neb.pulse_log[2] = {Digest{}, 10, "leader"};
    neb.pulse_log[3] = {Digest{}, 15, "leader"};
    neb.pulse_signers[1] = {"a"};
    neb.pulse_signers[2] = {"a", "b"};
    neb.pulse_signers[3] = {"b"};

    PeriodActivity first = collect_period_activity(neb, 0, 10);
    CHECK(first.accepted_pulses == 2);
    CHECK(first.signature_counts.at("a") == 2);
    CHECK(first.signature_counts.at("b") == 1);

    PeriodActivity second = collect_period_activity(neb, 10, 20);
    CHECK(second.accepted_pulses == 1);
    CHECK(second.signature_counts.count("a") == 0);
    CHECK(second.signature_counts.at("b") == 1);
}
