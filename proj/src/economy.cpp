// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/economy.hpp"

#include <cmath>
#include <stdexcept>

namespace gravity {

PeriodActivity collect_period_activity(const NebulaContract& nebula, std::uint64_t from_height,
                                       std::uint64_t to_height) {
    PeriodActivity activity;
    for (const auto& [round, record] : nebula.pulse_log) {
        if (record.height <= from_height || record.height > to_height) {
            continue;
        }
        ++activity.accepted_pulses;
        auto signers = nebula.pulse_signers.find(round);
        if (signers == nebula.pulse_signers.end()) {
            continue;
        }
        for (const NodeId& signer : signers->second) {
            ++activity.signature_counts[signer];
        }
    }
    return activity;
}

std::vector<ImpactRecord> compute_impacts(const std::vector<NodeId>& nodes,
                                          const PeriodActivity& activity,
                                          const ScoreLookup& score_of) {
    std::vector<ImpactRecord> impacts;
    impacts.reserve(nodes.size());
    for (const NodeId& node : nodes) {
        ImpactRecord rec;
        rec.node_id = node;
        if (activity.accepted_pulses > 0) {
            auto it = activity.signature_counts.find(node);
            const std::int64_t count = it == activity.signature_counts.end() ? 0 : it->second;
            rec.activity = static_cast<double>(count) / static_cast<double>(activity.accepted_pulses);
        }
        rec.score = score_of(node);
        if (rec.score < 0.0 || rec.score > 100.0 || !std::isfinite(rec.score)) {
            throw std::invalid_argument("gravity score out of range for " + node);
        }
        rec.impact = rec.activity * rec.score / 100.0;
        impacts.push_back(rec);
    }
    return impacts;
}

DistributionReport distribute(const NebulaId& nebula_id, std::int64_t period, std::int64_t pot,
                              const std::vector<ImpactRecord>& impacts) {
    if (pot < 0) {
        throw std::invalid_argument("negative reward pot");
    }
    DistributionReport report;
    report.nebula_id = nebula_id;
    report.period = period;
    report.pot = pot;

    double total_impact = 0.0;
    for (const auto& rec : impacts) {
        total_impact += rec.impact;
    }
    if (total_impact <= 0.0) {
        report.skipped = true;
        report.remainder = pot;
        return report;
    }

    std::int64_t paid = 0;
    for (const auto& rec : impacts) {
        Payout p;
        p.node_id = rec.node_id;
        p.share = rec.impact / total_impact;
        p.amount = static_cast<std::int64_t>(std::floor(p.share * static_cast<double>(pot)));
        paid += p.amount;
        report.payouts.push_back(p);
    }
    report.remainder = pot - paid;
    return report;
}

} // namespace gravity
