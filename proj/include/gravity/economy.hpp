// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gravity/chain.hpp"

namespace gravity {

// Reward basis for one oracle over one distribution period: activity is the
// fraction of the period's accepted pulses carrying its valid signature,
// impact = activity * score/100.
struct ImpactRecord {
    NodeId node_id;
    double activity = 0.0;
    double score = 0.0; // Gravity score, 0..100
    double impact = 0.0;
};

struct Payout {
    NodeId node_id;
    double share = 0.0;
    std::int64_t amount = 0;
};

struct DistributionReport {
    NebulaId nebula_id;
    std::int64_t period = 0;
    std::int64_t pot = 0;
    std::vector<Payout> payouts;
    std::int64_t remainder = 0; // carried to the next period
    bool skipped = false;       // no accepted pulses or zero total impact
};

// Accepted pulses and per-node valid-signature counts within the height
// window (from, to], straight from the nebula's activity records.
struct PeriodActivity {
    std::int64_t accepted_pulses = 0;
    std::map<NodeId, std::int64_t> signature_counts;
};

PeriodActivity collect_period_activity(const NebulaContract& nebula, std::uint64_t from_height,
                                       std::uint64_t to_height);

using ScoreLookup = std::function<double(const NodeId&)>;

// One record per listed node. With zero accepted pulses every activity is 0
// and the caller must skip the distribution (pot carries forward).
std::vector<ImpactRecord> compute_impacts(const std::vector<NodeId>& nodes,
                                          const PeriodActivity& activity,
                                          const ScoreLookup& score_of);

// share_i = impact_i / sum(impact); payout_i = floor(share_i * pot);
// remainder = pot - sum(payouts), exact in integer arithmetic.
DistributionReport distribute(const NebulaId& nebula_id, std::int64_t period, std::int64_t pot,
                              const std::vector<ImpactRecord>& impacts);

} // namespace gravity
