// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gravity/common.hpp"

namespace gravity {

// N x N table of local trust estimates: s(i, j) is rater i's opinion of
// node j. The diagonal is ignored (treated as zero) everywhere.
class ScoreMatrix {
public:
    ScoreMatrix() = default;
    explicit ScoreMatrix(std::vector<NodeId> ids);

    std::size_t size() const { return ids_.size(); }
    const std::vector<NodeId>& ids() const { return ids_; }

    std::size_t index_of(const NodeId& id) const;
    bool contains(const NodeId& id) const { return index_.count(id) != 0; }
    // New nodes join with an all-zero column and row.
    std::size_t add_node(const NodeId& id);

    double at(std::size_t rater, std::size_t ratee) const;
    void set(std::size_t rater, std::size_t ratee, double value);
    double at(const NodeId& rater, const NodeId& ratee) const;
    void set(const NodeId& rater, const NodeId& ratee, double value);

    // Plain-text table: one row per rater, node_id then n values,
    // whitespace-separated. Values round-trip exactly.
    std::string to_table() const;
    static ScoreMatrix from_table(const std::string& table);

private:
    std::vector<NodeId> ids_;
    std::map<NodeId, std::size_t> index_;
    std::vector<double> cells_; // row-major n*n
};

struct EigenTrustParams {
    double a = 0.15;         // damping weight toward pre-trust
    double epsilon = 1e-6;   // L2 convergence threshold
    std::size_t max_iters = 1000;
};

struct TrustVector {
    std::vector<double> t;
    std::vector<double> pre_trust;
    std::size_t iterations = 0;
    double delta = 0.0;
};

struct GravityScore {
    NodeId node_id;
    double score = 0.0; // in [0, 100]
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::vector<double> last, double d)
        : std::runtime_error("eigentrust failed to converge"), last_t(std::move(last)), delta(d) {}

    std::vector<double> last_t;
    double delta;
};

// c(i,j) = max(s(i,j), 0) / sum_j max(s(i,j), 0), diagonal excluded; rows
// with a zero denominator become a copy of the pre-trust vector. Result is
// row-stochastic. Throws std::invalid_argument on non-finite input.
std::vector<double> normalize_matrix(const ScoreMatrix& s, const std::vector<double>& pre_trust);

// Power iteration t <- (1 - a) C^T t + a p from t(0) = p, stopping at
// ||t(k+1) - t(k)||_2 < epsilon. Throws NonConvergenceError past max_iters.
TrustVector eigentrust(const std::vector<double>& c, std::size_t n, const EigenTrustParams& params,
                       const std::vector<double>& pre_trust);

// score_i = 100 * t_i / max_j t_j; preserves ordering, top node gets 100.
std::vector<GravityScore> to_gravity_scores(const TrustVector& trust, const std::vector<NodeId>& ids);

std::vector<double> uniform_pre_trust(std::size_t n);

enum class ScoreMode { Automatic, Manual };

enum class AutoObservation {
    Divergence,        // data diverged beyond tolerance from the aggregate
    StoppedProcessing, // stopped processing peers' feeds
    Unresponsive,      // no response to service requests
    Fraud,             // reveal mismatched its commit, or arrived without one
    StableEpoch,       // one full epoch of stable operation
};

std::string to_string(AutoObservation obs);

// Per-rater rating state. Automatic observations zero the rating or build
// it up stepwise; a manual grade freezes the pair against further automatic
// updates from that rater. Returns the new absolute rating when it changed,
// nullopt when suppressed or unchanged (no message needs to be emitted).
//
// Zeroing for bad data (divergence, fraud) sets the pair's divergence flag:
// stable epochs no longer rebuild the rating and only a manual grade can
// rehabilitate the node. Liveness zeroing (unresponsive, stopped
// processing) stays recoverable through ordinary build-up.
class ScoringPolicy {
public:
    ScoringPolicy(double build_up_step, double build_up_cap)
        : step_(build_up_step), cap_(build_up_cap) {}

    std::optional<double> on_automatic(const NodeId& rater, const NodeId& ratee, AutoObservation obs);
    double on_manual(const NodeId& rater, const NodeId& ratee, double value);

    bool is_manual(const NodeId& rater, const NodeId& ratee) const;
    bool is_data_flagged(const NodeId& rater, const NodeId& ratee) const;
    double current(const NodeId& rater, const NodeId& ratee) const;
    // Pre-existing trust installed as genesis state (no message emitted).
    void seed(const NodeId& rater, const NodeId& ratee, double value);

private:
    struct PairState {
        ScoreMode mode = ScoreMode::Automatic;
        double value = 0.0;
        bool data_flagged = false;
    };

    double step_;
    double cap_;
    std::map<std::pair<NodeId, NodeId>, PairState> pairs_;
};

} // namespace gravity
