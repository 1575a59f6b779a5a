// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/reputation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace gravity {

ScoreMatrix::ScoreMatrix(std::vector<NodeId> ids) : ids_(std::move(ids)) {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second) {
            throw std::invalid_argument("duplicate node id in score matrix");
        }
    }
    cells_.assign(ids_.size() * ids_.size(), 0.0);
}

std::size_t ScoreMatrix::index_of(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw std::out_of_range("node id not in score matrix: " + id);
    }
    return it->second;
}

std::size_t ScoreMatrix::add_node(const NodeId& id) {
    if (index_.count(id)) {
        throw std::invalid_argument("node already in score matrix: " + id);
    }
    const std::size_t old_n = ids_.size();
    const std::size_t new_n = old_n + 1;
    std::vector<double> grown(new_n * new_n, 0.0);
    for (std::size_t i = 0; i < old_n; ++i) {
        for (std::size_t j = 0; j < old_n; ++j) {
            grown[i * new_n + j] = cells_[i * old_n + j];
        }
    }
    cells_ = std::move(grown);
    ids_.push_back(id);
    index_.emplace(id, old_n);
    return old_n;
}

double ScoreMatrix::at(std::size_t rater, std::size_t ratee) const {
    return cells_.at(rater * size() + ratee);
}

void ScoreMatrix::set(std::size_t rater, std::size_t ratee, double value) {
    cells_.at(rater * size() + ratee) = value;
}

double ScoreMatrix::at(const NodeId& rater, const NodeId& ratee) const {
    return at(index_of(rater), index_of(ratee));
}

void ScoreMatrix::set(const NodeId& rater, const NodeId& ratee, double value) {
    set(index_of(rater), index_of(ratee), value);
}

std::string ScoreMatrix::to_table() const {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < size(); ++i) {
        out << ids_[i];
        for (std::size_t j = 0; j < size(); ++j) {
            out << ' ' << at(i, j);
        }
        out << '\n';
    }
    return out.str();
}

ScoreMatrix ScoreMatrix::from_table(const std::string& table) {
    std::istringstream in(table);
    std::vector<NodeId> ids;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        NodeId id;
        fields >> id;
        std::vector<double> row;
        double v = 0.0;
        while (fields >> v) {
            row.push_back(v);
        }
        ids.push_back(id);
        rows.push_back(std::move(row));
    }
    ScoreMatrix m(ids);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != ids.size()) {
            throw std::invalid_argument("score table row is not square");
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m.set(i, j, rows[i][j]);
        }
    }
    return m;
}

std::vector<double> normalize_matrix(const ScoreMatrix& s, const std::vector<double>& pre_trust) {
    const std::size_t n = s.size();
    if (pre_trust.size() != n) {
        throw std::invalid_argument("pre-trust size mismatch");
    }
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double denom = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double v = s.at(i, j);
            if (!std::isfinite(v)) {
                throw std::invalid_argument("non-finite trust estimate");
            }
            denom += std::max(v, 0.0);
        }
        if (denom > 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                c[i * n + j] = (i == j) ? 0.0 : std::max(s.at(i, j), 0.0) / denom;
            }
        } else {
            // Rater with no positive opinions falls back to the pre-trust
            // distribution so the row still sums to one.
            for (std::size_t j = 0; j < n; ++j) {
                c[i * n + j] = pre_trust[j];
            }
        }
    }
    return c;
}

TrustVector eigentrust(const std::vector<double>& c, std::size_t n, const EigenTrustParams& params,
                       const std::vector<double>& pre_trust) {
    if (c.size() != n * n || pre_trust.size() != n) {
        throw std::invalid_argument("eigentrust dimension mismatch");
    }
    if (params.a < 0.0 || params.a > 1.0 || params.epsilon <= 0.0) {
        throw std::invalid_argument("bad eigentrust parameters");
    }
    std::vector<double> t = pre_trust;
    std::vector<double> next(n, 0.0);
    for (std::size_t iter = 1; iter <= params.max_iters; ++iter) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += c[i * n + j] * t[i];
            }
            next[j] = (1.0 - params.a) * acc + params.a * pre_trust[j];
        }
        double delta_sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = next[j] - t[j];
            delta_sq += d * d;
        }
        t.swap(next);
        const double delta = std::sqrt(delta_sq);
        if (delta < params.epsilon) {
            return TrustVector{t, pre_trust, iter, delta};
        }
        if (iter == params.max_iters) {
            throw NonConvergenceError(t, delta);
        }
    }
    throw NonConvergenceError(t, 0.0); // max_iters == 0
}

std::vector<GravityScore> to_gravity_scores(const TrustVector& trust, const std::vector<NodeId>& ids) {
    if (trust.t.size() != ids.size()) {
        throw std::invalid_argument("trust vector size mismatch");
    }
    double max_t = 0.0;
    for (double v : trust.t) {
        max_t = std::max(max_t, v);
    }
    if (max_t <= 0.0) {
        throw std::invalid_argument("all-zero trust vector cannot be scored");
    }
    std::vector<GravityScore> scores;
    scores.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        // Divide first: the ratio is exactly 1 for the top node and never
        // exceeds 1, so scores stay inside [0, 100] with the maximum exact.
        scores.push_back({ids[i], 100.0 * (trust.t[i] / max_t)});
    }
    return scores;
}

std::vector<double> uniform_pre_trust(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("empty network has no pre-trust");
    }
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::string to_string(AutoObservation obs) {
    switch (obs) {
    case AutoObservation::Divergence: return "divergence";
    case AutoObservation::StoppedProcessing: return "stopped-processing";
    case AutoObservation::Unresponsive: return "unresponsive";
    case AutoObservation::Fraud: return "fraud";
    case AutoObservation::StableEpoch: return "stable-epoch";
    }
    return "?";
}

std::optional<double> ScoringPolicy::on_automatic(const NodeId& rater, const NodeId& ratee,
                                                  AutoObservation obs) {
    auto& st = pairs_[{rater, ratee}];
    if (st.mode == ScoreMode::Manual) {
        return std::nullopt;
    }
    double next = st.value;
    switch (obs) {
    case AutoObservation::Divergence:
    case AutoObservation::Fraud:
        st.data_flagged = true;
        next = 0.0;
        break;
    case AutoObservation::StoppedProcessing:
    case AutoObservation::Unresponsive:
        next = 0.0;
        break;
    case AutoObservation::StableEpoch:
        if (st.data_flagged) {
            return std::nullopt; // bad data needs a manual grade to recover
        }
        next = std::min(st.value + step_, cap_);
        break;
    }
    if (next == st.value) {
        return std::nullopt;
    }
    st.value = next;
    return next;
}

double ScoringPolicy::on_manual(const NodeId& rater, const NodeId& ratee, double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("manual score must be finite");
    }
    auto& st = pairs_[{rater, ratee}];
    st.mode = ScoreMode::Manual;
    st.value = value;
    st.data_flagged = false;
    return value;
}

bool ScoringPolicy::is_manual(const NodeId& rater, const NodeId& ratee) const {
    auto it = pairs_.find({rater, ratee});
    return it != pairs_.end() && it->second.mode == ScoreMode::Manual;
}

bool ScoringPolicy::is_data_flagged(const NodeId& rater, const NodeId& ratee) const {
    auto it = pairs_.find({rater, ratee});
    return it != pairs_.end() && it->second.data_flagged;
}

double ScoringPolicy::current(const NodeId& rater, const NodeId& ratee) const {
    auto it = pairs_.find({rater, ratee});
    return it == pairs_.end() ? 0.0 : it->second.value;
}

void ScoringPolicy::seed(const NodeId& rater, const NodeId& ratee, double value) {
    pairs_[{rater, ratee}].value = value;
}

} // namespace gravity
