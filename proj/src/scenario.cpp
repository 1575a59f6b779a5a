// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
#include "gravity/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gravity {
namespace {

using nlohmann::json;

struct Violations {
    std::vector<std::string> items;

    void add(const std::string& what) { items.push_back(what); }
    bool empty() const { return items.empty(); }
};

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed, Violations& v) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            v.add(where + ": unknown key '" + it.key() + "'");
        }
    }
}

bool need(const json& obj, const std::string& key, const std::string& where, Violations& v) {
    if (!obj.contains(key)) {
        v.add(where + ": missing required key '" + key + "'");
        return false;
    }
    return true;
}

std::uint64_t get_u64(const json& obj, const std::string& key, const std::string& where,
                      Violations& v, std::uint64_t fallback = 0) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer()) {
        v.add(where + "." + key + ": expected an integer");
        return fallback;
    }
    if (obj[key].is_number_integer() && obj[key].get<std::int64_t>() < 0) {
        v.add(where + "." + key + ": must be non-negative");
        return fallback;
    }
    return obj[key].get<std::uint64_t>();
}

std::int64_t get_i64(const json& obj, const std::string& key, const std::string& where,
                     Violations& v, std::int64_t fallback = 0) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number_integer() && !obj[key].is_number_unsigned()) {
        v.add(where + "." + key + ": expected an integer");
        return fallback;
    }
    return obj[key].get<std::int64_t>();
}

double get_f64(const json& obj, const std::string& key, const std::string& where, Violations& v,
               double fallback = 0.0) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number()) {
        v.add(where + "." + key + ": expected a number");
        return fallback;
    }
    return obj[key].get<double>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& where,
                    Violations& v, const std::string& fallback = "") {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_string()) {
        v.add(where + "." + key + ": expected a string");
        return fallback;
    }
    return obj[key].get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& where, Violations& v,
              bool fallback = false) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_boolean()) {
        v.add(where + "." + key + ": expected a boolean");
        return fallback;
    }
    return obj[key].get<bool>();
}

// Numeric script values may be JSON numbers or decimal strings; either way
// they become exact decimals (doubles go through their shortest round-trip
// representation, so a literal like 1.23 stays 1.23).
std::string decimal_text(const json& j, const std::string& where, Violations& v) {
    if (j.is_string()) {
        return j.get<std::string>();
    }
    if (j.is_number_integer() || j.is_number_unsigned()) {
        return std::to_string(j.get<std::int64_t>());
    }
    if (j.is_number_float()) {
        return json(j.get<double>()).dump();
    }
    v.add(where + ": expected a number or decimal string");
    return "0";
}

Decimal parse_decimal(const json& j, const std::string& where, Violations& v) {
    try {
        return Decimal::parse(decimal_text(j, where, v));
    } catch (const std::exception& e) {
        v.add(where + ": " + e.what());
        return Decimal{};
    }
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_ranges(const json& j,
                                                                  const std::string& where,
                                                                  Violations& v) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    if (!j.is_array()) {
        v.add(where + ": expected an array of [from, to] ranges");
        return out;
    }
    for (const auto& r : j) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            v.add(where + ": each range must be [from, to]");
            continue;
        }
        out.emplace_back(r[0].get<std::uint64_t>(), r[1].get<std::uint64_t>());
    }
    return out;
}

void parse_chains(const json& root, Scenario& s, Violations& v) {
    if (!need(root, "chains", "scenario", v)) {
        return;
    }
    if (!root["chains"].is_array() || root["chains"].empty()) {
        v.add("chains: expected a non-empty array");
        return;
    }
    std::set<ChainId> seen;
    for (const auto& jc : root["chains"]) {
        const std::string where = "chains[" + std::to_string(s.chains.size()) + "]";
        check_keys(jc, where,
                   {"id", "token_supply", "min_deposit", "lock_period", "registration_fee",
                    "freshness_window"},
                   v);
        ChainConfig cfg;
        need(jc, "id", where, v);
        need(jc, "token_supply", where, v);
        cfg.chain_id = get_str(jc, "id", where, v);
        cfg.token_supply = get_i64(jc, "token_supply", where, v);
        cfg.min_deposit = get_i64(jc, "min_deposit", where, v, 1);
        cfg.lock_period = get_u64(jc, "lock_period", where, v, 365);
        cfg.registration_fee = get_i64(jc, "registration_fee", where, v, 1);
        cfg.freshness_window = get_u64(jc, "freshness_window", where, v, 2);
        if (cfg.token_supply < 0) {
            v.add(where + ": token_supply must be non-negative");
        }
        if (cfg.min_deposit < 1) {
            v.add(where + ": min_deposit must be at least 1");
        }
        if (!cfg.chain_id.empty() && !seen.insert(cfg.chain_id).second) {
            v.add(where + ": duplicate chain id '" + cfg.chain_id + "'");
        }
        s.chains.push_back(cfg);
    }
}

void parse_feeds(const json& root, Scenario& s, Violations& v) {
    if (!root.contains("feeds")) {
        return;
    }
    if (!root["feeds"].is_array()) {
        v.add("feeds: expected an array");
        return;
    }
    std::size_t idx = 0;
    for (const auto& jf : root["feeds"]) {
        const std::string where = "feeds[" + std::to_string(idx++) + "]";
        check_keys(jf, where, {"id", "merge", "aggregation", "decimals", "output", "sources"}, v);
        need(jf, "id", where, v);
        need(jf, "sources", where, v);
        FeedSpec spec;
        spec.feed_id = get_str(jf, "id", where, v);
        try {
            spec.merge_rule = agg_rule_from_string(get_str(jf, "merge", where, v, "median"));
            spec.aggregation = agg_rule_from_string(get_str(jf, "aggregation", where, v, "median"));
        } catch (const std::exception& e) {
            v.add(where + ": " + e.what());
        }
        spec.scale_pow10 = static_cast<std::int32_t>(get_i64(jf, "decimals", where, v, 0));
        if (spec.scale_pow10 < 0 || spec.scale_pow10 > 18) {
            v.add(where + ".decimals: must be within [0, 18]");
            spec.scale_pow10 = 0;
        }
        const std::string output = get_str(jf, "output", where, v, "integer");
        if (output == "integer") {
            spec.output = OutputType::Integer;
        } else if (output == "text") {
            spec.output = OutputType::Text;
        } else {
            v.add(where + ".output: must be 'integer' or 'text'");
        }
        if (spec.output == OutputType::Text && spec.merge_rule == AggRule::Average) {
            v.add(where + ": text feeds cannot merge by average");
        }
        if (spec.output == OutputType::Text && spec.aggregation == AggRule::Average) {
            v.add(where + ": text feeds cannot aggregate by average");
        }

        bool any_mandatory = false;
        if (jf.contains("sources") && jf["sources"].is_array()) {
            std::size_t sidx = 0;
            for (const auto& js : jf["sources"]) {
                const std::string swhere = where + ".sources[" + std::to_string(sidx++) + "]";
                check_keys(js, swhere,
                           {"id", "mandatory", "base", "step", "overrides", "default"}, v);
                need(js, "id", swhere, v);
                SourceRef ref;
                ref.source_id = get_str(js, "id", swhere, v);
                ref.mandatory = get_bool(js, "mandatory", swhere, v, false);
                any_mandatory |= ref.mandatory;
                spec.sources.push_back(ref);

                const bool has_script = js.contains("base") || js.contains("step") ||
                                        js.contains("overrides") || js.contains("default");
                if (s.sources.contains(ref.source_id)) {
                    // Reference to a source another feed already defined; a
                    // second script for the same id is ambiguous.
                    if (has_script) {
                        v.add(swhere + ": source '" + ref.source_id +
                              "' is already defined; reference it without a script");
                    }
                    continue;
                }
                MockSource src;
                src.source_id = ref.source_id;
                src.kind = spec.output;
                if (spec.output == OutputType::Integer) {
                    if (js.contains("base")) {
                        src.base = parse_decimal(js["base"], swhere + ".base", v);
                    }
                    if (js.contains("step")) {
                        src.step = parse_decimal(js["step"], swhere + ".step", v);
                    }
                } else {
                    src.text_default = get_str(js, "default", swhere, v, "");
                }
                if (js.contains("overrides")) {
                    if (!js["overrides"].is_object()) {
                        v.add(swhere + ".overrides: expected an object of tick -> value");
                    } else {
                        for (auto it = js["overrides"].begin(); it != js["overrides"].end(); ++it) {
                            try {
                                const auto tick = static_cast<std::uint64_t>(std::stoull(it.key()));
                                src.overrides[tick] =
                                    decimal_text(it.value(), swhere + ".overrides", v);
                            } catch (const std::exception&) {
                                v.add(swhere + ".overrides: bad tick key '" + it.key() + "'");
                            }
                        }
                    }
                }
                s.sources.add(std::move(src));
            }
        }
        if (!any_mandatory) {
            v.add(where + ": a feed needs at least one mandatory source");
        }
        if (spec.feed_id.empty() || s.feeds.count(spec.feed_id)) {
            v.add(where + ": duplicate or empty feed id '" + spec.feed_id + "'");
        } else {
            s.feeds.emplace(spec.feed_id, std::move(spec));
        }
    }
}

void parse_nodes(const json& root, Scenario& s, Violations& v) {
    if (!need(root, "nodes", "scenario", v)) {
        return;
    }
    if (!root["nodes"].is_array() || root["nodes"].empty()) {
        v.add("nodes: expected a non-empty array");
        return;
    }
    std::set<NodeId> seen;
    for (const auto& jn : root["nodes"]) {
        const std::string where = "nodes[" + std::to_string(s.nodes.size()) + "]";
        check_keys(jn, where, {"id", "established", "feeds", "registrations", "balances"}, v);
        need(jn, "id", where, v);
        NodeScenario node;
        node.id = get_str(jn, "id", where, v);
        node.established = get_bool(jn, "established", where, v, false);
        if (!node.id.empty() && !seen.insert(node.id).second) {
            v.add(where + ": duplicate node id '" + node.id + "'");
        }
        if (jn.contains("feeds")) {
            if (!jn["feeds"].is_array()) {
                v.add(where + ".feeds: expected an array");
            } else {
                std::size_t fidx = 0;
                for (const auto& jf : jn["feeds"]) {
                    const std::string fwhere = where + ".feeds[" + std::to_string(fidx++) + "]";
                    if (jf.is_string()) {
                        node.feed_bindings[jf.get<std::string>()] = {};
                    } else if (jf.is_object()) {
                        check_keys(jf, fwhere, {"id", "sources"}, v);
                        need(jf, "id", fwhere, v);
                        std::vector<std::string> sources;
                        if (jf.contains("sources")) {
                            for (const auto& js : jf["sources"]) {
                                if (js.is_string()) {
                                    sources.push_back(js.get<std::string>());
                                } else {
                                    v.add(fwhere + ".sources: expected strings");
                                }
                            }
                        }
                        node.feed_bindings[get_str(jf, "id", fwhere, v)] = std::move(sources);
                    } else {
                        v.add(fwhere + ": expected a feed id or {id, sources}");
                    }
                }
            }
        }
        if (jn.contains("registrations")) {
            if (!jn["registrations"].is_array()) {
                v.add(where + ".registrations: expected an array");
            } else {
                std::size_t ridx = 0;
                for (const auto& jr : jn["registrations"]) {
                    const std::string rwhere =
                        where + ".registrations[" + std::to_string(ridx++) + "]";
                    check_keys(jr, rwhere, {"chain", "deposit"}, v);
                    need(jr, "chain", rwhere, v);
                    need(jr, "deposit", rwhere, v);
                    node.registrations.push_back(
                        {get_str(jr, "chain", rwhere, v), get_i64(jr, "deposit", rwhere, v)});
                }
            }
        }
        if (jn.contains("balances")) {
            if (!jn["balances"].is_object()) {
                v.add(where + ".balances: expected an object of chain -> amount");
            } else {
                for (auto it = jn["balances"].begin(); it != jn["balances"].end(); ++it) {
                    if (it.value().is_number_integer() || it.value().is_number_unsigned()) {
                        node.balances[it.key()] = it.value().get<std::int64_t>();
                    } else {
                        v.add(where + ".balances." + it.key() + ": expected an integer");
                    }
                }
            }
        }
        s.nodes.push_back(std::move(node));
    }
}

void parse_nebulae(const json& root, Scenario& s, Violations& v) {
    if (!root.contains("nebulae")) {
        return;
    }
    if (!root["nebulae"].is_array()) {
        v.add("nebulae: expected an array");
        return;
    }
    std::set<NebulaId> seen;
    std::set<FeedId> feeds_used;
    for (const auto& jn : root["nebulae"]) {
        const std::string where = "nebulae[" + std::to_string(s.nebulae.size()) + "]";
        check_keys(jn, where,
                   {"id", "chain", "feed", "n", "k", "min_score", "price", "schedule", "oracles",
                    "creator"},
                   v);
        for (const char* key : {"id", "chain", "feed", "n", "k"}) {
            need(jn, key, where, v);
        }
        NebulaScenario neb;
        neb.id = get_str(jn, "id", where, v);
        neb.chain_id = get_str(jn, "chain", where, v);
        neb.feed_id = get_str(jn, "feed", where, v);
        neb.params.nebula_id = neb.id;
        neb.params.feed_id = neb.feed_id;
        neb.params.capacity = get_u64(jn, "n", where, v);
        neb.params.required = get_u64(jn, "k", where, v);
        neb.params.min_score = get_f64(jn, "min_score", where, v, 0.0);
        neb.params.price = get_i64(jn, "price", where, v, 0);
        if (neb.params.required == 0 || neb.params.required > neb.params.capacity) {
            v.add(where + ": k must satisfy 1 <= k <= n");
        }
        if (neb.params.min_score < 0.0 || neb.params.min_score > 100.0) {
            v.add(where + ": min_score must be within [0, 100]");
        }
        if (jn.contains("schedule")) {
            check_keys(jn["schedule"], where + ".schedule", {"period", "offset"}, v);
            neb.schedule.period = get_u64(jn["schedule"], "period", where + ".schedule", v, 1);
            neb.schedule.offset = get_u64(jn["schedule"], "offset", where + ".schedule", v, 0);
            if (neb.schedule.period == 0) {
                v.add(where + ".schedule.period: must be positive");
                neb.schedule.period = 1;
            }
        }
        if (jn.contains("oracles")) {
            for (const auto& jo : jn["oracles"]) {
                if (jo.is_string()) {
                    neb.candidates.push_back(jo.get<std::string>());
                } else {
                    v.add(where + ".oracles: expected node ids");
                }
            }
        }
        neb.creator = get_str(jn, "creator", where, v,
                              neb.candidates.empty() ? "" : neb.candidates.front());
        if (neb.creator.empty()) {
            v.add(where + ": creator missing and no oracle candidates to default to");
        }
        if (neb.id.empty() || !seen.insert(neb.id).second) {
            v.add(where + ": duplicate or empty nebula id");
        }
        if (!neb.feed_id.empty() && !feeds_used.insert(neb.feed_id).second) {
            v.add(where + ": feed '" + neb.feed_id +
                  "' already serves another nebula; clone the feed spec instead");
        }
        s.nebulae.push_back(std::move(neb));
    }
}

void parse_subscriptions(const json& root, Scenario& s, Violations& v) {
    if (!root.contains("subscriptions")) {
        return;
    }
    if (!root["subscriptions"].is_array()) {
        v.add("subscriptions: expected an array");
        return;
    }
    std::set<std::string> seen;
    for (const auto& js : root["subscriptions"]) {
        const std::string where = "subscriptions[" + std::to_string(s.subscriptions.size()) + "]";
        check_keys(js, where,
                   {"contract", "nebula", "method", "mode", "kind", "balance", "deposit", "topups",
                    "reactivate"},
                   v);
        need(js, "contract", where, v);
        need(js, "nebula", where, v);
        SubscriptionScenario sub;
        sub.contract_id = get_str(js, "contract", where, v);
        sub.nebula_id = get_str(js, "nebula", where, v);
        sub.method = get_str(js, "method", where, v, "onData");
        const std::string mode = get_str(js, "mode", where, v, "deposit");
        if (mode == "deposit") {
            sub.mode = PayMode::Deposit;
        } else if (mode == "per-call") {
            sub.mode = PayMode::PerCall;
        } else {
            v.add(where + ".mode: must be 'deposit' or 'per-call'");
        }
        const std::string kind = get_str(js, "kind", where, v, "data");
        if (kind == "data") {
            sub.kind = ContractKind::Data;
        } else if (kind == "trigger") {
            sub.kind = ContractKind::Trigger;
        } else {
            v.add(where + ".kind: must be 'data' or 'trigger'");
        }
        sub.balance = get_i64(js, "balance", where, v, 0);
        sub.initial_deposit = get_i64(js, "deposit", where, v, 0);
        if (js.contains("topups")) {
            for (const auto& jt : js["topups"]) {
                check_keys(jt, where + ".topups", {"tick", "amount"}, v);
                sub.topups.push_back({get_u64(jt, "tick", where + ".topups", v),
                                      get_i64(jt, "amount", where + ".topups", v)});
            }
        }
        if (js.contains("reactivate")) {
            for (const auto& jr : js["reactivate"]) {
                if (jr.is_number()) {
                    sub.reactivations.push_back(jr.get<std::uint64_t>());
                } else {
                    v.add(where + ".reactivate: expected tick numbers");
                }
            }
        }
        if (!sub.contract_id.empty() && !seen.insert(sub.contract_id + "@" + sub.nebula_id).second) {
            v.add(where + ": duplicate subscription for contract '" + sub.contract_id + "'");
        }
        s.subscriptions.push_back(std::move(sub));
    }
}

void parse_faults(const json& root, Scenario& s, Violations& v) {
    if (!root.contains("faults")) {
        return;
    }
    const json& jf = root["faults"];
    check_keys(jf, "faults", {"nodes", "sources", "sybil", "manual_scores"}, v);
    if (jf.contains("nodes")) {
        std::size_t idx = 0;
        for (const auto& jn : jf["nodes"]) {
            const std::string where = "faults.nodes[" + std::to_string(idx++) + "]";
            check_keys(jn, where,
                       {"node", "offline", "divergence_offset", "fraud_reveal",
                        "unsolicited_reveal"},
                       v);
            need(jn, "node", where, v);
            NodeFaultPlan plan;
            if (jn.contains("offline")) {
                plan.offline_ranges = parse_ranges(jn["offline"], where + ".offline", v);
            }
            if (jn.contains("divergence_offset")) {
                plan.divergence_offset = get_i64(jn, "divergence_offset", where, v);
            }
            plan.fraud_reveal = get_bool(jn, "fraud_reveal", where, v, false);
            plan.unsolicited_reveal = get_bool(jn, "unsolicited_reveal", where, v, false);
            s.node_faults[get_str(jn, "node", where, v)] = std::move(plan);
        }
    }
    if (jf.contains("sources")) {
        std::size_t idx = 0;
        for (const auto& js : jf["sources"]) {
            const std::string where = "faults.sources[" + std::to_string(idx++) + "]";
            check_keys(js, where, {"source", "silent", "delayed", "wrong_value"}, v);
            need(js, "source", where, v);
            const std::string source_id = get_str(js, "source", where, v);
            if (!s.sources.contains(source_id)) {
                v.add(where + ": unknown source '" + source_id + "'");
                continue;
            }
            MockSource& src = const_cast<MockSource&>(s.sources.get(source_id));
            if (js.contains("silent")) {
                for (const auto& [from, to] : parse_ranges(js["silent"], where + ".silent", v)) {
                    for (std::uint64_t t = from; t <= to; ++t) {
                        src.silent_ticks.insert(t);
                    }
                }
            }
            if (js.contains("delayed")) {
                for (const auto& jt : js["delayed"]) {
                    if (jt.is_number()) {
                        src.delayed_ticks.insert(jt.get<std::uint64_t>());
                    } else {
                        v.add(where + ".delayed: expected tick numbers");
                    }
                }
            }
            if (js.contains("wrong_value")) {
                for (auto it = js["wrong_value"].begin(); it != js["wrong_value"].end(); ++it) {
                    try {
                        const auto tick = static_cast<std::uint64_t>(std::stoull(it.key()));
                        src.wrong_value[tick] =
                            decimal_text(it.value(), where + ".wrong_value", v);
                    } catch (const std::exception&) {
                        v.add(where + ".wrong_value: bad tick key '" + it.key() + "'");
                    }
                }
            }
        }
    }
    if (jf.contains("sybil")) {
        const json& js = jf["sybil"];
        check_keys(js, "faults.sybil", {"tick", "count", "chain", "deposit"}, v);
        SybilWave wave;
        wave.tick = get_u64(js, "tick", "faults.sybil", v);
        wave.count = get_u64(js, "count", "faults.sybil", v);
        wave.chain_id = get_str(js, "chain", "faults.sybil", v);
        wave.deposit = get_i64(js, "deposit", "faults.sybil", v);
        s.sybil = wave;
    }
    if (jf.contains("manual_scores")) {
        std::size_t idx = 0;
        for (const auto& jm : jf["manual_scores"]) {
            const std::string where = "faults.manual_scores[" + std::to_string(idx++) + "]";
            check_keys(jm, where, {"tick", "rater", "ratee", "value"}, v);
            ManualScoreAction action;
            action.tick = get_u64(jm, "tick", where, v);
            action.rater = get_str(jm, "rater", where, v);
            action.ratee = get_str(jm, "ratee", where, v);
            action.value = get_f64(jm, "value", where, v);
            s.manual_scores.push_back(std::move(action));
        }
    }
}

void parse_policy(const json& root, Scenario& s, Violations& v) {
    if (!root.contains("policy")) {
        return;
    }
    const json& jp = root["policy"];
    check_keys(jp, "policy",
               {"eigentrust_a", "eigentrust_epsilon", "eigentrust_max_iters", "build_up_step",
                "build_up_cap", "divergence_tolerance", "consul_count", "epoch_ticks",
                "distribution_period", "round_timeout"},
               v);
    PolicyParams& p = s.policy;
    p.eigentrust.a = get_f64(jp, "eigentrust_a", "policy", v, p.eigentrust.a);
    p.eigentrust.epsilon = get_f64(jp, "eigentrust_epsilon", "policy", v, p.eigentrust.epsilon);
    p.eigentrust.max_iters = get_u64(jp, "eigentrust_max_iters", "policy", v, p.eigentrust.max_iters);
    p.build_up_step = get_f64(jp, "build_up_step", "policy", v, p.build_up_step);
    p.build_up_cap = get_f64(jp, "build_up_cap", "policy", v, p.build_up_cap);
    p.divergence_tolerance = get_f64(jp, "divergence_tolerance", "policy", v, p.divergence_tolerance);
    p.consul_count = get_u64(jp, "consul_count", "policy", v, p.consul_count);
    p.epoch_ticks = get_u64(jp, "epoch_ticks", "policy", v, p.epoch_ticks);
    p.distribution_period = get_u64(jp, "distribution_period", "policy", v, p.distribution_period);
    p.round_timeout = get_u64(jp, "round_timeout", "policy", v, p.round_timeout);
    if (p.eigentrust.a < 0.0 || p.eigentrust.a > 1.0) {
        v.add("policy.eigentrust_a: must be within [0, 1]");
    }
    if (p.eigentrust.epsilon <= 0.0) {
        v.add("policy.eigentrust_epsilon: must be positive");
    }
    if (p.consul_count == 0 || p.epoch_ticks == 0 || p.distribution_period == 0 ||
        p.round_timeout == 0) {
        v.add("policy: consul_count, epoch_ticks, distribution_period and round_timeout must be positive");
    }
    if (p.divergence_tolerance < 0.0) {
        v.add("policy.divergence_tolerance: must be non-negative");
    }
}

void cross_validate(Scenario& s, Violations& v) {
    std::set<ChainId> chain_ids;
    for (const auto& c : s.chains) {
        chain_ids.insert(c.chain_id);
    }
    std::set<NodeId> node_ids;
    for (const auto& n : s.nodes) {
        node_ids.insert(n.id);
    }

    std::map<ChainId, std::int64_t> funded;
    for (const auto& n : s.nodes) {
        for (const auto& [chain, amount] : n.balances) {
            if (!chain_ids.count(chain)) {
                v.add("nodes." + n.id + ": balance on unknown chain '" + chain + "'");
            }
            funded[chain] += amount;
        }
        for (const auto& reg : n.registrations) {
            if (!chain_ids.count(reg.chain_id)) {
                v.add("nodes." + n.id + ": registration on unknown chain '" + reg.chain_id + "'");
            }
        }
        for (const auto& [feed, sources] : n.feed_bindings) {
            auto it = s.feeds.find(feed);
            if (it == s.feeds.end()) {
                v.add("nodes." + n.id + ": binding for unknown feed '" + feed + "'");
                continue;
            }
            for (const auto& src : sources) {
                if (!it->second.has_source(src)) {
                    v.add("nodes." + n.id + ": source '" + src + "' is not part of feed '" + feed +
                          "'");
                }
            }
            // An empty binding means "all of the spec's sources".
            if (!sources.empty()) {
                for (const auto& mandatory : it->second.mandatory_sources()) {
                    if (std::find(sources.begin(), sources.end(), mandatory) == sources.end()) {
                        v.add("nodes." + n.id + ": binding for feed '" + feed +
                              "' misses mandatory source '" + mandatory + "'");
                    }
                }
            }
        }
    }

    std::map<NebulaId, const NebulaScenario*> nebula_by_id;
    for (const auto& neb : s.nebulae) {
        nebula_by_id[neb.id] = &neb;
        if (!chain_ids.count(neb.chain_id)) {
            v.add("nebulae." + neb.id + ": unknown chain '" + neb.chain_id + "'");
        }
        if (!s.feeds.count(neb.feed_id)) {
            v.add("nebulae." + neb.id + ": unknown feed '" + neb.feed_id + "'");
        }
        for (const auto& oracle : neb.candidates) {
            if (!node_ids.count(oracle)) {
                v.add("nebulae." + neb.id + ": unknown oracle candidate '" + oracle + "'");
            }
        }
        if (!neb.creator.empty() && !node_ids.count(neb.creator)) {
            v.add("nebulae." + neb.id + ": unknown creator '" + neb.creator + "'");
        }
    }

    for (const auto& sub : s.subscriptions) {
        if (!nebula_by_id.count(sub.nebula_id)) {
            v.add("subscriptions." + sub.contract_id + ": unknown nebula '" + sub.nebula_id + "'");
            continue;
        }
        if (node_ids.count(sub.contract_id)) {
            v.add("subscriptions." + sub.contract_id + ": contract id collides with a node id");
        }
        const auto& neb = *nebula_by_id[sub.nebula_id];
        funded[neb.chain_id] += sub.balance;
    }

    for (const auto& [node, plan] : s.node_faults) {
        if (!node_ids.count(node)) {
            v.add("faults.nodes: unknown node '" + node + "'");
        }
    }
    if (s.sybil) {
        if (!chain_ids.count(s.sybil->chain_id)) {
            v.add("faults.sybil: unknown chain '" + s.sybil->chain_id + "'");
        }
        for (const auto& c : s.chains) {
            if (c.chain_id == s.sybil->chain_id) {
                funded[c.chain_id] += static_cast<std::int64_t>(s.sybil->count) *
                                      (s.sybil->deposit + c.registration_fee);
            }
        }
    }
    for (const auto& action : s.manual_scores) {
        if (!node_ids.count(action.rater) || !node_ids.count(action.ratee)) {
            v.add("faults.manual_scores: unknown rater or ratee");
        }
    }

    for (const auto& c : s.chains) {
        if (funded[c.chain_id] > c.token_supply) {
            v.add("chains." + c.chain_id + ": token_supply " + std::to_string(c.token_supply) +
                  " cannot cover genesis balances plus sybil funding " +
                  std::to_string(funded[c.chain_id]));
        }
    }
}

} // namespace

ScenarioError::ScenarioError(std::vector<std::string> list)
    : std::runtime_error([&list] {
          std::ostringstream out;
          out << "scenario validation failed (" << list.size() << " violation"
              << (list.size() == 1 ? "" : "s") << ")";
          for (const auto& item : list) {
              out << "\n  - " << item;
          }
          return out.str();
      }()),
      violations(std::move(list)) {}

Scenario parse_scenario(const std::string& json_text) {
    Violations v;
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError({std::string("not valid JSON: ") + e.what()});
    }
    if (!root.is_object()) {
        throw ScenarioError({"scenario root must be an object"});
    }

    Scenario s;
    check_keys(root, "scenario",
               {"seed", "ticks", "chains", "nodes", "feeds", "nebulae", "subscriptions", "faults",
                "policy"},
               v);
    need(root, "seed", "scenario", v);
    need(root, "ticks", "scenario", v);
    s.seed = get_u64(root, "seed", "scenario", v);
    s.ticks = get_u64(root, "ticks", "scenario", v);
    if (root.contains("ticks") && s.ticks == 0) {
        v.add("scenario.ticks: must be positive");
    }

    parse_chains(root, s, v);
    parse_feeds(root, s, v);
    parse_nodes(root, s, v);
    parse_nebulae(root, s, v);
    parse_subscriptions(root, s, v);
    parse_faults(root, s, v);
    parse_policy(root, s, v);
    cross_validate(s, v);

    if (!v.empty()) {
        throw ScenarioError(std::move(v.items));
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError({"cannot open scenario file: " + path});
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

} // namespace gravity
