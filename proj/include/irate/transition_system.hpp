/* SPDX-License-Identifier: Apache-2.0 */
/*
 * transition_system.hpp -- finite state transition systems.
 *
 * A system is a finite directed graph with one designated entering state and
 * one designated exit state. Edges optionally carry a symbol; the empty label
 * stands for epsilon. State order is the document order and is the canonical
 * tie-break order for every algorithm in this library.
 *
 * All types are immutable after construction and all operations are pure, so
 * everything here is safe to share across threads read-only.
 */
#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "irate/error.hpp"

namespace irate {

/// A transition given by state ids. Empty label = epsilon.
struct Transition {
    std::string from;
    std::string to;
    std::string label;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Internal edge form: endpoints as state indices. Empty label = epsilon.
struct Edge {
    int from = -1;
    int to = -1;
    std::string label;

    bool is_epsilon() const { return label.empty(); }
    friend bool operator==(const Edge&, const Edge&) = default;
};

class TransitionSystem {
public:
    /// The empty system (no states, no paths). Flagged by is_empty().
    TransitionSystem() = default;

    TransitionSystem(std::vector<std::string> states, const std::string& enter,
                     const std::string& exit, const std::vector<Transition>& transitions)
        : states_(std::move(states)) {
        for (int i = 0; i < static_cast<int>(states_.size()); ++i) {
            if (!index_.emplace(states_[i], i).second)
                throw Error("duplicate state id \"" + states_[i] + "\"");
        }
        enter_ = require_state(enter, "enter");
        exit_ = require_state(exit, "exit");
        edges_.reserve(transitions.size());
        for (const auto& t : transitions) {
            Edge e{require_state(t.from, "edge"), require_state(t.to, "edge"), t.label};
            if (edge_set_.count(key_of(e)))
                throw Error("duplicate edge " + t.from + " -> " + t.to +
                            (t.label.empty() ? "" : " [" + t.label + "]"));
            edge_set_.insert(key_of(e));
            edges_.push_back(std::move(e));
        }
    }

    static TransitionSystem empty() { return TransitionSystem(); }

    bool is_empty() const { return states_.empty(); }
    std::size_t state_count() const { return states_.size(); }
    const std::vector<std::string>& states() const { return states_; }
    const std::string& state(int i) const { return states_.at(static_cast<std::size_t>(i)); }
    int enter() const { return enter_; }
    int exit() const { return exit_; }
    const std::string& enter_id() const { return state(enter_); }
    const std::string& exit_id() const { return state(exit_); }
    const std::vector<Edge>& edges() const { return edges_; }

    std::optional<int> index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool has_state(const std::string& id) const { return index_.count(id) != 0; }

    bool has_edge(const Transition& t) const {
        auto f = index_of(t.from), g = index_of(t.to);
        if (!f || !g) return false;
        return edge_set_.count(key_of(Edge{*f, *g, t.label})) != 0;
    }

    Transition transition(const Edge& e) const { return {state(e.from), state(e.to), e.label}; }
    Transition transition(std::size_t edge_index) const { return transition(edges_.at(edge_index)); }

    /// Distinct non-epsilon labels, sorted.
    std::vector<std::string> alphabet() const {
        std::set<std::string> out;
        for (const auto& e : edges_)
            if (!e.is_epsilon()) out.insert(e.label);
        return {out.begin(), out.end()};
    }

    /// Successor state indices (deduplicated, ascending) per state.
    std::vector<std::vector<int>> successors() const {
        std::vector<std::set<int>> s(states_.size());
        for (const auto& e : edges_) s[static_cast<std::size_t>(e.from)].insert(e.to);
        std::vector<std::vector<int>> out(states_.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i].assign(s[i].begin(), s[i].end());
        return out;
    }

    std::vector<std::vector<int>> predecessors() const {
        std::vector<std::set<int>> s(states_.size());
        for (const auto& e : edges_) s[static_cast<std::size_t>(e.to)].insert(e.from);
        std::vector<std::vector<int>> out(states_.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i].assign(s[i].begin(), s[i].end());
        return out;
    }

private:
    int require_state(const std::string& id, const char* where) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw Error(std::string("unknown state \"") + id + "\" in " + where);
        return it->second;
    }

    std::string key_of(const Edge& e) const {
        return std::to_string(e.from) + ">" + std::to_string(e.to) + "#" + e.label;
    }

    std::vector<std::string> states_;
    std::unordered_map<std::string, int> index_;
    std::unordered_set<std::string> edge_set_;
    int enter_ = -1;
    int exit_ = -1;
    std::vector<Edge> edges_;
};

namespace detail {

inline std::vector<bool> reachable_from(const TransitionSystem& m, int start, bool forward) {
    std::vector<bool> seen(m.state_count(), false);
    if (start < 0) return seen;
    auto adj = forward ? m.successors() : m.predecessors();
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<std::size_t>(v)])
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                stack.push_back(w);
            }
    }
    return seen;
}

inline std::string fresh_id(std::string base, const std::unordered_set<std::string>& used) {
    while (used.count(base)) base += "'";
    return base;
}

} // namespace detail

/// Induced subsystem on a subset of states (document order preserved). The
/// result is the empty system when enter or exit is dropped.
inline TransitionSystem induced_subsystem(const TransitionSystem& m, const std::vector<bool>& keep) {
    assert(keep.size() == m.state_count());
    if (m.is_empty() || !keep[static_cast<std::size_t>(m.enter())] ||
        !keep[static_cast<std::size_t>(m.exit())])
        return TransitionSystem::empty();
    std::vector<std::string> states;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) states.push_back(m.state(static_cast<int>(i)));
    std::vector<Transition> edges;
    for (const auto& e : m.edges())
        if (keep[static_cast<std::size_t>(e.from)] && keep[static_cast<std::size_t>(e.to)])
            edges.push_back(m.transition(e));
    return TransitionSystem(std::move(states), m.enter_id(), m.exit_id(), edges);
}

/// Same states, restricted edge set (canonical order preserved).
inline TransitionSystem with_edges(const TransitionSystem& m, const std::vector<bool>& keep_edge) {
    assert(keep_edge.size() == m.edges().size());
    if (m.is_empty()) return TransitionSystem::empty();
    std::vector<Transition> edges;
    for (std::size_t i = 0; i < keep_edge.size(); ++i)
        if (keep_edge[i]) edges.push_back(m.transition(i));
    return TransitionSystem(m.states(), m.enter_id(), m.exit_id(), edges);
}

/// Keep exactly the states that lie on some enter-to-exit path. If enter
/// cannot reach exit the result is the empty system.
inline TransitionSystem clean(const TransitionSystem& m) {
    if (m.is_empty()) return TransitionSystem::empty();
    auto fwd = detail::reachable_from(m, m.enter(), true);
    auto bwd = detail::reachable_from(m, m.exit(), false);
    std::vector<bool> keep(m.state_count());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = fwd[i] && bwd[i];
    return induced_subsystem(m, keep);
}

/// Tarjan SCC decomposition (iterative). Each component is sorted by state
/// index; the component list is ordered by smallest member.
inline std::vector<std::vector<int>> scc_decompose(const TransitionSystem& m) {
    const int n = static_cast<int>(m.state_count());
    auto adj = m.successors();
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int next_index = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            auto& out = adj[static_cast<std::size_t>(f.v)];
            if (f.child < out.size()) {
                int w = out[f.child++];
                if (index[static_cast<std::size_t>(w)] == -1) {
                    index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = next_index++;
                    stack.push_back(w);
                    on_stack[static_cast<std::size_t>(w)] = true;
                    call.push_back({w, 0});
                } else if (on_stack[static_cast<std::size_t>(w)]) {
                    low[static_cast<std::size_t>(f.v)] =
                        std::min(low[static_cast<std::size_t>(f.v)], index[static_cast<std::size_t>(w)]);
                }
            } else {
                if (low[static_cast<std::size_t>(f.v)] == index[static_cast<std::size_t>(f.v)]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = false;
                        comp.push_back(w);
                    } while (w != f.v);
                    std::sort(comp.begin(), comp.end());
                    comps.push_back(std::move(comp));
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty())
                    low[static_cast<std::size_t>(call.back().v)] =
                        std::min(low[static_cast<std::size_t>(call.back().v)], low[static_cast<std::size_t>(v)]);
            }
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

enum class ComposeMode { sequential, choice };

/// Sequential composition bridges exit(M1) -> enter(M2) with an epsilon edge.
/// Choice adds a fresh joint enter and a fresh joint exit connected by epsilon
/// edges, keeping the single-enter/single-exit shape. Colliding state ids are
/// disambiguated with "1:"/"2:" prefixes.
inline TransitionSystem compose(const TransitionSystem& m1, const TransitionSystem& m2,
                                ComposeMode mode) {
    if (mode == ComposeMode::sequential && (m1.is_empty() || m2.is_empty()))
        return TransitionSystem::empty();
    if (m1.is_empty() && m2.is_empty()) return TransitionSystem::empty();

    bool collide = false;
    for (const auto& s : m1.states())
        if (m2.has_state(s)) collide = true;
    auto name1 = [&](const std::string& s) { return collide ? "1:" + s : s; };
    auto name2 = [&](const std::string& s) { return collide ? "2:" + s : s; };

    std::vector<std::string> states;
    std::vector<Transition> edges;
    std::unordered_set<std::string> used;
    auto add_side = [&](const TransitionSystem& m, auto& name) {
        for (const auto& s : m.states()) {
            states.push_back(name(s));
            used.insert(states.back());
        }
        for (const auto& e : m.edges())
            edges.push_back({name(m.state(e.from)), name(m.state(e.to)), e.label});
    };

    if (mode == ComposeMode::sequential) {
        add_side(m1, name1);
        add_side(m2, name2);
        edges.push_back({name1(m1.exit_id()), name2(m2.enter_id()), ""});
        return TransitionSystem(std::move(states), name1(m1.enter_id()), name2(m2.exit_id()), edges);
    }

    if (!m1.is_empty()) add_side(m1, name1);
    if (!m2.is_empty()) add_side(m2, name2);
    std::string join_enter = detail::fresh_id("⊞", used); // ⊞
    used.insert(join_enter);
    std::string join_exit = detail::fresh_id("⊠", used); // ⊠
    states.insert(states.begin(), join_enter);
    states.push_back(join_exit);
    if (!m1.is_empty()) {
        edges.push_back({join_enter, name1(m1.enter_id()), ""});
        edges.push_back({name1(m1.exit_id()), join_exit, ""});
    }
    if (!m2.is_empty()) {
        edges.push_back({join_enter, name2(m2.enter_id()), ""});
        edges.push_back({name2(m2.exit_id()), join_exit, ""});
    }
    return TransitionSystem(std::move(states), join_enter, join_exit, edges);
}

// ---------------------------------------------------------------------------
// Document format
//
// {"states": ["a","b"], "enter": "a", "exit": "b",
//  "edges": [{"from":"a","to":"b","label":"x"}, ...]}
//
// Absent/null/empty "label" means epsilon. Unknown keys are rejected. With
// ParseOptions::normalize_endpoints, "enter"/"exit" may be arrays of state
// ids; a fresh super-enter/super-exit is then wired up with epsilon edges.
// ---------------------------------------------------------------------------

struct ParseOptions {
    bool normalize_endpoints = false;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> allowed,
                                const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw Error(std::string("unknown key \"") + it.key() + "\" in " + where);
    }
}

inline std::vector<std::string> endpoint_list(const nlohmann::json& v, const char* which,
                                              const ParseOptions& opts) {
    if (v.is_string()) return {v.get<std::string>()};
    if (v.is_array() && opts.normalize_endpoints) {
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) throw Error(std::string("\"") + which + "\" entries must be strings");
            out.push_back(e.get<std::string>());
        }
        if (out.empty()) throw Error(std::string("\"") + which + "\" list is empty");
        return out;
    }
    throw Error(std::string("\"") + which + "\" must be a state id string");
}

} // namespace detail

inline TransitionSystem parse_system(const std::string& text, const ParseOptions& opts = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object()) throw Error("malformed document: top level must be an object");
    detail::reject_unknown_keys(doc, {"states", "enter", "exit", "edges"}, "document");
    for (const char* k : {"states", "enter", "exit", "edges"})
        if (!doc.contains(k)) throw Error(std::string("missing key \"") + k + "\"");

    if (!doc["states"].is_array()) throw Error("\"states\" must be an array of state ids");
    std::vector<std::string> states;
    for (const auto& s : doc["states"]) {
        if (!s.is_string()) throw Error("\"states\" entries must be strings");
        states.push_back(s.get<std::string>());
    }

    auto enters = detail::endpoint_list(doc["enter"], "enter", opts);
    auto exits = detail::endpoint_list(doc["exit"], "exit", opts);

    if (!doc["edges"].is_array()) throw Error("\"edges\" must be an array");
    std::vector<Transition> edges;
    for (const auto& e : doc["edges"]) {
        if (!e.is_object()) throw Error("edge entries must be objects");
        detail::reject_unknown_keys(e, {"from", "to", "label"}, "edge");
        for (const char* k : {"from", "to"})
            if (!e.contains(k) || !e[k].is_string())
                throw Error(std::string("edge is missing string key \"") + k + "\"");
        std::string label;
        if (e.contains("label") && !e["label"].is_null()) {
            if (!e["label"].is_string()) throw Error("edge \"label\" must be a string or null");
            label = e["label"].get<std::string>();
        }
        edges.push_back({e["from"].get<std::string>(), e["to"].get<std::string>(), label});
    }

    if (enters.size() > 1 || exits.size() > 1) {
        std::unordered_set<std::string> used(states.begin(), states.end());
        std::string enter = enters.front(), exit = exits.front();
        if (enters.size() > 1) {
            enter = detail::fresh_id("@enter", used);
            used.insert(enter);
            states.insert(states.begin(), enter);
            std::vector<Transition> eps;
            for (const auto& s : enters) eps.push_back({enter, s, ""});
            edges.insert(edges.begin(), eps.begin(), eps.end());
        }
        if (exits.size() > 1) {
            exit = detail::fresh_id("@exit", used);
            states.push_back(exit);
            for (const auto& s : exits) edges.push_back({s, exit, ""});
        }
        return TransitionSystem(std::move(states), enter, exit, edges);
    }
    return TransitionSystem(std::move(states), enters.front(), exits.front(), edges);
}

inline nlohmann::ordered_json to_json(const TransitionSystem& m) {
    nlohmann::ordered_json doc;
    doc["states"] = m.states();
    if (!m.is_empty()) {
        doc["enter"] = m.enter_id();
        doc["exit"] = m.exit_id();
    }
    auto& edges = doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : m.edges()) {
        nlohmann::ordered_json obj{{"from", m.state(e.from)}, {"to", m.state(e.to)}};
        if (!e.is_epsilon()) obj["label"] = e.label;
        edges.push_back(std::move(obj));
    }
    return doc;
}

/// Synchronization pairs for the synchronous composition of two systems.
/// Each state may appear in at most one pair.
struct SyncPairSet {
    std::vector<std::pair<std::string, std::string>> pairs;
};

inline SyncPairSet parse_sync_pairs(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object()) throw Error("malformed document: top level must be an object");
    detail::reject_unknown_keys(doc, {"pairs"}, "document");
    if (!doc.contains("pairs") || !doc["pairs"].is_array())
        throw Error("missing key \"pairs\" (array of [s1, s2])");
    SyncPairSet out;
    std::unordered_set<std::string> left, right;
    for (const auto& p : doc["pairs"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
            throw Error("each pair must be a two-element array of state ids");
        auto a = p[0].get<std::string>(), b = p[1].get<std::string>();
        if (!left.insert(a).second)
            throw Error("state \"" + a + "\" appears in more than one pair");
        if (!right.insert(b).second)
            throw Error("state \"" + b + "\" appears in more than one pair");
        out.pairs.emplace_back(std::move(a), std::move(b));
    }
    return out;
}

} // namespace irate
