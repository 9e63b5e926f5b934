/* SPDX-License-Identifier: Apache-2.0 */
/*
 * iri.hpp -- information-rich input sets.
 *
 * An information-rich input set is given as an automaton of shape
 * alpha-prefix . rich-component . beta-suffix: alpha is a shortest simple
 * path from the enter state to the component's entry q, beta a shortest
 * simple path from the component's exit p to the exit state, and the accepted
 * words are the inputs read along alpha, then any walk inside the component,
 * then beta. Rates are measured on the path graph (with epsilon labels or
 * label collisions, distinct paths can share a word, so the word-level rate
 * can be lower than lambda_path).
 *
 * For a system constrained by a regular input domain L, the same search runs
 * on the product automaton that accepts exactly the paths of M consuming a
 * word of L; the result is then projected back to the input alphabet by
 * relabeling each composite path symbol with its input component.
 */
#pragma once

#include <deque>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "irate/error.hpp"
#include "irate/irc.hpp"
#include "irate/rate.hpp"
#include "irate/transition_system.hpp"

namespace irate {

struct IriAutomaton {
    TransitionSystem underlying;
    std::vector<std::string> alpha; // state ids of the source graph, enter .. q
    std::vector<std::string> beta;  // q .. exit
    RichComponent component;        // the rich component the automaton is built around
    double lambda_path = 0.0;
};

namespace detail {

/// Shortest enter->target path, lexicographically smallest by state index
/// among the shortest ones. Assumes target is reachable (cleaned graph).
inline std::vector<int> lex_shortest_path(const TransitionSystem& m, int source, int target) {
    const std::size_t n = m.state_count();
    std::vector<int> dist(n, -1);
    std::deque<int> bfs{target};
    dist[static_cast<std::size_t>(target)] = 0;
    auto pred = m.predecessors();
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (int w : pred[static_cast<std::size_t>(v)])
            if (dist[static_cast<std::size_t>(w)] == -1) {
                dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                bfs.push_back(w);
            }
    }
    if (dist[static_cast<std::size_t>(source)] < 0)
        throw Error("internal: affix target unreachable in a cleaned system");
    std::vector<int> path{source};
    auto succ = m.successors();
    int cur = source;
    while (cur != target) {
        int want = dist[static_cast<std::size_t>(cur)] - 1;
        for (int w : succ[static_cast<std::size_t>(cur)]) // ascending: first hit is smallest
            if (dist[static_cast<std::size_t>(w)] == want) {
                path.push_back(w);
                cur = w;
                break;
            }
    }
    return path;
}

/// First edge in canonical order from u to v (parallel labels resolved by
/// document order).
inline const Edge& first_edge_between(const TransitionSystem& m, int u, int v) {
    for (const auto& e : m.edges())
        if (e.from == u && e.to == v) return e;
    throw Error("internal: no edge between consecutive path states");
}

} // namespace detail

/// Build the affixed automaton around the rich component of M. Preconditions:
/// lambda_M > 0 and theta in (0, 1].
inline IriAutomaton find_iri(const TransitionSystem& m, double theta,
                             const RateOptions& opts = {}) {
    if (!(theta > 0.0 && theta <= 1.0)) throw Error("theta must lie in (0, 1]");
    TransitionSystem base = clean(m);
    if (base.is_empty()) throw Error("system has no enter-to-exit paths");

    IriAutomaton out;
    out.component = find_irc(base, theta, opts);
    int q = *base.index_of(out.component.entry);

    auto alpha_idx = detail::lex_shortest_path(base, base.enter(), q);
    auto beta_idx = detail::lex_shortest_path(base, q, base.exit());
    for (int s : alpha_idx) out.alpha.push_back(base.state(s));
    for (int s : beta_idx) out.beta.push_back(base.state(s));

    std::unordered_set<std::string> used(out.component.kept_states.begin(),
                                         out.component.kept_states.end());
    std::vector<std::string> states;
    std::vector<Transition> edges;

    std::vector<std::string> alpha_names; // copies for all but the last alpha state
    for (std::size_t i = 0; i + 1 < alpha_idx.size(); ++i) {
        auto name = detail::fresh_id("a" + std::to_string(i) + ":" + out.alpha[i], used);
        used.insert(name);
        alpha_names.push_back(name);
        states.push_back(name);
    }
    for (const auto& s : out.component.kept_states) states.push_back(s);
    std::vector<std::string> beta_names; // copies for all but the first beta state
    for (std::size_t i = 1; i < beta_idx.size(); ++i) {
        auto name = detail::fresh_id("b" + std::to_string(i) + ":" + out.beta[i], used);
        used.insert(name);
        beta_names.push_back(name);
        states.push_back(name);
    }

    for (std::size_t i = 0; i + 1 < alpha_idx.size(); ++i) {
        const Edge& e = detail::first_edge_between(base, alpha_idx[i], alpha_idx[i + 1]);
        const std::string& to =
            (i + 2 < alpha_idx.size()) ? alpha_names[i + 1] : out.component.entry;
        edges.push_back({alpha_names[i], to, e.label});
    }
    for (const auto& t : out.component.kept_edges) edges.push_back(t);
    for (std::size_t i = 0; i + 1 < beta_idx.size(); ++i) {
        const Edge& e = detail::first_edge_between(base, beta_idx[i], beta_idx[i + 1]);
        const std::string& from = (i == 0) ? out.component.exit : beta_names[i - 1];
        edges.push_back({from, beta_names[i], e.label});
    }

    const std::string& enter = alpha_names.empty() ? out.component.entry : alpha_names.front();
    const std::string& exit = beta_names.empty() ? out.component.exit : beta_names.back();
    out.underlying = TransitionSystem(std::move(states), enter, exit, edges);
    out.lambda_path = spectral_rate(out.underlying, opts).lambda;
    return out;
}

namespace detail {

/// Deterministic: at most one transition per (state, symbol). Epsilon edges
/// are rejected unless allow_exit_epsilon permits normalization edges into
/// the accepting state.
inline void require_deterministic(const TransitionSystem& l, bool allow_exit_epsilon) {
    std::unordered_set<std::string> seen;
    for (const auto& e : l.edges()) {
        if (e.is_epsilon()) {
            if (allow_exit_epsilon && e.to == l.exit()) continue;
            throw Error("language automaton must be epsilon-free (epsilon edge from \"" +
                        l.state(e.from) + "\")");
        }
        if (!seen.insert(std::to_string(e.from) + "#" + e.label).second)
            throw Error("language automaton is not deterministic: state \"" + l.state(e.from) +
                        "\" has two transitions labeled \"" + e.label + "\"");
    }
}

} // namespace detail

/// Rich input set of a regular language, given as a deterministic automaton
/// (epsilon allowed only on normalization edges into the accepting state).
inline IriAutomaton find_iri_language(const TransitionSystem& l, double theta,
                                      const RateOptions& opts = {}) {
    detail::require_deterministic(l, /*allow_exit_epsilon=*/true);
    return find_iri(l, theta, opts);
}

struct PathAutomaton {
    TransitionSystem underlying; // labels are composite path symbols "t<k>"
    std::unordered_map<std::string, std::string> input_symbol; // composite -> input ("" = eps)
};

/// Product of a labeled system with a deterministic, epsilon-free input
/// domain: accepts exactly the enter-to-exit paths of M whose input word lies
/// in L. Epsilon transitions of M leave the L coordinate fixed.
inline PathAutomaton build_constrained_path_automaton(const TransitionSystem& m,
                                                      const TransitionSystem& l) {
    detail::require_deterministic(l, /*allow_exit_epsilon=*/false);
    PathAutomaton out;
    if (m.is_empty() || l.is_empty()) return out;

    std::unordered_map<std::string, int> delta; // state#symbol -> next
    for (const auto& e : l.edges())
        delta.emplace(std::to_string(e.from) + "#" + e.label, e.to);

    std::vector<std::vector<std::size_t>> out_edges(m.state_count());
    for (std::size_t i = 0; i < m.edges().size(); ++i)
        out_edges[static_cast<std::size_t>(m.edges()[i].from)].push_back(i);

    auto state_id = [](int mi, int li) {
        return "p" + std::to_string(mi) + "." + std::to_string(li);
    };
    std::set<std::pair<int, int>> discovered{{m.enter(), l.enter()}};
    std::vector<std::pair<int, int>> queue{{m.enter(), l.enter()}};
    std::vector<Transition> edges;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [mi, li] = queue[head];
        for (std::size_t k : out_edges[static_cast<std::size_t>(mi)]) {
            const Edge& e = m.edges()[k];
            int lnext = li;
            if (!e.is_epsilon()) {
                auto it = delta.find(std::to_string(li) + "#" + e.label);
                if (it == delta.end()) continue; // domain rejects this input symbol
                lnext = it->second;
            }
            std::string label = "t" + std::to_string(k);
            out.input_symbol[label] = e.label;
            if (discovered.insert({e.to, lnext}).second) queue.emplace_back(e.to, lnext);
            edges.push_back({state_id(mi, li), state_id(e.to, lnext), label});
        }
    }
    if (!discovered.count({m.exit(), l.exit()})) return out; // empty-flagged product
    std::vector<std::string> states;
    for (auto [mi, li] : queue) states.push_back(state_id(mi, li));
    TransitionSystem raw(states, state_id(m.enter(), l.enter()), state_id(m.exit(), l.exit()),
                         edges);
    out.underlying = clean(raw);
    return out;
}

/// Rich input set of M constrained to the input domain L, projected to the
/// input alphabet: the rich-component search runs on the path automaton, then
/// every composite label is replaced by its input symbol (epsilon preserved).
inline IriAutomaton find_iri_constrained(const TransitionSystem& m, const TransitionSystem& l,
                                         double theta, const RateOptions& opts = {}) {
    PathAutomaton pa = build_constrained_path_automaton(m, l);
    if (pa.underlying.is_empty())
        throw Error("constrained system has rate zero (no accepted paths)");
    IriAutomaton iri = find_iri(pa.underlying, theta, opts);

    auto relabel = [&](std::vector<Transition>& ts) {
        for (auto& t : ts) {
            auto it = pa.input_symbol.find(t.label);
            if (it == pa.input_symbol.end())
                throw Error("internal: edge label does not stem from the path automaton");
            t.label = it->second;
        }
    };
    std::vector<Transition> edges;
    for (std::size_t i = 0; i < iri.underlying.edges().size(); ++i)
        edges.push_back(iri.underlying.transition(i));
    relabel(edges);
    relabel(iri.component.kept_edges);
    iri.underlying = TransitionSystem(iri.underlying.states(), iri.underlying.enter_id(),
                                      iri.underlying.exit_id(), edges);
    return iri;
}

} // namespace irate
