/* SPDX-License-Identifier: Apache-2.0 */
/*
 * irc.hpp -- information-rich components.
 *
 * A theta-rich component of M is a minimal subgraph whose rate is at least
 * theta times the rate of M. find_irc runs the greedy search: try deleting
 * each edge once (canonical document order); keep the deletion when the
 * remaining system, still measured between M's enter and exit, stays above
 * theta * lambda_M, otherwise restore and mark the edge. When no unmarked
 * edge remains, the surviving graph is SCC-decomposed and the component with
 * the highest spectral rate is returned, entry = exit = its smallest-index
 * state.
 */
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irate/error.hpp"
#include "irate/rate.hpp"
#include "irate/transition_system.hpp"

namespace irate {

inline constexpr double kRateSlack = 1e-9;

struct IrcTraceEntry {
    Transition edge;
    bool kept_deleted = false; // false: restored and marked
};

struct RichComponent {
    std::vector<std::string> kept_states;
    std::vector<Transition> kept_edges;
    std::string entry;
    std::string exit;
    double lambda_component = 0.0;
    double theta = 0.0;
    std::vector<IrcTraceEntry> trace_log;
    int rate_evaluations = 0; // spectral evaluations spent in the deletion loop

    TransitionSystem to_system() const {
        return TransitionSystem(kept_states, entry, exit, kept_edges);
    }
};

struct IrcVerdict {
    bool rate_ok = false;
    bool minimal = false;
    std::optional<Transition> witness; // an edge whose deletion keeps the component rich
};

/// Greedy search with an explicit trial order over the edges of clean(M).
/// The public entry point below uses the canonical ascending order.
inline RichComponent find_irc_ordered(const TransitionSystem& m, double theta,
                                      std::span<const std::size_t> order,
                                      const RateOptions& opts = {}) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw Error("theta must lie in [0, 1]");
    TransitionSystem base = clean(m);
    if (base.is_empty()) throw Error("system has no enter-to-exit paths");
    const double lambda_m = spectral_rate(base, opts).lambda;
    if (lambda_m <= 0.0 && theta > 0.0)
        throw Error("rate is zero; any subgraph is a theta-IRC");
    const double threshold = theta * lambda_m;

    RichComponent out;
    out.theta = theta;
    std::vector<bool> alive(base.edges().size(), true);
    for (std::size_t idx : order) {
        alive[idx] = false;
        double lam = spectral_rate(with_edges(base, alive), opts).lambda;
        ++out.rate_evaluations;
        bool keep_deleted = lam >= threshold - kRateSlack;
        if (!keep_deleted) alive[idx] = true;
        out.trace_log.push_back({base.transition(idx), keep_deleted});
    }

    TransitionSystem survivor = with_edges(base, alive);
    double best_lambda = -1.0;
    for (const auto& comp : scc_decompose(survivor)) {
        std::vector<std::string> ids;
        for (int s : comp) ids.push_back(survivor.state(s));
        std::vector<Transition> inside;
        std::vector<bool> member(survivor.state_count(), false);
        for (int s : comp) member[static_cast<std::size_t>(s)] = true;
        for (const auto& e : survivor.edges())
            if (member[static_cast<std::size_t>(e.from)] && member[static_cast<std::size_t>(e.to)])
                inside.push_back(survivor.transition(e));
        TransitionSystem sub(ids, ids.front(), ids.front(), inside);
        double lam = spectral_rate(sub, opts).lambda;
        if (lam > best_lambda + 1e-12) {
            best_lambda = lam;
            out.kept_states = std::move(ids);
            out.kept_edges = std::move(inside);
        }
    }
    out.entry = out.exit = out.kept_states.front();
    out.lambda_component = best_lambda;
    return out;
}

inline RichComponent find_irc(const TransitionSystem& m, double theta,
                              const RateOptions& opts = {}) {
    TransitionSystem base = clean(m);
    if (base.is_empty()) throw Error("system has no enter-to-exit paths");
    std::vector<std::size_t> order(base.edges().size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    return find_irc_ordered(m, theta, order, opts);
}

/// Check the rate condition and single-edge minimality of a component
/// against its parent system.
inline IrcVerdict verify_irc(const TransitionSystem& m, const RichComponent& c, double theta,
                             const RateOptions& opts = {}) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw Error("theta must lie in [0, 1]");
    for (const auto& s : c.kept_states)
        if (!m.has_state(s)) throw Error("component is not a subgraph: unknown state \"" + s + "\"");
    for (const auto& e : c.kept_edges)
        if (!m.has_edge(e))
            throw Error("component is not a subgraph: edge " + e.from + " -> " + e.to +
                        " not in parent");
    TransitionSystem sys = c.to_system(); // validates entry/exit and endpoints

    const double threshold = theta * spectral_rate(m, opts).lambda;
    IrcVerdict v;
    v.rate_ok = spectral_rate(sys, opts).lambda >= threshold - kRateSlack;
    v.minimal = true;
    std::vector<bool> alive(sys.edges().size(), true);
    for (std::size_t i = 0; i < sys.edges().size(); ++i) {
        alive[i] = false;
        double lam = spectral_rate(with_edges(sys, alive), opts).lambda;
        alive[i] = true;
        if (lam >= threshold - kRateSlack) {
            v.minimal = false;
            v.witness = sys.transition(i);
            break;
        }
    }
    return v;
}

} // namespace irate
