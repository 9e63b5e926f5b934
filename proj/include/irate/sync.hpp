/* SPDX-License-Identifier: Apache-2.0 */
/*
 * sync.hpp -- synchronous composition of two systems.
 *
 * A path of M1 || M2 is a word over the alphabet Qhat1 u Pi u Qhat2 (unpaired
 * M1 states, synchronization pairs, unpaired M2 states) whose projection to
 * either machine -- drop the other machine's symbols and keep that machine's
 * half of each pair -- is an enter-to-exit path of that machine.
 *
 * The word set is accepted by a DFA over that alphabet whose states track the
 * progress of each machine: "not started" or its current state. Reading a
 * symbol advances the named machine(s) into the named state(s); this is valid
 * when the machine has not started and the state is its enter state, or when
 * the machine currently sits at c and c -> state is a transition. Labels and
 * parallel-edge multiplicity play no role: words are state sequences.
 */
#pragma once

#include <set>
#include <string>
#include <vector>

#include "irate/error.hpp"
#include "irate/irc.hpp"
#include "irate/rate.hpp"
#include "irate/transition_system.hpp"

namespace irate {

struct PathSymbol {
    enum class Kind { m1, m2, sync } kind = Kind::m1;
    int s1 = -1; // state index in M1 (kind m1 or sync)
    int s2 = -1; // state index in M2 (kind m2 or sync)
};

struct SyncProduct {
    TransitionSystem underlying; // cleaned DFA; edge labels name path symbols
    std::vector<PathSymbol> alphabet;
};

namespace detail {

struct SyncPairsIndexed {
    std::vector<int> pair_of_1; // per M1 state: M2 partner index or -1
    std::vector<int> pair_of_2;
};

inline SyncPairsIndexed index_pairs(const TransitionSystem& m1, const TransitionSystem& m2,
                                    const SyncPairSet& pairs) {
    SyncPairsIndexed out;
    out.pair_of_1.assign(m1.state_count(), -1);
    out.pair_of_2.assign(m2.state_count(), -1);
    for (const auto& [a, b] : pairs.pairs) {
        auto i = m1.index_of(a);
        if (!i) throw Error("pair references unknown state \"" + a + "\" of the first system");
        auto j = m2.index_of(b);
        if (!j) throw Error("pair references unknown state \"" + b + "\" of the second system");
        if (out.pair_of_1[static_cast<std::size_t>(*i)] != -1)
            throw Error("state \"" + a + "\" appears in more than one pair");
        if (out.pair_of_2[static_cast<std::size_t>(*j)] != -1)
            throw Error("state \"" + b + "\" appears in more than one pair");
        out.pair_of_1[static_cast<std::size_t>(*i)] = *j;
        out.pair_of_2[static_cast<std::size_t>(*j)] = *i;
    }
    return out;
}

} // namespace detail

inline SyncProduct build_sync_product(const TransitionSystem& m1, const TransitionSystem& m2,
                                      const SyncPairSet& pairs) {
    SyncProduct out;
    if (m1.is_empty() || m2.is_empty()) return out;
    auto idx = detail::index_pairs(m1, m2, pairs);

    for (int s = 0; s < static_cast<int>(m1.state_count()); ++s)
        if (idx.pair_of_1[static_cast<std::size_t>(s)] == -1)
            out.alphabet.push_back({PathSymbol::Kind::m1, s, -1});
    for (int s = 0; s < static_cast<int>(m2.state_count()); ++s)
        if (idx.pair_of_2[static_cast<std::size_t>(s)] == -1)
            out.alphabet.push_back({PathSymbol::Kind::m2, -1, s});
    for (int s = 0; s < static_cast<int>(m1.state_count()); ++s)
        if (idx.pair_of_1[static_cast<std::size_t>(s)] != -1)
            out.alphabet.push_back({PathSymbol::Kind::sync, s, idx.pair_of_1[static_cast<std::size_t>(s)]});

    std::vector<std::vector<bool>> step1(m1.state_count(), std::vector<bool>(m1.state_count(), false));
    for (const auto& e : m1.edges()) step1[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)] = true;
    std::vector<std::vector<bool>> step2(m2.state_count(), std::vector<bool>(m2.state_count(), false));
    for (const auto& e : m2.edges()) step2[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)] = true;

    // -1 encodes "not started"
    auto may_enter_1 = [&](int cur, int next) {
        return cur < 0 ? next == m1.enter() : step1[static_cast<std::size_t>(cur)][static_cast<std::size_t>(next)];
    };
    auto may_enter_2 = [&](int cur, int next) {
        return cur < 0 ? next == m2.enter() : step2[static_cast<std::size_t>(cur)][static_cast<std::size_t>(next)];
    };
    auto state_id = [](int c1, int c2) {
        return "q" + std::to_string(c1 + 1) + "." + std::to_string(c2 + 1);
    };
    auto symbol_label = [&](const PathSymbol& sym) {
        switch (sym.kind) {
            case PathSymbol::Kind::m1: return "1:" + m1.state(sym.s1);
            case PathSymbol::Kind::m2: return "2:" + m2.state(sym.s2);
            default: return "(" + m1.state(sym.s1) + "," + m2.state(sym.s2) + ")";
        }
    };

    std::set<std::pair<int, int>> discovered{{-1, -1}};
    std::vector<std::pair<int, int>> queue{{-1, -1}};
    std::vector<Transition> edges;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [c1, c2] = queue[head];
        for (const auto& sym : out.alphabet) {
            int n1 = c1, n2 = c2;
            bool ok = false;
            switch (sym.kind) {
                case PathSymbol::Kind::m1:
                    ok = may_enter_1(c1, sym.s1);
                    n1 = sym.s1;
                    break;
                case PathSymbol::Kind::m2:
                    ok = may_enter_2(c2, sym.s2);
                    n2 = sym.s2;
                    break;
                case PathSymbol::Kind::sync:
                    ok = may_enter_1(c1, sym.s1) && may_enter_2(c2, sym.s2);
                    n1 = sym.s1;
                    n2 = sym.s2;
                    break;
            }
            if (!ok) continue;
            if (discovered.insert({n1, n2}).second) queue.emplace_back(n1, n2);
            edges.push_back({state_id(c1, c2), state_id(n1, n2), symbol_label(sym)});
        }
    }
    // discovery order is the (deterministic) state order of the product
    std::vector<std::string> states;
    for (auto [c1, c2] : queue) states.push_back(state_id(c1, c2));

    if (!discovered.count({m1.exit(), m2.exit()})) {
        out.underlying = TransitionSystem::empty();
        return out;
    }
    TransitionSystem raw(states, state_id(-1, -1), state_id(m1.exit(), m2.exit()), edges);
    out.underlying = clean(raw);
    return out;
}

inline RateResult sync_rate(const TransitionSystem& m1, const TransitionSystem& m2,
                            const SyncPairSet& pairs, const RateOptions& opts = {}) {
    return spectral_rate(build_sync_product(m1, m2, pairs).underlying, opts);
}

struct SyncIrcResult {
    RichComponent first;
    RichComponent second;
    double lambda_composed = 0.0;
    int rate_evaluations = 0;
};

/// Greedy rich-component search under synchronous composition: try deleting
/// each edge once (all M1 edges in canonical order, then all M2 edges),
/// keeping the deletion when the composed rate stays above theta times the
/// original composed rate. Both sides retain all their states, in particular
/// enter and exit, which the returned components carry as entry/exit.
inline SyncIrcResult find_sync_irc(const TransitionSystem& m1, const TransitionSystem& m2,
                                   const SyncPairSet& pairs, double theta,
                                   const RateOptions& opts = {}) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw Error("theta must lie in [0, 1]");
    if (m1.is_empty() || m2.is_empty()) throw Error("composed rate is zero (empty side)");
    double lambda0 = sync_rate(m1, m2, pairs, opts).lambda;
    if (lambda0 <= 0.0) throw Error("composed rate is zero; any subgraph pair qualifies");
    const double threshold = theta * lambda0;

    SyncIrcResult out;
    std::vector<bool> alive1(m1.edges().size(), true), alive2(m2.edges().size(), true);
    auto composed_lambda = [&]() {
        return spectral_rate(
                   build_sync_product(with_edges(m1, alive1), with_edges(m2, alive2), pairs).underlying,
                   opts)
            .lambda;
    };
    auto try_edge = [&](const TransitionSystem& m, std::vector<bool>& alive, std::size_t i,
                        RichComponent& log_side) {
        alive[i] = false;
        double lam = composed_lambda();
        ++out.rate_evaluations;
        bool keep_deleted = lam >= threshold - kRateSlack;
        if (!keep_deleted) alive[i] = true;
        log_side.trace_log.push_back({m.transition(i), keep_deleted});
    };
    for (std::size_t i = 0; i < alive1.size(); ++i) try_edge(m1, alive1, i, out.first);
    for (std::size_t i = 0; i < alive2.size(); ++i) try_edge(m2, alive2, i, out.second);

    auto make_component = [&](const TransitionSystem& m, const std::vector<bool>& alive,
                              double theta_val, RichComponent& c) {
        TransitionSystem restricted = with_edges(m, alive);
        TransitionSystem cleaned = clean(restricted);
        std::vector<bool> keep(m.state_count(), false);
        for (const auto& s : cleaned.states()) keep[static_cast<std::size_t>(*m.index_of(s))] = true;
        keep[static_cast<std::size_t>(m.enter())] = true;
        keep[static_cast<std::size_t>(m.exit())] = true;
        for (std::size_t i = 0; i < keep.size(); ++i)
            if (keep[i]) c.kept_states.push_back(m.state(static_cast<int>(i)));
        for (std::size_t i = 0; i < alive.size(); ++i) {
            if (!alive[i]) continue;
            auto t = m.transition(i);
            if (keep[static_cast<std::size_t>(*m.index_of(t.from))] &&
                keep[static_cast<std::size_t>(*m.index_of(t.to))])
                c.kept_edges.push_back(std::move(t));
        }
        c.entry = m.enter_id();
        c.exit = m.exit_id();
        c.theta = theta_val;
        c.lambda_component = spectral_rate(c.to_system(), opts).lambda;
    };
    make_component(m1, alive1, theta, out.first);
    make_component(m2, alive2, theta, out.second);
    out.lambda_composed = composed_lambda();
    return out;
}

} // namespace irate
