/* SPDX-License-Identifier: Apache-2.0 */
/*
 * rate.hpp -- information rate of a transition system.
 *
 * The rate is lambda = max(0, log2 rho), where rho is the spectral radius
 * (Perron root) of the adjacency matrix of the cleaned system: enter-to-exit
 * path counts grow like rho^n once every state lies on such a path. The
 * counting route (exact big-integer DP plus a log-count slope) is kept as an
 * independent cross-check of the spectral route.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "irate/error.hpp"
#include "irate/transition_system.hpp"

namespace irate {

using BigInt = boost::multiprecision::cpp_int;

struct RateResult {
    double rho = 0.0;
    double lambda = 0.0; // bits per symbol, clamped at 0
    int iterations = 0;
    bool converged = true;
    double residual = 0.0;
};

struct RateOptions {
    double tolerance = 1e-12;
    int max_iterations = 100000;
};

/// Power iteration gave up; carries the best estimate so far.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, RateResult best)
        : Error(what), best_estimate(best) {}
    RateResult best_estimate;
};

struct PathCount {
    std::size_t length = 0;
    BigInt count;
};

/// Adjacency with parallel-edge multiplicity.
inline std::vector<std::vector<double>> adjacency_matrix(const TransitionSystem& m) {
    std::vector<std::vector<double>> a(m.state_count(), std::vector<double>(m.state_count(), 0.0));
    for (const auto& e : m.edges())
        a[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)] += 1.0;
    return a;
}

/// log2 of a positive big integer, accurate to double precision.
inline double log2_big(const BigInt& x) {
    assert(x > 0);
    auto bits = boost::multiprecision::msb(x); // floor(log2 x)
    if (bits <= 52) return std::log2(x.convert_to<double>());
    BigInt top = x >> (bits - 52);
    return static_cast<double>(bits - 52) + std::log2(top.convert_to<double>());
}

/// Exact enter-to-exit walk counts S(0..n_max), with edge multiplicity.
inline std::vector<BigInt> count_paths_up_to(const TransitionSystem& m, std::size_t n_max) {
    std::vector<BigInt> out(n_max + 1, BigInt(0));
    if (m.is_empty()) return out;
    const std::size_t n = m.state_count();
    std::vector<std::vector<std::pair<int, int>>> in_mult(n); // (from, multiplicity) per target
    {
        std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
        for (const auto& e : m.edges())
            ++mult[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)];
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (mult[i][j] > 0) in_mult[j].emplace_back(static_cast<int>(i), mult[i][j]);
    }
    std::vector<BigInt> v(n, BigInt(0)), next(n);
    v[static_cast<std::size_t>(m.enter())] = 1;
    out[0] = v[static_cast<std::size_t>(m.exit())];
    for (std::size_t step = 1; step <= n_max; ++step) {
        for (std::size_t j = 0; j < n; ++j) {
            BigInt acc = 0;
            for (auto [i, k] : in_mult[j]) acc += v[static_cast<std::size_t>(i)] * k;
            next[j] = std::move(acc);
        }
        v.swap(next);
        out[step] = v[static_cast<std::size_t>(m.exit())];
    }
    return out;
}

inline PathCount count_paths(const TransitionSystem& m, std::size_t n) {
    return {n, count_paths_up_to(m, n).back()};
}

namespace detail {

/// Spectral radius of one strongly connected block via power iteration on
/// (A + I); the shift gives the block a positive diagonal, making it
/// primitive, so periodic graphs (pure cycles) converge too.
/// rho(A) = rho(A + I) - 1.
///
/// The stopping rule is the Collatz-Wielandt enclosure
///     min_i (Bv)_i / v_i  <=  rho(B)  <=  max_i (Bv)_i / v_i,
/// which brackets the Perron root at every step for positive v. Successive
/// Rayleigh differences are not a safe test here: with a complex subdominant
/// pair the Rayleigh sequence oscillates and consecutive values can agree to
/// any tolerance while still far from the limit.
inline void scc_spectral_radius(const std::vector<std::vector<double>>& a,
                                const std::vector<int>& comp, const RateOptions& opts,
                                RateResult& acc, double& rho_out) {
    const std::size_t m = comp.size();
    if (m == 1) {
        rho_out = a[static_cast<std::size_t>(comp[0])][static_cast<std::size_t>(comp[0])];
        return;
    }
    std::vector<std::vector<double>> b(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            b[i][j] = a[static_cast<std::size_t>(comp[i])][static_cast<std::size_t>(comp[j])];
        b[i][i] += 1.0;
    }
    std::vector<double> v(m, 1.0), w(m);
    double lo = 0.0, hi = 0.0;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += b[i][j] * v[j];
            w[i] = s;
        }
        lo = w[0] / v[0];
        hi = lo;
        for (std::size_t i = 1; i < m; ++i) {
            double ratio = w[i] / v[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        if (hi - lo < opts.tolerance * hi) break;
        double top = 0.0;
        for (double x : w) top = std::max(top, x);
        for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / top;
    }
    acc.iterations += it + 1;
    acc.residual = std::max(acc.residual, hi - lo);
    if (it == opts.max_iterations) acc.converged = false;
    rho_out = 0.5 * (lo + hi) - 1.0;
}

} // namespace detail

/// Spectral radius and rate of clean(M). Empty or acyclic systems have
/// rho per the (nilpotent) matrix and lambda = 0; rates are clamped at 0.
inline RateResult spectral_rate(const TransitionSystem& m, const RateOptions& opts = {}) {
    RateResult r;
    TransitionSystem c = clean(m);
    if (c.is_empty()) return r;
    auto a = adjacency_matrix(c);
    double rho = 0.0;
    for (const auto& comp : scc_decompose(c)) {
        double block = 0.0;
        detail::scc_spectral_radius(a, comp, opts, r, block);
        rho = std::max(rho, block);
    }
    r.rho = rho;
    // clamp: rho <= 1 means rate 0, and rounding in the Rayleigh quotient can
    // leave rho a few ulps above an exact 1
    r.lambda = rho > 1.0 + 1e-12 ? std::log2(rho) : 0.0;
    if (!r.converged) {
        throw ConvergenceError("power iteration did not converge within " +
                                   std::to_string(opts.max_iterations) +
                                   " iterations (best rho " + std::to_string(r.rho) + ")",
                               r);
    }
    return r;
}

/// Finite-n surrogate for the limit rate: least-squares slope of log2 S(n)
/// against n over the window, using only n with S(n) > 0. Returns 0 when
/// fewer than two counts are nonzero.
inline double rate_estimate_from_counts(const TransitionSystem& m, std::size_t n_lo,
                                        std::size_t n_hi) {
    if (n_lo >= n_hi) throw Error("rate estimate window must satisfy n_lo < n_hi");
    auto counts = count_paths_up_to(m, n_hi);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n = n_lo; n <= n_hi; ++n)
        if (counts[n] > 0) pts.emplace_back(static_cast<double>(n), log2_big(counts[n]));
    if (pts.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxy / sxx;
}

} // namespace irate
