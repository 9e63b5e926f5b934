/* SPDX-License-Identifier: Apache-2.0 */
/*
 * signal.hpp -- bit-rate signals, spectra, distances and coverage.
 *
 * A bit-rate signal is the sequence of block-averaged instantaneous bit
 * rates of an encoded trace. Spectra are DFTs of the mean-removed signal
 * (radix-2 FFT for power-of-two lengths, direct transform otherwise), with
 * an optional circular moving average over the magnitudes for display. The
 * squared distance between two signals is computed from the mean-removed
 * parts plus the mean offset, ||x - y||^2 + N (m_x - m_y)^2, which equals
 * the direct squared distance of the raw signals.
 */
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "irate/error.hpp"

namespace irate {

struct BitRateSignal {
    std::vector<double> values; // bits per instruction, one per block
    std::size_t block_size = 0; // instructions per block (last block may absorb more)
    double mean = 0.0;

    std::size_t size() const { return values.size(); }
};

/// Cut a per-instruction rate sequence into `blocks` consecutive blocks of
/// floor(L / blocks) instructions each; the final block absorbs the
/// remainder. Block value = mean instantaneous rate within the block.
inline BitRateSignal block_signal(const std::vector<double>& per_symbol_bits, std::size_t blocks) {
    if (blocks < 1) throw Error("block count must be at least 1");
    const std::size_t len = per_symbol_bits.size();
    if (len < blocks) throw Error("fewer instructions than blocks");
    BitRateSignal sig;
    sig.block_size = len / blocks;
    sig.values.reserve(blocks);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t end = (b + 1 == blocks) ? len : pos + sig.block_size;
        double sum = 0.0;
        for (std::size_t i = pos; i < end; ++i) sum += per_symbol_bits[i];
        sig.values.push_back(sum / static_cast<double>(end - pos));
        pos = end;
    }
    double total = 0.0;
    for (double v : sig.values) total += v;
    sig.mean = total / static_cast<double>(blocks);
    return sig;
}

struct Spectrum {
    std::vector<std::complex<double>> coefficients; // raw DFT of the mean-removed signal
    std::vector<double> magnitudes;                 // smoothed when window > 1
    std::vector<double> normalized_frequencies;     // k / N
};

namespace detail {

inline std::vector<std::complex<double>> dft_direct(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(i) / static_cast<double>(n);
            acc += x[i] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        out[k] = acc;
    }
    return out;
}

inline void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        std::complex<double> wl(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1.0;
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

inline std::vector<std::complex<double>> dft(std::vector<std::complex<double>> x) {
    if (x.size() >= 2 && (x.size() & (x.size() - 1)) == 0) {
        fft_radix2(x);
        return x;
    }
    return dft_direct(x);
}

} // namespace detail

/// DFT magnitude spectrum of the mean-removed signal. `window` must be odd;
/// window > 1 smooths the magnitudes with a centered circular moving average
/// (display only -- coefficients stay raw).
inline Spectrum spectrum(const BitRateSignal& sig, std::size_t window = 1) {
    const std::size_t n = sig.size();
    if (n < 2) throw Error("spectrum needs a signal of length at least 2");
    if (window < 1 || window > n || window % 2 == 0)
        throw Error("smoothing window must be odd and within the signal length");

    std::vector<std::complex<double>> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = sig.values[i] - sig.mean;
    Spectrum sp;
    sp.coefficients = detail::dft(std::move(x));
    sp.coefficients[0] = 0.0; // mean removal forces the DC bin to zero
    sp.magnitudes.resize(n);
    for (std::size_t k = 0; k < n; ++k) sp.magnitudes[k] = std::abs(sp.coefficients[k]);
    if (window > 1) {
        std::vector<double> smooth(n, 0.0);
        const std::size_t half = window / 2;
        for (std::size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (std::size_t d = 0; d < window; ++d)
                acc += sp.magnitudes[(k + n - half + d) % n];
            smooth[k] = acc / static_cast<double>(window);
        }
        sp.magnitudes = std::move(smooth);
    }
    sp.normalized_frequencies.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        sp.normalized_frequencies[k] = static_cast<double>(k) / static_cast<double>(n);
    return sp;
}

/// Squared distance between two bit-rate signals of equal length.
inline double distance_squared(const BitRateSignal& x, const BitRateSignal& y) {
    if (x.size() != y.size()) throw Error("signals differ in length");
    const std::size_t n = x.size();
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (x.values[i] - x.mean) - (y.values[i] - y.mean);
        diff += d * d;
    }
    double dm = x.mean - y.mean;
    return diff + static_cast<double>(n) * dm * dm;
}

struct SignalStats {
    double mean = 0.0;
    double variance = 0.0; // population form
};

inline SignalStats stats(const BitRateSignal& sig) {
    if (sig.size() == 0) throw Error("empty signal");
    SignalStats s;
    s.mean = sig.mean;
    for (double v : sig.values) s.variance += (v - sig.mean) * (v - sig.mean);
    s.variance /= static_cast<double>(sig.size());
    return s;
}

struct CoverageReport {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> pairwise; // symmetric, zero diagonal
    double cover = 0.0;
    std::vector<std::pair<std::string, double>> relative;
};

/// Cover(T): half the sum of all ordered-pair squared distances, i.e. the sum
/// over unordered pairs.
inline CoverageReport cover(const std::vector<std::pair<std::string, BitRateSignal>>& signals) {
    if (signals.empty()) throw Error("coverage needs at least one signal");
    const std::size_t n = signals.size();
    CoverageReport rep;
    rep.pairwise.assign(n, std::vector<double>(n, 0.0));
    for (const auto& [id, sig] : signals) rep.ids.push_back(id);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = distance_squared(signals[i].second, signals[j].second);
            rep.pairwise[i][j] = rep.pairwise[j][i] = d;
            rep.cover += d;
        }
    return rep;
}

/// Cover(t | T): total squared distance from a new signal to every member of
/// a non-empty set.
inline double cover_rel(const BitRateSignal& t, const std::vector<BitRateSignal>& set) {
    if (set.empty()) throw Error("relative coverage needs a non-empty reference set");
    double acc = 0.0;
    for (const auto& s : set) acc += distance_squared(t, s);
    return acc;
}

} // namespace irate
