/* SPDX-License-Identifier: Apache-2.0 */
/*
 * trace.hpp -- execution traces and LZ78 encoding.
 *
 * A trace is one instruction token per line; blank lines and '#' comments are
 * skipped. The incremental-parsing LZ78 encoder assigns phrase i the cost
 * ceil(log2 i) index bits (0 for i = 1) plus w = ceil(log2 |alphabet|) symbol
 * bits (0 for alphabets of size <= 1); a final partial phrase emits the index
 * only. Each token of a phrase carries phrase-bits / phrase-length as its
 * instantaneous bit rate, so the per-token rates sum back to the total.
 */
#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "irate/error.hpp"

namespace irate {

struct Trace {
    std::vector<std::string> tokens;
    std::vector<int> token_ids;         // index into alphabet
    std::vector<std::string> alphabet;  // distinct tokens, first-occurrence order

    std::size_t length() const { return tokens.size(); }
};

namespace detail {

/// Returns the byte offset of the first invalid UTF-8 sequence, or nullopt.
inline std::optional<std::size_t> invalid_utf8_at(const std::string& s) {
    std::size_t i = 0;
    const auto n = s.size();
    while (i < n) {
        auto b = static_cast<unsigned char>(s[i]);
        std::size_t len;
        unsigned min_cp;
        if (b < 0x80) {
            i += 1;
            continue;
        } else if ((b & 0xE0) == 0xC0) {
            len = 2;
            min_cp = 0x80;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
            min_cp = 0x800;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4;
            min_cp = 0x10000;
        } else {
            return i;
        }
        if (i + len > n) return i;
        unsigned cp = b & (0xFFu >> (len + 1));
        for (std::size_t k = 1; k < len; ++k) {
            auto c = static_cast<unsigned char>(s[i + k]);
            if ((c & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (c & 0x3Fu);
        }
        if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
        i += len;
    }
    return std::nullopt;
}

inline std::uint64_t ceil_log2(std::uint64_t x) {
    return x <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(x - 1));
}

} // namespace detail

inline Trace read_trace(const std::string& document) {
    if (auto bad = detail::invalid_utf8_at(document))
        throw Error("invalid UTF-8 at byte " + std::to_string(*bad));
    Trace t;
    std::unordered_map<std::string, int> interned;
    std::size_t pos = 0;
    while (pos <= document.size()) {
        auto nl = document.find('\n', pos);
        std::string line = document.substr(pos, nl == std::string::npos ? nl : nl - pos);
        pos = nl == std::string::npos ? document.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto [it, fresh] = interned.emplace(line, static_cast<int>(t.alphabet.size()));
        if (fresh) t.alphabet.push_back(line);
        t.token_ids.push_back(it->second);
        t.tokens.push_back(std::move(line));
    }
    return t;
}

struct Lz78Phrase {
    std::size_t prefix;       // earlier phrase number, 0 = empty phrase
    std::optional<int> extension; // token id; nullopt for the final partial phrase
    std::size_t length;       // tokens covered
    std::uint64_t bits;
};

struct Lz78Encoding {
    std::vector<Lz78Phrase> phrases;
    std::vector<double> per_symbol_bits; // one entry per trace token
    std::uint64_t total_bits = 0;
    std::uint64_t symbol_width = 0; // w = ceil(log2 |alphabet|)
    std::vector<std::string> alphabet;
};

inline Lz78Encoding lz78_encode(const Trace& t) {
    Lz78Encoding enc;
    enc.alphabet = t.alphabet;
    enc.symbol_width = detail::ceil_log2(t.alphabet.size());
    enc.per_symbol_bits.reserve(t.length());

    // trie node k corresponds to phrase k; node 0 is the empty phrase
    std::unordered_map<std::uint64_t, std::size_t> child;
    std::vector<std::size_t> depth{0};
    child.reserve(t.length() * 2);
    auto key = [](std::size_t node, int tok) {
        return (static_cast<std::uint64_t>(node) << 32) | static_cast<std::uint64_t>(tok);
    };

    auto flush = [&](std::size_t prefix, std::optional<int> ext, std::size_t len) {
        std::size_t number = enc.phrases.size() + 1;
        std::uint64_t bits = detail::ceil_log2(number) + (ext ? enc.symbol_width : 0);
        enc.phrases.push_back({prefix, ext, len, bits});
        enc.total_bits += bits;
        double share = static_cast<double>(bits) / static_cast<double>(len);
        for (std::size_t i = 0; i < len; ++i) enc.per_symbol_bits.push_back(share);
    };

    std::size_t cur = 0;
    for (int tok : t.token_ids) {
        auto it = child.find(key(cur, tok));
        if (it != child.end()) {
            cur = it->second;
            continue;
        }
        std::size_t node = depth.size();
        child.emplace(key(cur, tok), node);
        depth.push_back(depth[cur] + 1);
        flush(cur, tok, depth[cur] + 1);
        cur = 0;
    }
    if (cur != 0) flush(cur, std::nullopt, depth[cur]); // input ended on a dictionary entry
    return enc;
}

inline Trace lz78_decode(const Lz78Encoding& enc) {
    std::vector<std::vector<int>> dict{{}}; // phrase 0 = empty
    Trace t;
    t.alphabet = enc.alphabet;
    for (std::size_t i = 0; i < enc.phrases.size(); ++i) {
        const auto& p = enc.phrases[i];
        if (p.prefix >= i + 1)
            throw Error("dangling dictionary index " + std::to_string(p.prefix) + " in phrase " +
                        std::to_string(i + 1));
        std::vector<int> toks = dict[p.prefix];
        if (p.extension) {
            if (*p.extension < 0 || static_cast<std::size_t>(*p.extension) >= enc.alphabet.size())
                throw Error("phrase extension token out of range");
            toks.push_back(*p.extension);
            dict.push_back(toks);
        } else if (i + 1 != enc.phrases.size()) {
            throw Error("partial phrase before the end of the stream");
        }
        for (int id : toks) {
            t.token_ids.push_back(id);
            t.tokens.push_back(enc.alphabet[static_cast<std::size_t>(id)]);
        }
    }
    return t;
}

/// Average bits per symbol of the encoded trace: the compression-based
/// estimate of the execution rate.
inline double exe_rate_estimate(const Lz78Encoding& enc) {
    if (enc.per_symbol_bits.empty()) throw Error("cannot estimate the rate of an empty trace");
    return static_cast<double>(enc.total_bits) / static_cast<double>(enc.per_symbol_bits.size());
}

} // namespace irate
