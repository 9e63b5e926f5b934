/* SPDX-License-Identifier: Apache-2.0 */
/*
 * irate -- command line front end.
 *
 * Subcommands: rate, irc, irc-sync, iri, encode, signal, spectrum, distance,
 * coverage, pipeline. Results go to stdout as JSON (numbers rounded to six
 * decimals); files written via --emit options carry full precision. Exit
 * codes: 0 success, 1 domain error (single-line diagnostic on stderr),
 * 2 usage error.
 */
#include <algorithm>
#include <charconv>
#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "irate/irc.hpp"
#include "irate/iri.hpp"
#include "irate/rate.hpp"
#include "irate/signal.hpp"
#include "irate/sync.hpp"
#include "irate/trace.hpp"
#include "irate/transition_system.hpp"

namespace {

using json = nlohmann::ordered_json;

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string full(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw irate::Error("cannot open file \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw irate::Error("cannot write file \"" + path + "\"");
    out << content;
}

void emit(const json& doc) { std::cout << doc.dump() << "\n"; }

irate::TransitionSystem load_system(const std::string& path, bool normalize) {
    irate::ParseOptions opts;
    opts.normalize_endpoints = normalize;
    try {
        return irate::parse_system(read_file(path), opts);
    } catch (const irate::Error& e) {
        throw irate::Error(path + ": " + e.what());
    }
}

json component_json(const irate::RichComponent& c) {
    json out;
    out["kept_states"] = c.kept_states;
    auto& edges = out["kept_edges"] = json::array();
    for (const auto& t : c.kept_edges) {
        json e{{"from", t.from}, {"to", t.to}};
        if (!t.label.empty()) e["label"] = t.label;
        edges.push_back(std::move(e));
    }
    out["entry"] = c.entry;
    out["exit"] = c.exit;
    out["lambda"] = round6(c.lambda_component);
    return out;
}

json log_json(const irate::RichComponent& c) {
    json log = json::array();
    for (const auto& entry : c.trace_log) {
        json e{{"from", entry.edge.from}, {"to", entry.edge.to}};
        if (!entry.edge.label.empty()) e["label"] = entry.edge.label;
        log.push_back(json{{"edge", std::move(e)},
                           {"action", entry.kept_deleted ? "deleted" : "restored"}});
    }
    return log;
}

unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("IRATE_THREADS")) {
        unsigned v = 0;
        auto [p, ec] = std::from_chars(env, env + std::string(env).size(), v);
        (void)p;
        if (ec == std::errc() && v >= 1) return std::min(v, hw);
    }
    return hw;
}

std::vector<irate::Lz78Encoding> encode_all(const std::vector<std::string>& paths) {
    std::vector<irate::Lz78Encoding> encodings(paths.size());
    std::vector<std::string> errors(paths.size());
    unsigned workers = std::min<std::size_t>(thread_cap(), paths.size());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < paths.size(); i += workers) {
                try {
                    encodings[i] = irate::lz78_encode(irate::read_trace(read_file(paths[i])));
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < paths.size(); ++i)
        if (!errors[i].empty()) throw irate::Error(paths[i] + ": " + errors[i]);
    return encodings;
}

std::string signal_csv(const irate::BitRateSignal& sig) {
    std::string out = "index,rate\n";
    for (std::size_t i = 0; i < sig.size(); ++i)
        out += std::to_string(i + 1) + "," + full(sig.values[i]) + "\n";
    return out;
}

std::string spectrum_csv(const irate::Spectrum& sp) {
    std::string out = "normalized_frequency,magnitude\n";
    for (std::size_t k = 0; k < sp.magnitudes.size(); ++k)
        out += full(sp.normalized_frequencies[k]) + "," + full(sp.magnitudes[k]) + "\n";
    return out;
}

struct SpectrumPeak {
    double frequency = 0.0;
    double magnitude = 0.0;
};

// argmax over the lower half, DC excluded
SpectrumPeak spectrum_peak(const irate::Spectrum& sp) {
    SpectrumPeak peak;
    for (std::size_t k = 1; k <= sp.magnitudes.size() / 2; ++k)
        if (sp.magnitudes[k] > peak.magnitude) {
            peak.magnitude = sp.magnitudes[k];
            peak.frequency = sp.normalized_frequencies[k];
        }
    return peak;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"information rate toolkit for transition systems and execution traces"};
    app.require_subcommand(1);

    std::string in_path, m1_path, m2_path, pairs_path, lang_path;
    std::vector<std::string> trace_paths, rel_paths;
    std::string emit_path, emit_signal_path, emit_spectrum_path, oracle_window;
    double theta = 0.79;
    std::size_t blocks = 1000, window = 5;
    bool normalize = false, emit_log = false, as_language = false;

    auto* c_rate = app.add_subcommand("rate", "information rate of a transition system");
    c_rate->add_option("-i,--input", in_path, "transition system JSON")->required();
    c_rate->add_option("--oracle", oracle_window, "also report the counting estimate over LO:HI");
    c_rate->add_flag("--normalize-endpoints", normalize, "accept enter/exit lists");

    auto* c_irc = app.add_subcommand("irc", "find an information-rich component");
    c_irc->add_option("-i,--input", in_path)->required();
    c_irc->add_option("--theta", theta, "rate fraction in [0,1]")->capture_default_str();
    c_irc->add_flag("--emit-log", emit_log, "include the delete/restore decision log");
    c_irc->add_flag("--normalize-endpoints", normalize);

    auto* c_sync = app.add_subcommand("irc-sync", "rich components under synchronous composition");
    c_sync->add_option("--i1", m1_path, "first transition system JSON")->required();
    c_sync->add_option("--i2", m2_path, "second transition system JSON")->required();
    c_sync->add_option("--pairs", pairs_path, "synchronization pairs JSON")->required();
    c_sync->add_option("--theta", theta)->capture_default_str();

    auto* c_iri = app.add_subcommand("iri", "find an information-rich input automaton");
    c_iri->add_option("-i,--input", in_path)->required();
    c_iri->add_option("--lang", lang_path, "deterministic input-domain automaton JSON");
    c_iri->add_flag("--as-language", as_language, "treat the input as a language DFA");
    c_iri->add_option("--theta", theta)->capture_default_str();
    c_iri->add_option("--emit", emit_path, "write the resulting automaton JSON");
    c_iri->add_flag("--normalize-endpoints", normalize);

    auto* c_encode = app.add_subcommand("encode", "LZ78-encode a trace");
    c_encode->add_option("-t,--trace", trace_paths, "trace file")->required()->expected(1);
    c_encode->add_option("--emit", emit_path, "write per-instruction bit CSV");

    auto* c_signal = app.add_subcommand("signal", "block-averaged bit-rate signal of a trace");
    c_signal->add_option("-t,--trace", trace_paths)->required()->expected(1);
    c_signal->add_option("--blocks", blocks)->capture_default_str();
    c_signal->add_option("--emit", emit_path, "write signal CSV");

    auto* c_spectrum = app.add_subcommand("spectrum", "magnitude spectrum of the bit-rate signal");
    c_spectrum->add_option("-t,--trace", trace_paths)->required()->expected(1);
    c_spectrum->add_option("--blocks", blocks)->capture_default_str();
    c_spectrum->add_option("--window", window, "odd moving-average width (1 = raw)")
        ->capture_default_str();
    c_spectrum->add_option("--emit", emit_path, "write spectrum CSV");

    auto* c_distance = app.add_subcommand("distance", "squared distance between two signals");
    c_distance->add_option("-t,--trace", trace_paths, "two trace files")->required()->expected(2);
    c_distance->add_option("--blocks", blocks)->capture_default_str();

    auto* c_coverage = app.add_subcommand("coverage", "bit-rate coverage of a test set");
    c_coverage->add_option("-t,--trace", trace_paths, "trace files")->required();
    c_coverage->add_option("--rel", rel_paths, "extra traces reported as Cover(t|T)");
    c_coverage->add_option("--blocks", blocks)->capture_default_str();

    auto* c_pipeline = app.add_subcommand("pipeline", "trace -> encoding -> signal -> spectrum");
    c_pipeline->add_option("-t,--trace", trace_paths)->required()->expected(1);
    c_pipeline->add_option("--blocks", blocks)->capture_default_str();
    c_pipeline->add_option("--window", window)->capture_default_str();
    c_pipeline->add_option("--emit-signal", emit_signal_path, "write signal CSV");
    c_pipeline->add_option("--emit-spectrum", emit_spectrum_path, "write spectrum CSV");

    // accept the documented short spellings -i1/-i2
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "-i1") a = "--i1";
        if (a == "-i2") a = "--i2";
        args.push_back(std::move(a));
    }
    std::reverse(args.begin(), args.end()); // CLI11 consumes back to front

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "irate: " << e.what() << "\n";
        return 2;
    }

    try {
        if (c_rate->parsed()) {
            auto m = load_system(in_path, normalize);
            auto r = irate::spectral_rate(m);
            json out{{"rho", round6(r.rho)}, {"lambda", round6(r.lambda)}};
            if (!oracle_window.empty()) {
                std::size_t lo = 0, hi = 0;
                auto colon = oracle_window.find(':');
                bool ok = colon != std::string::npos;
                if (ok) {
                    const char* s = oracle_window.c_str();
                    auto r1 = std::from_chars(s, s + colon, lo);
                    auto r2 = std::from_chars(s + colon + 1, s + oracle_window.size(), hi);
                    ok = r1.ec == std::errc() && r2.ec == std::errc() &&
                         r1.ptr == s + colon && r2.ptr == s + oracle_window.size();
                }
                if (!ok) throw irate::Error("--oracle expects LO:HI, e.g. 200:264");
                out["oracle_estimate"] = round6(irate::rate_estimate_from_counts(m, lo, hi));
            }
            emit(out);
        } else if (c_irc->parsed()) {
            auto m = load_system(in_path, normalize);
            auto comp = irate::find_irc(m, theta);
            json out = component_json(comp);
            if (emit_log) out["log"] = log_json(comp);
            emit(out);
        } else if (c_sync->parsed()) {
            auto m1 = load_system(m1_path, false);
            auto m2 = load_system(m2_path, false);
            auto pairs = irate::parse_sync_pairs(read_file(pairs_path));
            auto res = irate::find_sync_irc(m1, m2, pairs, theta);
            emit(json{{"lambda_composed", round6(res.lambda_composed)},
                      {"m1", component_json(res.first)},
                      {"m2", component_json(res.second)}});
        } else if (c_iri->parsed()) {
            auto m = load_system(in_path, normalize);
            irate::IriAutomaton iri;
            if (!lang_path.empty()) {
                auto l = load_system(lang_path, normalize);
                iri = irate::find_iri_constrained(m, l, theta);
            } else if (as_language) {
                iri = irate::find_iri_language(m, theta);
            } else {
                iri = irate::find_iri(m, theta);
            }
            if (!emit_path.empty()) write_file(emit_path, irate::to_json(iri.underlying).dump(2) + "\n");
            emit(json{{"lambda_path", round6(iri.lambda_path)},
                      {"alpha", iri.alpha},
                      {"beta", iri.beta},
                      {"states", iri.underlying.state_count()},
                      {"edges", iri.underlying.edges().size()}});
        } else if (c_encode->parsed()) {
            auto enc = irate::lz78_encode(irate::read_trace(read_file(trace_paths[0])));
            if (!emit_path.empty()) {
                std::string csv = "index,token_bits\n";
                for (std::size_t i = 0; i < enc.per_symbol_bits.size(); ++i)
                    csv += std::to_string(i + 1) + "," + full(enc.per_symbol_bits[i]) + "\n";
                write_file(emit_path, csv);
            }
            json out{{"tokens", enc.per_symbol_bits.size()},
                     {"alphabet", enc.alphabet.size()},
                     {"phrases", enc.phrases.size()},
                     {"total_bits", enc.total_bits}};
            if (!enc.per_symbol_bits.empty()) out["exe_rate"] = round6(irate::exe_rate_estimate(enc));
            emit(out);
        } else if (c_signal->parsed()) {
            auto enc = irate::lz78_encode(irate::read_trace(read_file(trace_paths[0])));
            auto sig = irate::block_signal(enc.per_symbol_bits, blocks);
            if (!emit_path.empty()) write_file(emit_path, signal_csv(sig));
            auto st = irate::stats(sig);
            emit(json{{"blocks", sig.size()},
                      {"block_size", sig.block_size},
                      {"mean", round6(st.mean)},
                      {"variance", round6(st.variance)}});
        } else if (c_spectrum->parsed()) {
            auto enc = irate::lz78_encode(irate::read_trace(read_file(trace_paths[0])));
            auto sig = irate::block_signal(enc.per_symbol_bits, blocks);
            auto sp = irate::spectrum(sig, window);
            if (!emit_path.empty()) write_file(emit_path, spectrum_csv(sp));
            auto peak = spectrum_peak(sp);
            emit(json{{"blocks", sig.size()},
                      {"window", window},
                      {"peak_frequency", round6(peak.frequency)},
                      {"peak_magnitude", round6(peak.magnitude)}});
        } else if (c_distance->parsed()) {
            auto encs = encode_all(trace_paths);
            auto x = irate::block_signal(encs[0].per_symbol_bits, blocks);
            auto y = irate::block_signal(encs[1].per_symbol_bits, blocks);
            emit(json{{"distance", round6(irate::distance_squared(x, y))}});
        } else if (c_coverage->parsed()) {
            auto encs = encode_all(trace_paths);
            std::vector<std::pair<std::string, irate::BitRateSignal>> signals;
            for (std::size_t i = 0; i < encs.size(); ++i)
                signals.emplace_back(trace_paths[i],
                                     irate::block_signal(encs[i].per_symbol_bits, blocks));
            auto rep = irate::cover(signals);
            json pairwise = json::array();
            for (std::size_t i = 0; i < signals.size(); ++i)
                for (std::size_t j = i + 1; j < signals.size(); ++j)
                    pairwise.push_back(
                        json::array({rep.ids[i], rep.ids[j], round6(rep.pairwise[i][j])}));
            json out{{"cover", round6(rep.cover)}, {"pairwise", std::move(pairwise)}};
            if (!rel_paths.empty()) {
                std::vector<irate::BitRateSignal> set;
                for (auto& [id, sig] : signals) set.push_back(sig);
                json rel = json::array();
                for (const auto& enc2 : encode_all(rel_paths)) {
                    auto t = irate::block_signal(enc2.per_symbol_bits, blocks);
                    rel.push_back(round6(irate::cover_rel(t, set)));
                }
                json relobj = json::array();
                for (std::size_t i = 0; i < rel_paths.size(); ++i)
                    relobj.push_back(json::array({rel_paths[i], rel[i]}));
                out["relative"] = std::move(relobj);
            }
            emit(out);
        } else if (c_pipeline->parsed()) {
            auto enc = irate::lz78_encode(irate::read_trace(read_file(trace_paths[0])));
            auto sig = irate::block_signal(enc.per_symbol_bits, blocks);
            if (!emit_signal_path.empty()) write_file(emit_signal_path, signal_csv(sig));
            auto sp = irate::spectrum(sig, window);
            if (!emit_spectrum_path.empty()) write_file(emit_spectrum_path, spectrum_csv(sp));
            auto st = irate::stats(sig);
            emit(json{{"tokens", enc.per_symbol_bits.size()},
                      {"total_bits", enc.total_bits},
                      {"exe_rate", round6(irate::exe_rate_estimate(enc))},
                      {"blocks", sig.size()},
                      {"mean", round6(st.mean)},
                      {"variance", round6(st.variance)}});
        }
    } catch (const std::exception& e) {
        std::cerr << "irate: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
