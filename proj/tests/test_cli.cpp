/* SPDX-License-Identifier: Apache-2.0 */
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "support.hpp"

using support::data_file;
using support::run_cli;

namespace {

const std::string kTmp = "cli_tmp";

std::string tmp_path(const std::string& name) {
    std::filesystem::create_directories(kTmp);
    return kTmp + "/" + name;
}

std::string make_trace_file(const std::string& name, int length, int sigma, unsigned seed) {
    std::mt19937 rng(seed);
    std::string doc;
    for (int i = 0; i < length; ++i)
        doc += "t" + std::to_string(static_cast<int>(rng() % sigma)) + "\n";
    auto path = tmp_path(name);
    support::write_file(path, doc);
    return path;
}

} // namespace

TEST_CASE("rate prints the golden ratio rate") {
    auto res = run_cli("rate -i " + data_file("fib.json"));
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.out == "{\"rho\":1.618034,\"lambda\":0.694242}\n");
}

TEST_CASE("rate with a counting cross-check") {
    auto res = run_cli("rate -i " + data_file("fib.json") + " --oracle 200:264");
    REQUIRE(res.exit_code == 0);
    auto doc = nlohmann::json::parse(res.out);
    REQUIRE_THAT(doc["oracle_estimate"].get<double>(),
                 Catch::Matchers::WithinAbs(0.694242, 5e-3));
}

TEST_CASE("usage errors exit with 2") {
    REQUIRE(run_cli("rate").exit_code == 2);
    REQUIRE(run_cli("frobnicate").exit_code == 2);
    REQUIRE(run_cli("rate -i x.json --bogus").exit_code == 2);
}

TEST_CASE("help exits cleanly") {
    REQUIRE(run_cli("--help").exit_code == 0);
    REQUIRE(run_cli("rate --help").exit_code == 0);
}

TEST_CASE("domain errors exit with 1") {
    REQUIRE(run_cli("rate -i " + tmp_path("missing.json")).exit_code == 1);
    REQUIRE(run_cli("irc -i " + data_file("chain3.json") + " --theta 0.5").exit_code == 1);
    // invalid option values behave like other semantic errors
    REQUIRE(run_cli("rate -i " + data_file("fib.json") + " --oracle nope").exit_code == 1);
    REQUIRE(run_cli("irc -i " + data_file("fib.json") + " --theta 1.5").exit_code == 1);
}

TEST_CASE("irc reports the rich component") {
    auto res = run_cli("irc -i " + data_file("pendant_fib.json") + " --theta 1.0 --emit-log");
    REQUIRE(res.exit_code == 0);
    auto doc = nlohmann::json::parse(res.out);
    REQUIRE(doc["kept_states"] == nlohmann::json::array({"a", "b"}));
    REQUIRE(doc["entry"] == "a");
    REQUIRE(doc["kept_edges"].size() == 3);
    REQUIRE(doc["log"].size() == 5);
}

TEST_CASE("irc-sync composes the documented flags") {
    auto res = run_cli("irc-sync -i1 " + data_file("fib.json") + " -i2 " + data_file("fib.json") +
                       " --pairs " + data_file("pairs_empty.json") + " --theta 1.0");
    REQUIRE(res.exit_code == 0);
    auto doc = nlohmann::json::parse(res.out);
    REQUIRE(doc["lambda_composed"].get<double>() > 0.6942);
    REQUIRE(doc["m1"]["entry"] == "a");
}

TEST_CASE("iri emits an automaton document") {
    auto out = tmp_path("iri.json");
    auto res = run_cli("iri -i " + data_file("pendant_fib.json") + " --theta 1.0 --emit " + out);
    REQUIRE(res.exit_code == 0);
    auto doc = nlohmann::json::parse(res.out);
    REQUIRE(doc["alpha"] == nlohmann::json::array({"e", "a"}));
    auto emitted = nlohmann::json::parse(support::read_file(out));
    REQUIRE(emitted.contains("states"));
    REQUIRE(emitted.contains("edges"));
    // the emitted automaton parses back as a transition system
    REQUIRE_NOTHROW(irate::parse_system(emitted.dump()));
}

TEST_CASE("iri constrained by a domain") {
    auto res = run_cli("iri -i " + data_file("pendant_fib.json") + " --lang " +
                       data_file("sigma_star2.json") + " --theta 1.0");
    REQUIRE(res.exit_code == 1); // the domain lacks the pendant labels: no accepted path
}

TEST_CASE("encode writes one row per instruction") {
    auto trace = make_trace_file("enc.txt", 50, 4, 11);
    auto csv = tmp_path("enc.csv");
    auto res = run_cli("encode -t " + trace + " --emit " + csv);
    REQUIRE(res.exit_code == 0);
    auto lines = support::read_file(csv);
    REQUIRE(lines.rfind("index,token_bits\n", 0) == 0);
    REQUIRE(std::count(lines.begin(), lines.end(), '\n') == 51);
}

TEST_CASE("signal and spectrum commands emit CSVs") {
    auto trace = make_trace_file("sig.txt", 3000, 8, 12);
    auto res = run_cli("signal -t " + trace + " --blocks 100 --emit " + tmp_path("sig.csv"));
    REQUIRE(res.exit_code == 0);
    auto doc = nlohmann::json::parse(res.out);
    REQUIRE(doc["blocks"] == 100);
    REQUIRE(doc["block_size"] == 30);

    res = run_cli("spectrum -t " + trace + " --blocks 100 --window 5 --emit " +
                  tmp_path("spec.csv"));
    REQUIRE(res.exit_code == 0);
    auto spec = support::read_file(tmp_path("spec.csv"));
    REQUIRE(spec.rfind("normalized_frequency,magnitude\n", 0) == 0);
}

TEST_CASE("distance and coverage") {
    auto a = make_trace_file("a.txt", 2000, 2, 21);
    auto b = make_trace_file("b.txt", 2000, 64, 22);
    auto c = make_trace_file("c.txt", 2000, 64, 23);
    auto res = run_cli("distance -t " + a + " -t " + b + " --blocks 100");
    REQUIRE(res.exit_code == 0);
    REQUIRE(nlohmann::json::parse(res.out)["distance"].get<double>() > 0.0);

    res = run_cli("coverage -t " + a + " -t " + b + " -t " + c + " --blocks 100 --rel " + a);
    REQUIRE(res.exit_code == 0);
    auto doc = nlohmann::json::parse(res.out);
    REQUIRE(doc["pairwise"].size() == 3);
    double sum = 0.0;
    for (const auto& row : doc["pairwise"]) sum += row[2].get<double>();
    REQUIRE_THAT(doc["cover"].get<double>(), Catch::Matchers::WithinRel(sum, 1e-9));
    REQUIRE(doc["relative"].size() == 1);
}

TEST_CASE("pipeline emits both CSVs and summary statistics") {
    auto trace = make_trace_file("pipe.txt", 5000, 16, 31);
    auto s1 = tmp_path("p_sig.csv"), f1 = tmp_path("p_spec.csv");
    auto res = run_cli("pipeline -t " + trace + " --blocks 500 --window 5 --emit-signal " + s1 +
                       " --emit-spectrum " + f1);
    REQUIRE(res.exit_code == 0);
    auto doc = nlohmann::json::parse(res.out);
    REQUIRE(doc["tokens"] == 5000);
    REQUIRE(doc["blocks"] == 500);
    REQUIRE(doc.contains("exe_rate"));
    REQUIRE(doc.contains("variance"));

    // determinism: a second run writes byte-identical artifacts
    auto s2 = tmp_path("p_sig2.csv"), f2 = tmp_path("p_spec2.csv");
    auto res2 = run_cli("pipeline -t " + trace + " --blocks 500 --window 5 --emit-signal " + s2 +
                        " --emit-spectrum " + f2);
    REQUIRE(res2.exit_code == 0);
    REQUIRE(res2.out == res.out);
    REQUIRE(support::read_file(s1) == support::read_file(s2));
    REQUIRE(support::read_file(f1) == support::read_file(f2));
}

TEST_CASE("parallelism cap does not change coverage output") {
    auto a = make_trace_file("pa.txt", 3000, 8, 41);
    auto b = make_trace_file("pb.txt", 3000, 8, 42);
    auto base = run_cli("coverage -t " + a + " -t " + b + " --blocks 100");
    auto res = run_cli("coverage -t " + a + " -t " + b + " --blocks 100", "", "IRATE_THREADS=1 ");
    REQUIRE(base.exit_code == 0);
    REQUIRE(res.exit_code == 0);
    REQUIRE(base.out == res.out);
}
