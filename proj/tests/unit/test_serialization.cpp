#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "iqpflow/serialization.hpp"
#include "oracles.hpp"

using namespace iqp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "iqpflow_unit" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("instance json round trip is lossless") {
    const auto p = sk_random(7, 123, true);
    const auto back = problem_from_json(json::parse(to_json(p).dump()));
    CHECK(back == p);
    CHECK(back.seed == p.seed);
    CHECK(back.biased);
}

TEST_CASE("instance json validation") {
    json j = to_json(sk_random(3, 1, false));
    j["J"].push_back({2, 1, 0.5});
    CHECK_THROWS_AS(problem_from_json(j), InputError);
    j = to_json(sk_random(3, 1, false));
    j["J"].push_back(j["J"][0]);
    CHECK_THROWS_AS(problem_from_json(j), InputError);
    j = to_json(sk_random(3, 1, false));
    j["h"] = {0.0, 1.0};
    CHECK_THROWS_AS(problem_from_json(j), InputError);
    // Absent pairs are zero.
    const auto q = problem_from_json(json{{"n", 3}, {"h", {0, 0, 0}}, {"J", {{0, 2, 1.5}}}, {"seed", nullptr}});
    CHECK(q.coupling(0, 1) == 0.0);
    CHECK(q.coupling(0, 2) == 1.5);
    CHECK_FALSE(q.seed.has_value());
}

TEST_CASE("params and config round trip") {
    const auto p = oracle::random_params(5, 3);
    CHECK(params_from_json(json::parse(to_json(p).dump())) == p);

    FlowConfig cfg;
    cfg.mode = FlowMode::varqite;
    cfg.rtol = 1e-9;
    const auto back = flow_config_from_json(json::parse(to_json(cfg).dump()));
    CHECK(back.mode == FlowMode::varqite);
    CHECK(back.rtol == 1e-9);
    const auto partial = flow_config_from_json(json{{"tau_max", 7.0}}, cfg);
    CHECK(partial.tau_max == 7.0);
    CHECK(partial.mode == FlowMode::varqite);
}

TEST_CASE("bitstrings put qubit 0 first") {
    CHECK(bitstring(0b0011, 4) == "1100");
    CHECK(bits_from_bitstring("1100") == 0b0011);
    CHECK_THROWS(bits_from_bitstring("10x"));
}

TEST_CASE("trajectory jsonl round trip") {
    const auto dir = scratch("traj");
    const auto prob = sk_random(3, 4, true);
    FlowConfig cfg;
    cfg.mode = FlowMode::varqite;
    cfg.tau_max = 0.3;
    const auto traj = flow(prob, oracle::random_params(3, 1, 1.0), cfg);
    write_trajectory(dir / "run.jsonl", traj);
    CHECK(fs::exists(dir / "run_params" / "step_000000.json"));
    const auto back = read_trajectory(dir / "run.jsonl");
    REQUIRE(back.size() == traj.size());
    CHECK(back.termination == traj.termination);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(back.records[k].tau == traj.records[k].tau);
        CHECK(back.records[k].energy == traj.records[k].energy);
        CHECK(back.records[k].params == traj.records[k].params);
        CHECK(back.records[k].gram_condition == traj.records[k].gram_condition);
    }
}

TEST_CASE("samples csv and statevector dump") {
    const auto dir = scratch("sv");
    const auto prob = sk_random(4, 2, true);
    const auto psi = iqp_state(oracle::random_params(4, 2));
    write_statevector(dir / "psi.bin", psi);
    CHECK(fs::file_size(dir / "psi.bin") == 16 * 16);
    const auto back = read_statevector(dir / "psi.bin");
    CHECK(back.size() == 4);
    CHECK(back.amplitudes() == psi.amplitudes());

    const auto s = sample(psi, 50, 1);
    const auto truth = brute_force_ground(prob);
    std::ostringstream out;
    write_samples_csv(out, s, prob, &truth);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "bitstring,count,energy,is_ground");
    std::uint64_t total = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
        const auto bits = bits_from_bitstring(line.substr(0, c1));
        total += std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(std::stod(line.substr(c2 + 1, c3 - c2 - 1)) == doctest::Approx(energy_of_bits(prob, bits)));
        CHECK((line.substr(c3 + 1) == "true") == truth.is_ground(bits));
    }
    CHECK(total == 50);
}
