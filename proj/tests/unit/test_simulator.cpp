#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iqpflow/optimize.hpp"
#include "iqpflow/simulator.hpp"
#include "oracles.hpp"

using namespace iqp;

TEST_CASE("iqp_state matches gate-by-gate construction") {
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto p = oracle::random_params(n, 11 * n);
        const auto psi = iqp_state(p);
        const auto ref = oracle::iqp_state(p);
        double worst = 0.0;
        for (std::size_t x = 0; x < ref.size(); ++x) worst = std::max(worst, std::abs(psi[x] - ref[x]));
        CHECK(worst < 1e-13);
        CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(iqp_state(IqpParams(6), 5), ResourceLimitError);
}

TEST_CASE("embedded QAOA parameters reproduce the QAOA state") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto prob = sk_random(6, seed, seed % 2 == 0);
        const double gamma = 0.3 + 0.2 * seed, beta = -0.4 + 0.15 * seed;
        const auto a = qaoa_state(prob, gamma, beta);
        const auto b = iqp_state(embed_qaoa(prob, {gamma, beta}));
        CHECK(a.fidelity(b) == doctest::Approx(1.0).epsilon(1e-12));

        // Independent reference: exp(i beta H_x) = prod Rx(-2 beta)... up to the sign convention
        // H_x = -sum X, so exp(i beta H_x) = exp(-i beta sum X) = prod Rx(2 beta).
        oracle::Amps ref(64, 1.0 / 8.0);
        for (std::uint64_t x = 0; x < 64; ++x) ref[x] *= std::exp(oracle::cplx(0, -gamma * oracle::cost(prob, x)));
        for (std::size_t q = 0; q < 6; ++q) oracle::apply_rx(ref, q, 2 * beta);
        std::complex<double> ov = 0;
        for (std::uint64_t x = 0; x < 64; ++x) ov += std::conj(ref[x]) * a[x];
        CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("qaoa at the origin is the uniform superposition") {
    const auto prob = sk_random(5, 1, true);
    for (double p : qaoa_state(prob, 0.0, 0.0).probabilities()) CHECK(p == doctest::Approx(1.0 / 32));
}

TEST_CASE("statevector pauli and ising expectations") {
    const auto p = oracle::random_params(4, 2);
    const auto psi = iqp_state(p);
    const auto ref = oracle::iqp_state(p);
    for (std::uint64_t z = 0; z < 16; ++z) {
        for (std::uint64_t x = 0; x < 16; ++x) {
            CHECK(std::abs(psi.expectation(PauliTerm{z, x}) - oracle::pauli(ref, z, x)) < 1e-13);
        }
    }
    const auto prob = sk_random(4, 5, true);
    CHECK(psi.expectation(prob) == doctest::Approx(oracle::expectation(prob, ref)).epsilon(1e-13));
}

TEST_CASE("sampling is deterministic and follows the distribution") {
    const auto p = oracle::random_params(4, 9);
    const auto psi = iqp_state(p);
    const auto a = sample(psi, 20000, 5);
    const auto b = sample(psi, 20000, 5);
    const auto c = sample(psi, 20000, 6);
    CHECK(a.counts == b.counts);
    CHECK(a.counts != c.counts);
    CHECK(a.shots == 20000);
    std::uint64_t total = 0;
    const auto probs = psi.probabilities();
    for (const auto& [x, k] : a.counts) {
        total += k;
        const double sd = std::sqrt(probs[x] * (1 - probs[x]) / 20000);
        CHECK(std::abs(static_cast<double>(k) / 20000 - probs[x]) < 5 * sd + 1e-12);
    }
    CHECK(total == 20000);
    CHECK_THROWS_AS(sample(psi, 0, 1), InputError);
}

TEST_CASE("ground overlap and energy distribution") {
    IsingProblem prob(2);
    prob.set_coupling(0, 1, -1.0);
    // Plus state: half the mass on the two aligned ground states.
    const auto psi = iqp_state(IqpParams(2));
    const auto truth = brute_force_ground(prob);
    CHECK(ground_overlap(psi, truth) == doctest::Approx(0.5));
    const auto levels = energy_distribution(psi, prob);
    REQUIRE(levels.size() == 2);
    CHECK(levels[0].energy == -1.0);
    CHECK(levels[0].probability == doctest::Approx(0.5));
    CHECK(levels[1].energy == 1.0);
}
