#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iqpflow/analytic.hpp"
#include "iqpflow/optimize.hpp"
#include "iqpflow/simulator.hpp"
#include "oracles.hpp"

using namespace iqp;

TEST_CASE("flatten and unflatten are inverse") {
    const auto p = oracle::random_params(5, 1);
    const auto v = p.flatten();
    CHECK(v.size() == IqpParams::parameter_count(5));
    CHECK(v.size() == 20);
    CHECK(v[0] == p.phi[0]);
    CHECK(v[5] == p.theta_lin[0]);
    CHECK(v[10] == p.theta_quad(0, 1));
    CHECK(v[11] == p.theta_quad(0, 2));
    CHECK(v[14] == p.theta_quad(1, 2));
    CHECK(IqpParams::unflatten(5, v) == p);
    CHECK_THROWS_AS(IqpParams::unflatten(5, std::vector<double>(19)), DimensionError);
}

TEST_CASE("closed-form energy matches the gate-level statevector") {
    for (std::size_t n = 2; n <= 7; ++n) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto prob = sk_random(n, 100 * n + seed, seed % 2 == 0);
            const auto p = oracle::random_params(n, 7 * n + seed);
            CAPTURE(n);
            CAPTURE(seed);
            CHECK(energy(prob, p) == doctest::Approx(oracle::energy(prob, p)).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("energy handles angles at multiples of pi/2") {
    // Exact zeros of cos and sin exercise the leave-one-out products.
    const double h = std::numbers::pi / 2;
    const auto prob = sk_random(5, 9, true);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto p = oracle::random_params(5, seed);
        Rng rng(seed);
        for (auto& v : p.theta_quad.values()) {
            if (rng.uniform() < 0.5) v = h * std::floor(4 * rng.uniform());
        }
        for (auto& v : p.theta_lin) {
            if (rng.uniform() < 0.5) v = h * std::floor(4 * rng.uniform());
        }
        const auto eg = energy_and_gradient(prob, p);
        CHECK(eg.energy == doctest::Approx(oracle::energy(prob, p)).epsilon(1e-12).scale(1.0));
        CHECK(oracle::max_abs_diff(eg.gradient, oracle::fd_gradient(prob, p)) < 1e-7);
    }
}

TEST_CASE("analytic gradient matches central differences") {
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto prob = sk_random(n, 31 + n, n % 2 == 0);
        const auto p = oracle::random_params(n, 5 + n);
        const auto eg = energy_and_gradient(prob, p);
        CAPTURE(n);
        CHECK(eg.energy == doctest::Approx(energy(prob, p)).epsilon(1e-14).scale(1.0));
        CHECK(oracle::max_abs_diff(eg.gradient, oracle::fd_gradient(prob, p)) < 1e-7);
    }
}

TEST_CASE("pauli expectation matches the statevector") {
    Rng rng(77);
    for (std::size_t n = 1; n <= 6; ++n) {
        auto p = oracle::random_params(n, n);
        std::fill(p.phi.begin(), p.phi.end(), 0.0);
        const auto psi = oracle::iqp_state(p);
        const std::uint64_t dim = std::uint64_t{1} << n;
        for (int trial = 0; trial < 30; ++trial) {
            const PauliTerm term{rng.bits() % dim, rng.bits() % dim};
            const auto want = oracle::pauli(psi, term.z_mask, term.x_mask);
            const auto got = expectation_pauli(p, term);
            CAPTURE(term.z_mask);
            CAPTURE(term.x_mask);
            CHECK(std::abs(got - want) < 1e-12);
        }
    }
    const auto big = oracle::random_params(12, 1);
    CHECK_THROWS_AS(expectation_pauli(big, PauliTerm{0, 0x1FF}), ResourceLimitError);
    CHECK(expectation_pauli(big, PauliTerm{0x3, 0}) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("gram matrix matches tangent-vector overlaps") {
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto p = oracle::random_params(n, 50 + n);
        const Eigen::MatrixXd a = gram(p);
        const Eigen::MatrixXd b = oracle::fd_gram(p);
        CAPTURE(n);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-7);
        CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const auto m = static_cast<Eigen::Index>(n);
        const Eigen::Index q = a.rows() - m;
        CHECK((a.bottomRightCorner(q, q) - 0.25 * Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff() < 1e-15);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
}

TEST_CASE("four-qubit X-basis example matches the statevector") {
    Rng rng(3);
    const auto prob = counterexample_problem();
    for (int trial = 0; trial < 20; ++trial) {
        XBasisAngles a;
        for (auto& v : a) v = 6.0 * (rng.uniform() - 0.5);
        std::vector<double> lin(a.begin(), a.begin() + 4);
        PairTable quad(4);
        std::copy(a.begin() + 4, a.end(), quad.values().begin());
        const auto psi = hadamard_iqp_state(lin, quad);
        for (int k = 1; k <= 3; ++k) {
            const auto want = psi.expectation(PauliTerm{1U | (1U << k), 0}).real();
            CHECK(counterexample_zz(a, k) == doctest::Approx(want).epsilon(1e-12).scale(1.0));
        }
        CHECK(counterexample_zz(a) == doctest::Approx(counterexample_zz(a, 1)).epsilon(1e-15));
        CHECK(counterexample_energy(a) == doctest::Approx(psi.expectation(prob)).epsilon(1e-12).scale(1.0));

        const auto g = counterexample_gradient(a);
        for (std::size_t k = 0; k < 10; ++k) {
            auto up = a, dn = a;
            up[k] += 1e-6;
            dn[k] -= 1e-6;
            const double fd = (counterexample_energy(up) - counterexample_energy(dn)) / 2e-6;
            CHECK(g[k] == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("gram matrix matches exact tangent vectors") {
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto p = oracle::random_params(n, 70 + n);
        CHECK((gram(p) - oracle::exact_gram(p)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("parameter-shift oracle agrees with the closed form") {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        XBasisAngles a;
        for (auto& v : a) v = 4.0 * (rng.uniform() - 0.5);
        CHECK(oracle::xbasis_energy(a) == doctest::Approx(counterexample_energy(a)).epsilon(1e-12).scale(1.0));
        const auto g = oracle::xbasis_gradient(a);
        const auto h = counterexample_gradient(a);
        for (std::size_t k = 0; k < 10; ++k) CHECK(g[k] == doctest::Approx(h[k]).epsilon(1e-12).scale(1.0));
    }
}
