#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "iqpflow/ising.hpp"
#include "iqpflow/pair_table.hpp"

namespace iqp {

/// Parameters of the IQP ansatz
///   |psi> = (x)_i Rx(phi_i) exp(-i [1/2 sum theta_i Z_i + 1/2 sum theta_ij Z_i Z_j]) |+>^N
/// with Rx(phi) = exp(-i phi X / 2). Angles are in radians and used as given.
///
/// Flattened order (shared by gradients, Gram rows and trajectories):
/// phi_0..phi_{N-1}, theta_0..theta_{N-1}, theta_ij in lexicographic (i, j) order.
struct IqpParams {
    std::vector<double> phi;
    std::vector<double> theta_lin;
    PairTable theta_quad;

    IqpParams() = default;
    explicit IqpParams(std::size_t n) : phi(n, 0.0), theta_lin(n, 0.0), theta_quad(n) {}

    std::size_t size() const { return phi.size(); }

    static std::size_t parameter_count(std::size_t n) { return n * (n + 3) / 2; }
    std::size_t parameter_count() const { return parameter_count(size()); }

    std::vector<double> flatten() const;
    static IqpParams unflatten(std::size_t n, std::span<const double> values);

    /// Throws DimensionError / InputError on inconsistent sizes or non-finite entries.
    void validate() const;

    friend bool operator==(const IqpParams&, const IqpParams&) = default;
};

/// Pauli string Z^a X^b on up to 64 qubits; bit i of each mask selects qubit i.
struct PauliTerm {
    std::uint64_t z_mask = 0;
    std::uint64_t x_mask = 0;

    int z_weight() const { return __builtin_popcountll(z_mask); }
    int x_weight() const { return __builtin_popcountll(x_mask); }
};

inline constexpr int kDefaultPauliWeightCap = 8;

/// <Z^a X^b> in exp(-i H_IQP)|+>^N (the state before the Rx layer).
///
/// Sums one representative per global-flip orbit of the X-support spins, i.e.
/// 2^(w_b - 1) terms, each a product of cos/sin over the complement. Only the
/// theta angles enter; phi is ignored.
std::complex<double> expectation_pauli(const IqpParams& params, PauliTerm term,
                                       int weight_cap = kDefaultPauliWeightCap);

/// <H>_theta for an Ising problem in closed form, O(N^3) for dense couplings.
double energy(const IsingProblem& problem, const IqpParams& params);

struct EnergyGradient {
    double energy = 0.0;
    std::vector<double> gradient;  // flattened parameter order
};

/// Energy and its exact gradient in O(N^3).
EnergyGradient energy_and_gradient(const IsingProblem& problem, const IqpParams& params);

inline std::vector<double> gradient(const IsingProblem& problem, const IqpParams& params) {
    return energy_and_gradient(problem, params).gradient;
}

/// Real part of tangent-vector overlaps, Re <d_mu psi | d_nu psi>, in the
/// flattened parameter order. Symmetric positive semidefinite; the theta-theta
/// block is exactly I/4.
Eigen::MatrixXd gram(const IqpParams& params);

// --- four-qubit X-basis example --------------------------------------------
//
// State exp(-i/2 [sum theta_i X_i + sum theta_ij X_i X_j]) |0000> with angles
// ordered theta_0..theta_3, theta_01, theta_02, theta_03, theta_12, theta_13, theta_23,
// and cost H = Z_0 (Z_1 + Z_2 + Z_3).

using XBasisAngles = std::array<double, 10>;

/// <Z_0 Z_1> as a four-term product sum.
double counterexample_zz(std::span<const double> angles);

/// <Z_0 Z_k> for k in {1, 2, 3}, obtained by relabelling qubits 1, 2, 3 cyclically.
double counterexample_zz(std::span<const double> angles, int k);

/// <H> for H = Z_0 (Z_1 + Z_2 + Z_3).
double counterexample_energy(std::span<const double> angles);

/// Exact gradient of counterexample_energy.
std::array<double, 10> counterexample_gradient(std::span<const double> angles);

}  // namespace iqp
