#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "iqpflow/analytic.hpp"
#include "iqpflow/ising.hpp"

namespace iqp {

inline constexpr std::size_t kDefaultStateVectorCap = 28;

/// Dense amplitudes over 2^N basis states; bit i of the index is qubit i.
class StateVector {
public:
    StateVector() = default;
    StateVector(std::size_t n, std::vector<std::complex<double>> amplitudes);

    std::size_t size() const { return n_; }
    const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
    std::complex<double> operator[](std::uint64_t index) const { return amps_[index]; }

    std::vector<double> probabilities() const;
    double norm_squared() const;

    /// |<this|other>|
    double fidelity(const StateVector& other) const;

    /// Real expectation of a diagonal Ising cost.
    double expectation(const IsingProblem& problem) const;

    /// <Z^a X^b> evaluated directly on the amplitudes.
    std::complex<double> expectation(PauliTerm term) const;

private:
    std::size_t n_ = 0;
    std::vector<std::complex<double>> amps_;
};

struct SampleSet {
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

/// Ansatz state for the given parameters.
StateVector iqp_state(const IqpParams& params, std::size_t cap = kDefaultStateVectorCap);

/// One-layer QAOA: exp(i beta H_x) exp(-i gamma H) |+>^N with H_x = -sum_i X_i.
StateVector qaoa_state(const IsingProblem& problem, double gamma, double beta,
                       std::size_t cap = kDefaultStateVectorCap);

/// Hadamard layer after the diagonal IQP evolution, H^N exp(-i H_IQP) |+>^N.
/// Equals exp(-i/2 [sum theta_i X_i + sum theta_ij X_i X_j]) |0...0>.
StateVector hadamard_iqp_state(const std::vector<double>& theta_lin, const PairTable& theta_quad,
                               std::size_t cap = kDefaultStateVectorCap);

/// Inverse-CDF sampling over the amplitude index order; deterministic given seed.
SampleSet sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

/// Probability mass on the ground set.
double ground_overlap(const StateVector& state, const GroundTruth& truth);

struct EnergyLevel {
    double energy;
    double probability;
};

/// Probability aggregated per distinct classical energy, ascending; energies
/// within 1e-9 are merged.
std::vector<EnergyLevel> energy_distribution(const StateVector& state, const IsingProblem& problem);

}  // namespace iqp
