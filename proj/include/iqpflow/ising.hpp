#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "iqpflow/errors.hpp"
#include "iqpflow/pair_table.hpp"

namespace iqp {

/// Classical Ising cost  sum_i h_i x_i + sum_{i<j} J_ij x_i x_j  over spins x in {+1,-1}^N.
class IsingProblem {
public:
    IsingProblem() = default;
    explicit IsingProblem(std::size_t n);
    IsingProblem(std::vector<double> fields, PairTable couplings);

    std::size_t size() const { return fields_.size(); }

    const std::vector<double>& fields() const { return fields_; }
    const PairTable& couplings() const { return couplings_; }

    double field(std::size_t i) const { return fields_[i]; }
    double coupling(std::size_t i, std::size_t j) const { return couplings_(i, j); }

    void set_field(std::size_t i, double value);
    void set_coupling(std::size_t i, std::size_t j, double value);

    /// True when every local field is exactly zero.
    bool unbiased() const;

    // Provenance for generated instances; not part of the cost function.
    std::optional<std::uint64_t> seed;
    bool biased = false;

    friend bool operator==(const IsingProblem& a, const IsingProblem& b) {
        return a.fields_ == b.fields_ && a.couplings_ == b.couplings_;
    }

private:
    void check_finite() const;

    std::vector<double> fields_;
    PairTable couplings_;
};

/// Spin values x_i in {+1, -1}.
using Spins = std::vector<int>;

/// Bit i of `bits` set  <=>  x_i = -1 (qubit i measured in |1>).
Spins spins_from_bits(std::uint64_t bits, std::size_t n);
std::uint64_t bits_from_spins(const Spins& x);

struct GroundTruth {
    std::size_t n = 0;
    double min_energy = 0.0;
    double max_energy = 0.0;
    /// Minimizers as bitmasks (see spins_from_bits), ascending.
    std::vector<std::uint64_t> ground_states;

    std::size_t degeneracy() const { return ground_states.size(); }
    bool is_ground(std::uint64_t bits) const;
};

inline constexpr std::size_t kDefaultBruteForceCap = 26;

/// Gaussian SK instance: J_ij ~ N(0, 1/n); with `biased`, h_i from the same law.
/// Draw order is J in lexicographic (i, j) order, then h_0..h_{n-1}.
IsingProblem sk_random(std::size_t n, std::uint64_t seed, bool biased);

double energy(const IsingProblem& problem, const Spins& x);
double energy_of_bits(const IsingProblem& problem, std::uint64_t bits);

/// Calls visit(bits, energy) once for every configuration. Blocks come in
/// ascending order; inside a block the order is a Gray code.
///
/// Configurations are processed in blocks of 2^10; inside a block the energy is
/// updated along a Gray code on the low spins and every block restarts from a
/// direct evaluation, so rounding drift is bounded by 2^10 single-spin updates.
template <typename Visitor>
void for_each_energy(const IsingProblem& problem, Visitor&& visit);

/// Energies of all 2^N configurations indexed by bitmask.
std::vector<double> all_energies(const IsingProblem& problem, std::size_t cap = kDefaultBruteForceCap);

GroundTruth brute_force_ground(const IsingProblem& problem, std::size_t cap = kDefaultBruteForceCap);

/// (E_max - E(x)) / (E_max - E_min); 1 for a constant cost.
double approximation_ratio(const IsingProblem& problem, const Spins& x, const GroundTruth& truth);
double approximation_ratio(double energy, const GroundTruth& truth);

/// Frobenius norm over all fields and couplings.
double coupling_norm(const IsingProblem& problem);

// --- implementation -------------------------------------------------------

namespace detail {
inline constexpr std::size_t kEnergyBlockBits = 10;
}

template <typename Visitor>
void for_each_energy(const IsingProblem& problem, Visitor&& visit) {
    const std::size_t n = problem.size();
    if (n == 0) {
        visit(std::uint64_t{0}, 0.0);
        return;
    }
    const std::size_t low = n < detail::kEnergyBlockBits ? n : detail::kEnergyBlockBits;
    const std::uint64_t block_size = std::uint64_t{1} << low;
    const std::uint64_t blocks = std::uint64_t{1} << (n - low);
    const std::vector<double> J = problem.couplings().dense();

    std::vector<double> local(low);  // effective field on each low spin
    std::vector<int> s(n);
    for (std::uint64_t block = 0; block < blocks; ++block) {
        const std::uint64_t base = block << low;
        for (std::size_t i = 0; i < n; ++i) s[i] = ((base >> i) & 1U) ? -1 : 1;
        double e = energy_of_bits(problem, base);
        for (std::size_t i = 0; i < low; ++i) {
            double f = problem.field(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) f += J[i * n + j] * s[j];
            }
            local[i] = f;
        }
        visit(base, e);
        std::uint64_t gray = 0;
        for (std::uint64_t k = 1; k < block_size; ++k) {
            const auto flip = static_cast<std::size_t>(__builtin_ctzll(k));
            // Flipping spin `flip` changes the energy by -2 s_flip * local_flip.
            e -= 2.0 * s[flip] * local[flip];
            s[flip] = -s[flip];
            for (std::size_t j = 0; j < low; ++j) {
                if (j != flip) local[j] += 2.0 * J[j * n + flip] * s[flip];
            }
            gray ^= std::uint64_t{1} << flip;
            visit(base | gray, e);
        }
    }
}

}  // namespace iqp
