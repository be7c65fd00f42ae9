#include "iqpflow/ising.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "iqpflow/random.hpp"

namespace iqp {

IsingProblem::IsingProblem(std::size_t n) : fields_(n, 0.0), couplings_(n) {}

IsingProblem::IsingProblem(std::vector<double> fields, PairTable couplings)
    : fields_(std::move(fields)), couplings_(std::move(couplings)) {
    if (couplings_.size() != fields_.size()) {
        throw DimensionError("coupling table size " + std::to_string(couplings_.size()) +
                             " does not match " + std::to_string(fields_.size()) + " fields");
    }
    check_finite();
}

void IsingProblem::check_finite() const {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(fields_.begin(), fields_.end(), finite) ||
        !std::all_of(couplings_.values().begin(), couplings_.values().end(), finite)) {
        throw InputError("Ising coefficients must be finite");
    }
}

void IsingProblem::set_field(std::size_t i, double value) {
    if (i >= size()) throw DimensionError("field index out of range");
    if (!std::isfinite(value)) throw InputError("Ising coefficients must be finite");
    fields_[i] = value;
}

void IsingProblem::set_coupling(std::size_t i, std::size_t j, double value) {
    if (!std::isfinite(value)) throw InputError("Ising coefficients must be finite");
    couplings_.at(i, j) = value;
}

bool IsingProblem::unbiased() const {
    return std::all_of(fields_.begin(), fields_.end(), [](double h) { return h == 0.0; });
}

Spins spins_from_bits(std::uint64_t bits, std::size_t n) {
    Spins x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = ((bits >> i) & 1U) ? -1 : 1;
    return x;
}

std::uint64_t bits_from_spins(const Spins& x) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == -1) {
            bits |= std::uint64_t{1} << i;
        } else if (x[i] != 1) {
            throw InputError("spin values must be +1 or -1");
        }
    }
    return bits;
}

bool GroundTruth::is_ground(std::uint64_t bits) const {
    return std::binary_search(ground_states.begin(), ground_states.end(), bits);
}

IsingProblem sk_random(std::size_t n, std::uint64_t seed, bool biased) {
    if (n < 2) throw InputError("SK instances need n >= 2, got " + std::to_string(n));
    Rng rng(seed);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
    PairTable J(n);
    for (double& v : J.values()) v = sigma * rng.normal();
    std::vector<double> h(n, 0.0);
    if (biased) {
        for (double& v : h) v = sigma * rng.normal();
    }
    IsingProblem problem(std::move(h), std::move(J));
    problem.seed = seed;
    problem.biased = biased;
    return problem;
}

double energy(const IsingProblem& problem, const Spins& x) {
    if (x.size() != problem.size()) {
        throw DimensionError("configuration has " + std::to_string(x.size()) + " spins, problem has " +
                             std::to_string(problem.size()));
    }
    const std::size_t n = problem.size();
    const auto& J = problem.couplings().values();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += problem.field(i) * x[i];
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) e += J[k] * x[i] * x[j];
    }
    return e;
}

double energy_of_bits(const IsingProblem& problem, std::uint64_t bits) {
    return energy(problem, spins_from_bits(bits, problem.size()));
}

std::vector<double> all_energies(const IsingProblem& problem, std::size_t cap) {
    if (problem.size() > cap) {
        throw ResourceLimitError("energy table for " + std::to_string(problem.size()) +
                                 " spins exceeds cap " + std::to_string(cap));
    }
    std::vector<double> out(std::size_t{1} << problem.size());
    for_each_energy(problem, [&](std::uint64_t bits, double e) { out[bits] = e; });
    return out;
}

GroundTruth brute_force_ground(const IsingProblem& problem, std::size_t cap) {
    const std::size_t n = problem.size();
    if (n > cap) {
        throw ResourceLimitError("brute force over " + std::to_string(n) + " spins exceeds cap " +
                                 std::to_string(cap));
    }
    // The scan energies carry small rounding drift, so collect everything near
    // the running minimum and settle ties with direct evaluations afterwards.
    constexpr double kScanSlack = 1e-9;
    constexpr double kTieTolerance = 1e-12;

    double scan_min = std::numeric_limits<double>::infinity();
    double scan_max = -std::numeric_limits<double>::infinity();
    std::uint64_t argmax = 0;
    std::vector<std::uint64_t> candidates;
    for_each_energy(problem, [&](std::uint64_t bits, double e) {
        if (e > scan_max) {
            scan_max = e;
            argmax = bits;
        }
        if (e < scan_min - kScanSlack) {
            candidates.clear();
        }
        if (e <= scan_min + kScanSlack) {
            candidates.push_back(bits);
        }
        scan_min = std::min(scan_min, e);
    });

    GroundTruth truth;
    truth.n = n;
    truth.max_energy = energy_of_bits(problem, argmax);
    std::vector<std::pair<std::uint64_t, double>> exact;
    exact.reserve(candidates.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t bits : candidates) {
        const double e = energy_of_bits(problem, bits);
        exact.emplace_back(bits, e);
        best = std::min(best, e);
    }
    truth.min_energy = best;
    for (const auto& [bits, e] : exact) {
        if (e - best <= kTieTolerance) truth.ground_states.push_back(bits);
    }
    std::sort(truth.ground_states.begin(), truth.ground_states.end());
    truth.max_energy = std::max(truth.max_energy, truth.min_energy);
    return truth;
}

double approximation_ratio(double e, const GroundTruth& truth) {
    const double span = truth.max_energy - truth.min_energy;
    if (span <= 0.0) return 1.0;
    return std::clamp((truth.max_energy - e) / span, 0.0, 1.0);
}

double approximation_ratio(const IsingProblem& problem, const Spins& x, const GroundTruth& truth) {
    if (truth.n != problem.size()) throw DimensionError("ground truth computed for a different size");
    return approximation_ratio(energy(problem, x), truth);
}

double coupling_norm(const IsingProblem& problem) {
    double sum = 0.0;
    for (double h : problem.fields()) sum += h * h;
    for (double j : problem.couplings().values()) sum += j * j;
    return std::sqrt(sum);
}

}  // namespace iqp
