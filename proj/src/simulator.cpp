#include "iqpflow/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "iqpflow/random.hpp"

namespace iqp {

namespace {

using cplx = std::complex<double>;

void check_cap(std::size_t n, std::size_t cap) {
    if (n > cap || n > 62) {
        throw ResourceLimitError("statevector of " + std::to_string(n) + " qubits exceeds cap " +
                                 std::to_string(cap));
    }
}

// 2^{-N/2} exp(-i E_diag(x)) for a diagonal Ising generator.
std::vector<cplx> diagonal_phase_state(const IsingProblem& generator, double scale) {
    const std::size_t n = generator.size();
    const double amp = std::pow(2.0, -0.5 * static_cast<double>(n));
    std::vector<cplx> amps(std::size_t{1} << n);
    for_each_energy(generator, [&](std::uint64_t bits, double e) {
        amps[bits] = std::polar(amp, -scale * e);
    });
    return amps;
}

// Single-qubit 2x2 unitary [[a, b], [c, d]] on every qubit.
void apply_each_qubit(std::vector<cplx>& amps, std::size_t n, const std::vector<std::array<cplx, 4>>& gates) {
    for (std::size_t q = 0; q < n; ++q) {
        const auto& u = gates[q];
        const std::uint64_t stride = std::uint64_t{1} << q;
        for (std::uint64_t base = 0; base < amps.size(); base += 2 * stride) {
            for (std::uint64_t off = 0; off < stride; ++off) {
                const std::uint64_t i0 = base + off, i1 = i0 + stride;
                const cplx a0 = amps[i0], a1 = amps[i1];
                amps[i0] = u[0] * a0 + u[1] * a1;
                amps[i1] = u[2] * a0 + u[3] * a1;
            }
        }
    }
}

std::array<cplx, 4> rx(double angle) {
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
}

IsingProblem generator_of(const std::vector<double>& theta_lin, const PairTable& theta_quad) {
    return IsingProblem(theta_lin, theta_quad);
}

}  // namespace

StateVector::StateVector(std::size_t n, std::vector<std::complex<double>> amplitudes)
    : n_(n), amps_(std::move(amplitudes)) {
    if (amps_.size() != (std::size_t{1} << n)) {
        throw DimensionError("statevector length does not match 2^" + std::to_string(n));
    }
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(), [](const cplx& a) { return std::norm(a); });
    return p;
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

double StateVector::fidelity(const StateVector& other) const {
    if (other.n_ != n_) throw DimensionError("fidelity between states of different size");
    cplx s = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
    return std::abs(s);
}

double StateVector::expectation(const IsingProblem& problem) const {
    if (problem.size() != n_) throw DimensionError("problem and state sizes differ");
    double s = 0.0;
    for_each_energy(problem, [&](std::uint64_t bits, double e) { s += e * std::norm(amps_[bits]); });
    return s;
}

std::complex<double> StateVector::expectation(PauliTerm term) const {
    // Z^a X^b |x> = (-1)^{popcount(a & (x ^ b))} |x ^ b>
    cplx s = 0.0;
    for (std::uint64_t x = 0; x < amps_.size(); ++x) {
        const std::uint64_t y = x ^ term.x_mask;
        const double sign = (__builtin_popcountll(term.z_mask & y) & 1) ? -1.0 : 1.0;
        s += std::conj(amps_[y]) * sign * amps_[x];
    }
    return s;
}

StateVector iqp_state(const IqpParams& params, std::size_t cap) {
    params.validate();
    const std::size_t n = params.size();
    check_cap(n, cap);
    // exp(-i H_IQP) is diagonal with phase -(1/2) E_theta(s).
    auto amps = diagonal_phase_state(generator_of(params.theta_lin, params.theta_quad), 0.5);
    std::vector<std::array<cplx, 4>> gates(n);
    for (std::size_t q = 0; q < n; ++q) gates[q] = rx(params.phi[q]);
    apply_each_qubit(amps, n, gates);
    return StateVector(n, std::move(amps));
}

StateVector qaoa_state(const IsingProblem& problem, double gamma, double beta, std::size_t cap) {
    const std::size_t n = problem.size();
    check_cap(n, cap);
    auto amps = diagonal_phase_state(problem, gamma);
    // exp(i beta H_x) = prod_q exp(-i beta X_q) = prod_q Rx(2 beta).
    std::vector<std::array<cplx, 4>> gates(n, rx(2.0 * beta));
    apply_each_qubit(amps, n, gates);
    return StateVector(n, std::move(amps));
}

StateVector hadamard_iqp_state(const std::vector<double>& theta_lin, const PairTable& theta_quad, std::size_t cap) {
    const std::size_t n = theta_lin.size();
    check_cap(n, cap);
    auto amps = diagonal_phase_state(generator_of(theta_lin, theta_quad), 0.5);
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<std::array<cplx, 4>> gates(n, {cplx(r), cplx(r), cplx(r), cplx(-r)});
    apply_each_qubit(amps, n, gates);
    return StateVector(n, std::move(amps));
}

SampleSet sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw InputError("sampling needs at least one shot");
    const auto& amps = state.amplitudes();
    std::vector<double> cdf(amps.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        acc += std::norm(amps[i]);
        cdf[i] = acc;
    }
    SampleSet out;
    out.shots = shots;
    out.seed = seed;
    out.n = state.size();
    Rng rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        ++out.counts[static_cast<std::uint64_t>(it - cdf.begin())];
    }
    return out;
}

double ground_overlap(const StateVector& state, const GroundTruth& truth) {
    if (truth.n != state.size()) throw DimensionError("ground truth and state sizes differ");
    double p = 0.0;
    for (std::uint64_t bits : truth.ground_states) p += std::norm(state[bits]);
    return p;
}

std::vector<EnergyLevel> energy_distribution(const StateVector& state, const IsingProblem& problem) {
    if (problem.size() != state.size()) throw DimensionError("problem and state sizes differ");
    std::vector<EnergyLevel> raw;
    raw.reserve(state.amplitudes().size());
    for_each_energy(problem, [&](std::uint64_t bits, double e) { raw.push_back({e, std::norm(state[bits])}); });
    std::sort(raw.begin(), raw.end(), [](const EnergyLevel& a, const EnergyLevel& b) { return a.energy < b.energy; });
    constexpr double kMerge = 1e-9;
    std::vector<EnergyLevel> out;
    for (const auto& level : raw) {
        if (!out.empty() && level.energy - out.back().energy <= kMerge) {
            out.back().probability += level.probability;
        } else {
            out.push_back(level);
        }
    }
    return out;
}

}  // namespace iqp
