#include "iqpflow/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace iqp {

namespace {

void check_distribution(std::span<const double> p) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("probabilities must be finite and non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InputError("distribution is not normalized (sum = " + std::to_string(sum) + ")");
    }
}

// Moments of the shifted energies d = E - E_min under exp(-beta d).
struct ShiftedMoments {
    double log_z = 0.0;  // log sum exp(-beta d)
    double mean = 0.0;
    double variance = 0.0;
};

ShiftedMoments moments(std::span<const double> d, double beta) {
    double z = 0.0, s1 = 0.0;
    for (double x : d) {
        const double w = std::exp(-beta * x);
        z += w;
        s1 += w * x;
    }
    const double mean = s1 / z;
    double s2 = 0.0;
    for (double x : d) s2 += std::exp(-beta * x) * (x - mean) * (x - mean);
    return {std::log(z), mean, s2 / z};
}

std::vector<double> shifted(std::span<const double> energies) {
    if (energies.empty()) throw InputError("empty energy table");
    const double lo = *std::min_element(energies.begin(), energies.end());
    std::vector<double> d(energies.size());
    std::transform(energies.begin(), energies.end(), d.begin(), [lo](double e) { return e - lo; });
    return d;
}

double negentropy(std::span<const double> p) {
    double s = 0.0;
    for (double v : p) {
        if (v > 0.0) s += v * std::log(v);
    }
    return s;
}

double kl_shifted(std::span<const double> d, std::span<const double> p, double neg, double beta) {
    double mean_p = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) mean_p += p[i] * d[i];
    return std::max(0.0, neg + beta * mean_p + moments(d, beta).log_z);
}

}  // namespace

std::vector<double> boltzmann(std::span<const double> energies, double beta) {
    if (!(beta >= 0.0)) throw InputError("inverse temperature must be non-negative");
    const std::vector<double> d = shifted(energies);
    std::vector<double> q(d.size());
    double z = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        q[i] = std::exp(-beta * d[i]);
        z += q[i];
    }
    for (double& v : q) v /= z;
    return q;
}

std::vector<double> boltzmann(const IsingProblem& problem, double beta, std::size_t cap) {
    return boltzmann(all_energies(problem, cap), beta);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionError("distributions differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] <= 0.0) {
            throw DivergenceUndefined("q vanishes at index " + std::to_string(i) + " where p > 0");
        }
        s += p[i] * std::log(p[i] / q[i]);
    }
    return s;
}

double kl_to_boltzmann(std::span<const double> energies, std::span<const double> p, double beta) {
    if (energies.size() != p.size()) throw DimensionError("distribution and energy table differ in length");
    const std::vector<double> d = shifted(energies);
    return kl_shifted(d, p, negentropy(p), beta);
}

ThermalFit fit_beta(std::span<const double> energies, double norm, std::span<const double> p,
                    const FitOptions& options) {
    if (energies.size() != p.size()) throw DimensionError("distribution and energy table differ in length");
    check_distribution(p);
    const std::vector<double> d = shifted(energies);
    const double neg = negentropy(p);
    double mean_p = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) mean_p += p[i] * d[i];

    ThermalFit fit;
    const auto finish = [&](double beta) {
        fit.beta_eff = beta;
        fit.beta_normalized = beta * norm;
        fit.kl = kl_shifted(d, p, neg, beta);
        return fit;
    };

    // dKL/dbeta = <d>_p - <d>_beta, increasing in beta (KL is convex).
    const double mean_uniform = moments(d, 0.0).mean;
    if (norm <= 0.0 || mean_p >= mean_uniform) return finish(0.0);
    const double beta_max = options.beta_max_scale / norm;
    if (mean_p <= 0.0) {
        fit.bracket_hit_max = true;
        return finish(beta_max);
    }

    double lo = 0.0, hi = 1.0 / norm;
    while (moments(d, hi).mean > mean_p) {
        if (hi >= beta_max) {
            fit.bracket_hit_max = true;
            return finish(beta_max);
        }
        lo = hi;
        hi = std::min(2.0 * hi, beta_max);
    }

    // Golden-section on KL to locate the minimum coarsely inside [lo, hi].
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = kl_shifted(d, p, neg, x1), f2 = kl_shifted(d, p, neg, x2);
    while (b - a > 1e-4 * std::max(b, 1e-300)) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = kl_shifted(d, p, neg, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = kl_shifted(d, p, neg, x2);
        }
    }

    // KL is flat near its minimum, so finish on the stationarity condition
    // log <d>_beta = log <d>_p with a bracketed Newton iteration.
    double beta = 0.5 * (a + b);
    const double target = std::log(mean_p);
    for (int it = 0; it < 200; ++it) {
        const ShiftedMoments m = moments(d, beta);
        const double f = std::log(m.mean) - target;  // decreasing in beta
        if (f > 0.0) {
            lo = std::max(lo, beta);
        } else {
            hi = std::min(hi, beta);
        }
        const double slope = -m.variance / m.mean;
        double next = slope < 0.0 ? beta - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double delta = std::abs(next - beta);
        beta = next;
        if (delta <= 1e-3 * options.rel_tol * beta || hi - lo <= 1e-3 * options.rel_tol * beta) break;
    }
    return finish(beta);
}

ThermalFit fit_beta(const IsingProblem& problem, std::span<const double> p, const FitOptions& options,
                    std::size_t cap) {
    const std::vector<double> energies = all_energies(problem, cap);
    if (energies.size() != p.size()) throw DimensionError("distribution length does not match 2^N");
    return fit_beta(energies, coupling_norm(problem), p, options);
}

}  // namespace iqp
