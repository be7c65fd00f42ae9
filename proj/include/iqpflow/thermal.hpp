#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "iqpflow/ising.hpp"

namespace iqp {

/// q(x) = 0 where p(x) > 0.
class DivergenceUndefined : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Effective inverse temperature of a distribution, from minimizing
/// KL(p || Boltzmann(beta)) over beta >= 0.
struct ThermalFit {
    double beta_eff = 0.0;
    double beta_normalized = 0.0;  // beta_eff * coupling_norm
    double kl = 0.0;               // nats, forward orientation KL(p || thermal)
    bool bracket_hit_max = false;  // beta reached the search cap
};

/// exp(-beta E(x)) / Z over all 2^N configurations, indexed by bitmask.
std::vector<double> boltzmann(const IsingProblem& problem, double beta, std::size_t cap = kDefaultBruteForceCap);
std::vector<double> boltzmann(std::span<const double> energies, double beta);

/// sum p log(p / q) with 0 log 0 = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// KL(p || Boltzmann(beta)) evaluated in log space, so it stays finite where
/// the thermal weights underflow.
double kl_to_boltzmann(std::span<const double> energies, std::span<const double> p, double beta);

struct FitOptions {
    double rel_tol = 1e-8;
    double beta_max_scale = 1e4;  // beta cap is beta_max_scale / coupling_norm
};

ThermalFit fit_beta(const IsingProblem& problem, std::span<const double> p, const FitOptions& options = {},
                    std::size_t cap = kDefaultBruteForceCap);
ThermalFit fit_beta(std::span<const double> energies, double norm, std::span<const double> p,
                    const FitOptions& options = {});

}  // namespace iqp
