#include "iqpflow/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace iqp {

std::vector<double> IqpParams::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    out.insert(out.end(), phi.begin(), phi.end());
    out.insert(out.end(), theta_lin.begin(), theta_lin.end());
    out.insert(out.end(), theta_quad.values().begin(), theta_quad.values().end());
    return out;
}

IqpParams IqpParams::unflatten(std::size_t n, std::span<const double> values) {
    if (values.size() != parameter_count(n)) {
        throw DimensionError("expected " + std::to_string(parameter_count(n)) + " parameters for " +
                             std::to_string(n) + " qubits, got " + std::to_string(values.size()));
    }
    IqpParams p(n);
    std::copy(values.begin(), values.begin() + n, p.phi.begin());
    std::copy(values.begin() + n, values.begin() + 2 * n, p.theta_lin.begin());
    std::copy(values.begin() + 2 * n, values.end(), p.theta_quad.values().begin());
    return p;
}

void IqpParams::validate() const {
    const std::size_t n = phi.size();
    if (theta_lin.size() != n || theta_quad.size() != n || theta_quad.pairs() != PairTable::pair_count(n)) {
        throw DimensionError("IQP parameter blocks disagree on the qubit count");
    }
    const auto finite = [](const std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    };
    if (!finite(phi) || !finite(theta_lin) || !finite(theta_quad.values())) {
        throw InputError("IQP parameters must be finite");
    }
}

namespace {

void require_match(const IsingProblem& problem, const IqpParams& params) {
    params.validate();
    if (problem.size() != params.size()) {
        throw DimensionError("problem has " + std::to_string(problem.size()) + " spins, parameters have " +
                             std::to_string(params.size()) + " qubits");
    }
}

// Trig tables over the dense symmetric theta_ij matrix (diagonal unused).
struct AngleTables {
    std::size_t n;
    std::vector<double> c, s;

    explicit AngleTables(const IqpParams& p) : n(p.size()), c(n * n, 1.0), s(n * n, 0.0) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j, ++k) {
                const double t = p.theta_quad.values()[k];
                c[i * n + j] = c[j * n + i] = std::cos(t);
                s[i * n + j] = s[j * n + i] = std::sin(t);
            }
        }
    }
    double cos(std::size_t i, std::size_t j) const { return c[i * n + j]; }
    double sin(std::size_t i, std::size_t j) const { return s[i * n + j]; }
};

// Product of `f` and, for every position, the product of all other entries.
// Prefix/suffix sweeps: no division, so zero factors are harmless.
double leave_one_out(std::span<const double> f, std::span<double> except) {
    const std::size_t m = f.size();
    double acc = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        except[k] = acc;
        acc *= f[k];
    }
    const double total = acc;
    acc = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        except[k] *= acc;
        acc *= f[k];
    }
    return total;
}

template <bool WithGradient>
EnergyGradient evaluate(const IsingProblem& problem, const IqpParams& params) {
    require_match(problem, params);
    const std::size_t n = params.size();
    const AngleTables t(params);
    EnergyGradient out;
    if constexpr (WithGradient) out.gradient.assign(IqpParams::parameter_count(n), 0.0);
    auto& g = out.gradient;
    const auto quad = [n](std::size_t a, std::size_t b) {
        return 2 * n + (a < b ? PairTable::index(a, b, n) : PairTable::index(b, a, n));
    };

    std::vector<double> sphi(n), cphi(n), sth(n), cth(n);
    for (std::size_t i = 0; i < n; ++i) {
        sphi[i] = std::sin(params.phi[i]);
        cphi[i] = std::cos(params.phi[i]);
        sth[i] = std::sin(params.theta_lin[i]);
        cth[i] = std::cos(params.theta_lin[i]);
    }

    std::vector<std::size_t> others;
    others.reserve(n);
    std::vector<double> fa(n), fb(n), fp(n), fq(n), la(n), lb(n), lp(n), lq(n);
    double e = 0.0;

    // Field terms: h_i sin(phi_i) sin(theta_i) prod_{l != i} cos(theta_il).
    for (std::size_t i = 0; i < n; ++i) {
        const double h = problem.field(i);
        if (h == 0.0) continue;
        others.clear();
        for (std::size_t l = 0; l < n; ++l) {
            if (l != i) others.push_back(l);
        }
        const std::size_t m = others.size();
        for (std::size_t k = 0; k < m; ++k) fa[k] = t.cos(i, others[k]);
        const double prod = leave_one_out({fa.data(), m}, {la.data(), m});
        e += h * sphi[i] * sth[i] * prod;
        if constexpr (WithGradient) {
            g[i] += h * cphi[i] * sth[i] * prod;
            g[n + i] += h * sphi[i] * cth[i] * prod;
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t l = others[k];
                g[quad(i, l)] -= h * sphi[i] * sth[i] * t.sin(i, l) * la[k];
            }
        }
    }

    // Coupling terms: two single-X contributions and one two-X contribution.
    std::size_t pair = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++pair) {
            const double J = problem.couplings().values()[pair];
            if (J == 0.0) continue;
            others.clear();
            for (std::size_t l = 0; l < n; ++l) {
                if (l != i && l != j) others.push_back(l);
            }
            const std::size_t m = others.size();
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t l = others[k];
                const double cli = t.cos(l, i), sli = t.sin(l, i), clj = t.cos(l, j), slj = t.sin(l, j);
                fa[k] = clj;
                fb[k] = cli;
                fp[k] = cli * clj - sli * slj;  // cos(theta_li + theta_lj)
                fq[k] = cli * clj + sli * slj;  // cos(theta_li - theta_lj)
            }
            const double pa = leave_one_out({fa.data(), m}, {la.data(), m});
            const double pb = leave_one_out({fb.data(), m}, {lb.data(), m});
            const double pp = leave_one_out({fp.data(), m}, {lp.data(), m});
            const double pq = leave_one_out({fq.data(), m}, {lq.data(), m});

            const double sij = t.sin(i, j), cij = t.cos(i, j);
            const double cplus = cth[i] * cth[j] - sth[i] * sth[j];
            const double cminus = cth[i] * cth[j] + sth[i] * sth[j];
            const double bracket = cplus * pp - cminus * pq;

            const double t1 = J * cphi[i] * sphi[j] * cth[j] * sij * pa;
            const double t2 = J * sphi[i] * cphi[j] * cth[i] * sij * pb;
            const double k3 = -0.5 * J * sphi[i] * sphi[j];
            e += t1 + t2 + k3 * bracket;

            if constexpr (WithGradient) {
                const double splus = sth[i] * cth[j] + cth[i] * sth[j];
                const double sminus = sth[i] * cth[j] - cth[i] * sth[j];

                g[i] += J * (-sphi[i] * sphi[j] * cth[j] * sij * pa + cphi[i] * cphi[j] * cth[i] * sij * pb) -
                        0.5 * J * cphi[i] * sphi[j] * bracket;
                g[j] += J * (cphi[i] * cphi[j] * cth[j] * sij * pa - sphi[i] * sphi[j] * cth[i] * sij * pb) -
                        0.5 * J * sphi[i] * cphi[j] * bracket;
                g[n + i] += -J * sphi[i] * cphi[j] * sth[i] * sij * pb + k3 * (-splus * pp + sminus * pq);
                g[n + j] += -J * cphi[i] * sphi[j] * sth[j] * sij * pa + k3 * (-splus * pp - sminus * pq);
                g[quad(i, j)] += J * cij * (cphi[i] * sphi[j] * cth[j] * pa + sphi[i] * cphi[j] * cth[i] * pb);

                const double w1 = J * cphi[i] * sphi[j] * cth[j] * sij;
                const double w2 = J * sphi[i] * cphi[j] * cth[i] * sij;
                for (std::size_t k = 0; k < m; ++k) {
                    const std::size_t l = others[k];
                    const double cli = t.cos(l, i), sli = t.sin(l, i), clj = t.cos(l, j), slj = t.sin(l, j);
                    const double sin_sum = sli * clj + cli * slj;   // sin(theta_li + theta_lj)
                    const double sin_diff = sli * clj - cli * slj;  // sin(theta_li - theta_lj)
                    const double plus_part = -cplus * sin_sum * lp[k];
                    g[quad(l, j)] += -w1 * slj * la[k] + k3 * (plus_part - cminus * sin_diff * lq[k]);
                    g[quad(l, i)] += -w2 * sli * lb[k] + k3 * (plus_part + cminus * sin_diff * lq[k]);
                }
            }
        }
    }
    out.energy = e;
    return out;
}

}  // namespace

double energy(const IsingProblem& problem, const IqpParams& params) {
    return evaluate<false>(problem, params).energy;
}

EnergyGradient energy_and_gradient(const IsingProblem& problem, const IqpParams& params) {
    return evaluate<true>(problem, params);
}

std::complex<double> expectation_pauli(const IqpParams& params, PauliTerm term, int weight_cap) {
    params.validate();
    const std::size_t n = params.size();
    const std::uint64_t all = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    if ((term.z_mask & ~all) != 0 || (term.x_mask & ~all) != 0) {
        throw DimensionError("Pauli term acts outside the " + std::to_string(n) + "-qubit register");
    }
    const int wb = term.x_weight();
    const int wa = term.z_weight();
    if (wb > weight_cap) {
        throw ResourceLimitError("Pauli X-weight " + std::to_string(wb) + " exceeds cap " +
                                 std::to_string(weight_cap));
    }
    if (wb == 0) return term.z_mask == 0 ? 1.0 : 0.0;

    const AngleTables t(params);
    std::vector<std::size_t> support, rest;
    for (std::size_t i = 0; i < n; ++i) {
        (((term.x_mask >> i) & 1U) ? support : rest).push_back(i);
    }
    const auto z = [&](std::size_t i) { return ((term.z_mask >> i) & 1U) != 0; };
    const int parity = __builtin_popcountll(term.z_mask & ~term.x_mask) & 1;

    std::vector<double> shifted(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
        const std::size_t i = support[k];
        shifted[k] = params.theta_lin[i] - (z(i) ? std::numbers::pi / 2 : 0.0);
    }

    // The first support spin is pinned to +1: one representative per flip orbit.
    const std::uint64_t orbits = std::uint64_t{1} << (wb - 1);
    std::vector<int> r(support.size(), 1);
    double sum = 0.0;
    for (std::uint64_t code = 0; code < orbits; ++code) {
        for (std::size_t k = 1; k < support.size(); ++k) r[k] = ((code >> (k - 1)) & 1U) ? -1 : 1;
        double arg = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) arg += shifted[k] * r[k];
        double value = parity ? std::sin(arg) : std::cos(arg);
        for (std::size_t j : rest) {
            double c = 0.0;
            for (std::size_t k = 0; k < support.size(); ++k) {
                c += params.theta_quad(support[k], j) * r[k];
            }
            value *= z(j) ? std::sin(c) : std::cos(c);
        }
        sum += value;
    }
    static constexpr std::complex<double> kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kPowersOfI[(wa + parity) % 4] * (sum / static_cast<double>(orbits));
}

Eigen::MatrixXd gram(const IqpParams& params) {
    params.validate();
    const std::size_t n = params.size();
    const AngleTables t(params);
    const auto dim = static_cast<Eigen::Index>(IqpParams::parameter_count(n));
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    const auto& th = params.theta_lin;

    // phi-phi: 1/4 <X_k X_q>.
    for (std::size_t k = 0; k < n; ++k) {
        A(k, k) = 0.25;
        for (std::size_t q = k + 1; q < n; ++q) {
            double plus = std::cos(th[k] + th[q]);
            double minus = std::cos(th[k] - th[q]);
            for (std::size_t l = 0; l < n; ++l) {
                if (l == k || l == q) continue;
                const double clk = t.cos(l, k), slk = t.sin(l, k), clq = t.cos(l, q), slq = t.sin(l, q);
                plus *= clk * clq - slk * slq;
                minus *= clk * clq + slk * slq;
            }
            A(k, q) = A(q, k) = 0.125 * (plus + minus);
        }
    }

    // theta_i - phi_k: 1/4 Re <Z_i X_k>.
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            double v = -0.25 * std::sin(th[k]) * t.sin(i, k);
            for (std::size_t l = 0; l < n; ++l) {
                if (l != i && l != k) v *= t.cos(l, k);
            }
            A(ni + i, k) = A(k, ni + i) = v;
        }
    }

    // theta_ij - phi_k: 1/4 Re <Z_i Z_j X_k>.
    Eigen::Index row = 2 * ni;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++row) {
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                double v = -0.25 * std::cos(th[k]) * t.sin(i, k) * t.sin(j, k);
                for (std::size_t l = 0; l < n; ++l) {
                    if (l != i && l != j && l != k) v *= t.cos(l, k);
                }
                A(row, k) = A(k, row) = v;
            }
        }
    }

    for (Eigen::Index d = ni; d < dim; ++d) A(d, d) = 0.25;
    return A;
}

// --- four-qubit X-basis example --------------------------------------------

namespace {

constexpr std::size_t single(int q) { return static_cast<std::size_t>(q); }
constexpr std::size_t pair_slot(int a, int b) {
    return 4 + (a < b ? PairTable::index(a, b, 4) : PairTable::index(b, a, 4));
}

struct Factor {
    std::size_t angle;
    bool is_sin;
};
using Monomial = std::array<Factor, 6>;

// Four surviving products of <Z_0 Z_a> with (a, b, c) a cyclic labelling of {1, 2, 3}.
std::array<Monomial, 4> zz_monomials(int k) {
    static constexpr int kLabels[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
    const int a = kLabels[k - 1][0], b = kLabels[k - 1][1], c = kLabels[k - 1][2];
    const std::size_t t0 = single(0), ta = single(a), t0b = pair_slot(0, b), t0c = pair_slot(0, c),
                      tab = pair_slot(a, b), tac = pair_slot(a, c);
    return {{
        {{{t0, false}, {ta, false}, {t0b, false}, {t0c, false}, {tab, false}, {tac, false}}},
        {{{t0, true}, {ta, true}, {t0b, false}, {t0c, true}, {tab, false}, {tac, true}}},
        {{{t0, true}, {ta, true}, {t0b, true}, {t0c, false}, {tab, true}, {tac, false}}},
        {{{t0, false}, {ta, false}, {t0b, true}, {t0c, true}, {tab, true}, {tac, true}}},
    }};
}

void require_ten(std::span<const double> angles) {
    if (angles.size() != 10) {
        throw DimensionError("four-qubit X-basis ansatz takes 10 angles, got " + std::to_string(angles.size()));
    }
}

double factor_value(const Factor& f, std::span<const double> angles) {
    return f.is_sin ? std::sin(angles[f.angle]) : std::cos(angles[f.angle]);
}

}  // namespace

double counterexample_zz(std::span<const double> angles, int k) {
    require_ten(angles);
    if (k < 1 || k > 3) throw InputError("counterexample term index must be 1, 2 or 3");
    double sum = 0.0;
    for (const Monomial& mono : zz_monomials(k)) {
        double v = 1.0;
        for (const Factor& f : mono) v *= factor_value(f, angles);
        sum += v;
    }
    return sum;
}

double counterexample_zz(std::span<const double> angles) { return counterexample_zz(angles, 1); }

double counterexample_energy(std::span<const double> angles) {
    return counterexample_zz(angles, 1) + counterexample_zz(angles, 2) + counterexample_zz(angles, 3);
}

std::array<double, 10> counterexample_gradient(std::span<const double> angles) {
    require_ten(angles);
    std::array<double, 10> g{};
    for (int k = 1; k <= 3; ++k) {
        for (const Monomial& mono : zz_monomials(k)) {
            std::array<double, 6> v{};
            for (std::size_t f = 0; f < 6; ++f) v[f] = factor_value(mono[f], angles);
            for (std::size_t f = 0; f < 6; ++f) {
                const double x = angles[mono[f].angle];
                double d = mono[f].is_sin ? std::cos(x) : -std::sin(x);
                for (std::size_t o = 0; o < 6; ++o) {
                    if (o != f) d *= v[o];
                }
                g[mono[f].angle] += d;
            }
        }
    }
    return g;
}

}  // namespace iqp
