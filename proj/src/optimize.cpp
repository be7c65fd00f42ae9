#include "iqpflow/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include "iqpflow/simulator.hpp"

namespace iqp {

// --- QAOA warm start --------------------------------------------------------

IqpParams embed_qaoa(const IsingProblem& problem, QaoaParams q) {
    const std::size_t n = problem.size();
    IqpParams p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.phi[i] = 2.0 * q.beta;
        p.theta_lin[i] = 2.0 * q.gamma * problem.field(i);
    }
    const auto& J = problem.couplings().values();
    auto& th = p.theta_quad.values();
    for (std::size_t k = 0; k < J.size(); ++k) th[k] = 2.0 * q.gamma * J[k];
    return p;
}

QaoaEnergyGradient qaoa_energy_and_gradient(const IsingProblem& problem, QaoaParams q) {
    const std::size_t n = problem.size();
    const EnergyGradient eg = energy_and_gradient(problem, embed_qaoa(problem, q));
    QaoaEnergyGradient out;
    out.energy = eg.energy;
    for (std::size_t i = 0; i < n; ++i) {
        out.d_beta += 2.0 * eg.gradient[i];
        out.d_gamma += 2.0 * problem.field(i) * eg.gradient[n + i];
    }
    const auto& J = problem.couplings().values();
    for (std::size_t k = 0; k < J.size(); ++k) out.d_gamma += 2.0 * J[k] * eg.gradient[2 * n + k];
    return out;
}

std::vector<QaoaParams> qaoa_start_grid(int grid) {
    if (grid < 1) throw InputError("QAOA start grid must be at least 1x1");
    std::vector<QaoaParams> starts;
    starts.reserve(static_cast<std::size_t>(grid * grid));
    const double g = static_cast<double>(grid);
    for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
            starts.push_back({std::numbers::pi * (a + 1) / g, -std::numbers::pi / 2 + std::numbers::pi * (b + 1) / g});
        }
    }
    return starts;
}

QaoaResult optimize_qaoa(const IsingProblem& problem, const QaoaOptions& options) {
    const ValueAndGradient objective = [&problem](std::span<const double> x, std::span<double> grad) {
        const auto eg = qaoa_energy_and_gradient(problem, {x[0], x[1]});
        grad[0] = eg.d_gamma;
        grad[1] = eg.d_beta;
        return eg.energy;
    };
    QaoaResult result;
    result.starts = qaoa_start_grid(options.grid);
    result.energy = std::numeric_limits<double>::infinity();
    const BfgsOptions bfgs{options.max_iterations, options.grad_tol};
    for (const QaoaParams& s : result.starts) {
        result.start_energies.push_back(energy(problem, embed_qaoa(problem, s)));
        const BfgsResult r = minimize_bfgs(objective, {s.gamma, s.beta}, bfgs);
        if (r.value < result.energy - 1e-12 * (1.0 + std::abs(r.value))) {
            result.energy = r.value;
            // beta has period pi up to a global phase; report it in (-pi/2, pi/2].
            double beta = std::remainder(r.x[1], std::numbers::pi);
            if (beta <= -std::numbers::pi / 2) beta += std::numbers::pi;
            result.params = {r.x[0], beta};
        }
    }
    return result;
}

BfgsResult minimize_bfgs(const ValueAndGradient& f, std::vector<double> x0, const BfgsOptions& options) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    Eigen::VectorXd g(n), g_new(n), x_new(n);
    const auto eval = [&f, n](const Eigen::VectorXd& at, Eigen::VectorXd& grad) {
        return f({at.data(), static_cast<std::size_t>(n)}, {grad.data(), static_cast<std::size_t>(n)});
    };
    double fx = eval(x, g);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    constexpr double kArmijo = 1e-4;

    BfgsResult out;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        if (g.lpNorm<Eigen::Infinity>() < options.grad_tol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd p = -H * g;
        double slope = g.dot(p);
        if (slope >= 0.0) {
            H.setIdentity();
            p = -g;
            slope = g.dot(p);
        }
        double alpha = 1.0, f_new = fx;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + alpha * p;
            f_new = eval(x_new, g_new);
            if (f_new <= fx + kArmijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        // Progress below rounding level: the gradient tolerance is out of reach.
        const bool stalled = fx - f_new <= 1e-15 * (1.0 + std::abs(fx));
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-16) {
            if (it == 0) H *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        x = x_new;
        g = g_new;
        fx = f_new;
        if (stalled) {
            ++it;
            break;
        }
    }
    if (!out.converged && g.lpNorm<Eigen::Infinity>() < options.grad_tol) out.converged = true;
    out.x.assign(x.data(), x.data() + n);
    out.value = fx;
    out.iterations = it;
    return out;
}

// --- flows ------------------------------------------------------------------

void FlowConfig::validate() const {
    if (!(tau_max > 0.0) || !(rtol > 0.0) || !(atol > 0.0) || !(grad_tol > 0.0) ||
        !(gram_regularization >= 0.0) || !(gram_condition_max > 1.0) || !(record_stride > 0.0) ||
        !(min_step > 0.0)) {
        throw InputError("flow configuration: tolerances, tau_max and record_stride must be positive");
    }
}

std::string to_string(FlowMode mode) {
    return mode == FlowMode::varqite ? "varqite" : "plain_gradient";
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::tau_max: return "tau_max";
        case Termination::converged: return "converged";
        case Termination::gram_singular: return "gram_singular";
        case Termination::integration_failure: return "integration_failure";
    }
    return "unknown";
}

FlowMode flow_mode_from_string(const std::string& s) {
    if (s == "varqite") return FlowMode::varqite;
    if (s == "plain_gradient" || s == "plain") return FlowMode::plain_gradient;
    throw InputError("unknown flow mode '" + s + "'");
}

Termination termination_from_string(const std::string& s) {
    for (auto t : {Termination::tau_max, Termination::converged, Termination::gram_singular,
                   Termination::integration_failure}) {
        if (to_string(t) == s) return t;
    }
    throw InputError("unknown termination reason '" + s + "'");
}

double regularized_condition(const Eigen::MatrixXd& gram_matrix, double lambda) {
    Eigen::MatrixXd shifted = gram_matrix;
    shifted.diagonal().array() += lambda;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shifted, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

double monotone_tolerance(double energy) { return 1e-8 * (1.0 + std::abs(energy)); }

bool energy_non_increasing(const Trajectory& traj) {
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (traj.records[k].energy > traj.records[k - 1].energy + monotone_tolerance(traj.records[k - 1].energy)) {
            return false;
        }
    }
    return true;
}

Trajectory flow(const IsingProblem& problem, const IqpParams& start, const FlowConfig& cfg) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    cfg.validate();
    start.validate();
    if (start.size() != problem.size()) throw DimensionError("start parameters do not match the problem size");
    const std::size_t n = problem.size();
    const bool varqite = cfg.mode == FlowMode::varqite;

    const auto rhs = [&](const State& x, State& dxdt, double /*tau*/) {
        const IqpParams p = IqpParams::unflatten(n, x);
        const EnergyGradient eg = energy_and_gradient(problem, p);
        dxdt.resize(x.size());
        if (!varqite) {
            for (std::size_t k = 0; k < x.size(); ++k) dxdt[k] = -0.5 * eg.gradient[k];
            return;
        }
        Eigen::MatrixXd A = gram(p);
        A.diagonal().array() += cfg.gram_regularization;
        const Eigen::Map<const Eigen::VectorXd> g(eg.gradient.data(), static_cast<Eigen::Index>(x.size()));
        const Eigen::VectorXd v = A.ldlt().solve(-0.5 * g);
        std::copy(v.data(), v.data() + v.size(), dxdt.begin());
    };

    const auto make_record = [&](double tau, const State& x) {
        TrajectoryRecord rec;
        rec.tau = tau;
        rec.params = IqpParams::unflatten(n, x);
        const EnergyGradient eg = energy_and_gradient(problem, rec.params);
        rec.energy = eg.energy;
        double sq = 0.0;
        for (double v : eg.gradient) sq += v * v;
        rec.grad_norm = std::sqrt(sq);
        if (varqite) rec.gram_condition = regularized_condition(gram(rec.params), cfg.gram_regularization);
        return rec;
    };

    Trajectory traj;
    State x = start.flatten();
    double t = 0.0;
    traj.records.push_back(make_record(t, x));
    if (traj.back().grad_norm < cfg.grad_tol) {
        traj.termination = Termination::converged;
        return traj;
    }
    if (varqite && *traj.back().gram_condition > cfg.gram_condition_max) {
        traj.records.back().step_accepted = false;
        traj.termination = Termination::gram_singular;
        return traj;
    }

    auto stepper = odeint::make_controlled(cfg.atol, cfg.rtol, odeint::runge_kutta_dopri5<State>());
    double dt = std::min(cfg.record_stride, 1e-2);
    std::size_t next_index = 1;

    while (true) {
        const double next_record = std::min(static_cast<double>(next_index) * cfg.record_stride, cfg.tau_max);
        double step = std::min(dt, next_record - t);
        const bool clamped = step < dt;
        if (stepper.try_step(rhs, x, t, step) == odeint::fail) {
            ++traj.rejected_steps;
            dt = step;
            if (dt < cfg.min_step * std::max(1.0, std::abs(t))) {
                if (t > traj.back().tau) traj.records.push_back(make_record(t, x));
                traj.termination = Termination::integration_failure;
                throw IntegrationError("step size underflow at tau = " + std::to_string(t), std::move(traj));
            }
            continue;
        }
        ++traj.accepted_steps;
        dt = clamped ? std::max(step, dt) : step;
        if (std::abs(t - next_record) <= 1e-12 * std::max(1.0, next_record)) t = next_record;

        const bool at_record = t >= next_record;
        const bool at_end = t >= cfg.tau_max;
        TrajectoryRecord rec = make_record(t, x);

        if (varqite && *rec.gram_condition > cfg.gram_condition_max) {
            rec.step_accepted = false;
            traj.records.push_back(std::move(rec));
            traj.termination = Termination::gram_singular;
            break;
        }
        if (rec.grad_norm < cfg.grad_tol) {
            traj.records.push_back(std::move(rec));
            traj.termination = Termination::converged;
            break;
        }
        if (at_record || at_end) {
            traj.records.push_back(std::move(rec));
            ++next_index;
        }
        if (at_end) {
            traj.termination = Termination::tau_max;
            break;
        }
        if (traj.accepted_steps + traj.rejected_steps > cfg.max_steps) {
            if (t > traj.back().tau) traj.records.push_back(make_record(t, x));
            traj.termination = Termination::integration_failure;
            throw IntegrationError("step budget exhausted at tau = " + std::to_string(t), std::move(traj));
        }
    }
    return traj;
}

// --- plateau and circuit selection ----------------------------------------

std::size_t detect_plateau(std::span<const double> tau, std::span<const double> energy,
                           const PlateauOptions& options) {
    if (tau.size() != energy.size()) throw DimensionError("tau and energy series differ in length");
    const std::size_t count = tau.size();
    if (count < 3) return count == 0 ? 0 : count - 1;
    const double span = tau.back() - tau.front();
    const double min_length = options.min_fraction * span;

    std::size_t k = 0;
    while (k + 1 < count) {
        const auto flat = [&](std::size_t s) {
            const double slope = (energy[s + 1] - energy[s]) / (tau[s + 1] - tau[s]);
            return std::abs(slope) < options.slope_tol * (1.0 + std::abs(energy[s]));
        };
        if (!flat(k)) {
            ++k;
            continue;
        }
        std::size_t end = k;  // last flat segment
        while (end + 2 < count && flat(end + 1)) ++end;
        const std::size_t first = k, last = end + 1;  // record range of the window
        if (tau[last] - tau[first] >= min_length) return (first + last) / 2;
        k = end + 1;
    }
    return count - 1;
}

std::size_t detect_plateau(const Trajectory& traj, const PlateauOptions& options) {
    std::vector<double> tau, energy;
    tau.reserve(traj.size());
    energy.reserve(traj.size());
    for (const auto& r : traj.records) {
        tau.push_back(r.tau);
        energy.push_back(r.energy);
    }
    return detect_plateau(tau, energy, options);
}

bool prunable(double angle, double angle_tol) {
    const double r = std::remainder(angle, std::numbers::pi);  // in [-pi/2, pi/2]
    return std::abs(r) <= angle_tol;
}

std::size_t entangling_gate_count(const PairTable& theta_quad, double angle_tol) {
    return static_cast<std::size_t>(std::count_if(theta_quad.values().begin(), theta_quad.values().end(),
                                                  [angle_tol](double a) { return !prunable(a, angle_tol); }));
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), components_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[b] = a;
            --components_;
        }
    }
    std::size_t components() const { return components_; }

private:
    std::vector<std::size_t> parent_;
    std::size_t components_;
};

}  // namespace

bool pruned_graph_connected(const PairTable& theta_quad, double angle_tol) {
    const std::size_t n = theta_quad.size();
    if (n <= 1) return true;
    DisjointSets sets(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            if (!prunable(theta_quad.values()[k], angle_tol)) sets.unite(i, j);
        }
    }
    return sets.components() == 1;
}

CircuitSelection select_circuits(const Trajectory& traj, double angle_tol) {
    if (traj.size() == 0) throw InputError("cannot select circuits from an empty trajectory");
    CircuitSelection sel;
    const double base = static_cast<double>(entangling_gate_count(traj.front().params.theta_quad, angle_tol));
    for (const auto& rec : traj.records) {
        sel.connected_per_record.push_back(pruned_graph_connected(rec.params.theta_quad, angle_tol));
        const double count = static_cast<double>(entangling_gate_count(rec.params.theta_quad, angle_tol));
        sel.fraction_per_record.push_back(base > 0.0 ? count / base : 0.0);
    }
    std::size_t last = 0;
    if (sel.connected_per_record[0]) {
        while (last + 1 < traj.size() && sel.connected_per_record[last + 1]) ++last;
    }
    sel.degenerate = last == 0;
    sel.steps = {0, last / 3, 2 * last / 3, last};
    for (std::size_t c = 0; c < 4; ++c) {
        sel.entangling_fraction[c] = sel.fraction_per_record[sel.steps[c]];
        sel.connected[c] = sel.connected_per_record[sel.steps[c]];
    }
    return sel;
}

// --- second-order checks ----------------------------------------------------

Eigen::MatrixXd hessian(const IsingProblem& problem, const IqpParams& params, double step, std::size_t cap) {
    if (params.size() > cap) {
        throw ResourceLimitError("finite-difference Hessian limited to " + std::to_string(cap) + " qubits");
    }
    const std::size_t n = params.size();
    const std::vector<double> x0 = params.flatten();
    const auto dim = static_cast<Eigen::Index>(x0.size());
    Eigen::MatrixXd H(dim, dim);
    for (Eigen::Index mu = 0; mu < dim; ++mu) {
        std::vector<double> plus = x0, minus = x0;
        plus[mu] += step;
        minus[mu] -= step;
        const auto gp = gradient(problem, IqpParams::unflatten(n, plus));
        const auto gm = gradient(problem, IqpParams::unflatten(n, minus));
        for (Eigen::Index nu = 0; nu < dim; ++nu) H(nu, mu) = (gp[nu] - gm[nu]) / (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd counterexample_hessian(std::span<const double> angles, double step) {
    if (angles.size() != 10) throw DimensionError("four-qubit X-basis ansatz takes 10 angles");
    Eigen::MatrixXd H(10, 10);
    for (Eigen::Index mu = 0; mu < 10; ++mu) {
        XBasisAngles plus{}, minus{};
        std::copy(angles.begin(), angles.end(), plus.begin());
        minus = plus;
        plus[mu] += step;
        minus[mu] -= step;
        const auto gp = counterexample_gradient(plus);
        const auto gm = counterexample_gradient(minus);
        for (Eigen::Index nu = 0; nu < 10; ++nu) H(nu, mu) = (gp[nu] - gm[nu]) / (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
}

XBasisAngles critical_line_point(double theta2) {
    constexpr double h = std::numbers::pi / 2;
    constexpr double pi = std::numbers::pi;
    // theta_0..theta_3, theta_01, theta_02, theta_03, theta_12, theta_13, theta_23
    return {h, h, theta2, h, h, pi, h, 0.0, h, 0.0};
}

IsingProblem counterexample_problem() {
    IsingProblem p(4);
    p.set_coupling(0, 1, 1.0);
    p.set_coupling(0, 2, 1.0);
    p.set_coupling(0, 3, 1.0);
    return p;
}

std::vector<std::string> CounterexampleCheck::failures() const {
    std::vector<std::string> out;
    if (!gradient_ok) out.emplace_back("gradient");
    if (!energy_ok) out.emplace_back("energy");
    if (!hessian_ok) out.emplace_back("hessian");
    if (!overlap_ok) out.emplace_back("overlap");
    return out;
}

bool CounterexampleReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CounterexampleCheck& c) { return c.passed(); });
}

CounterexampleReport verify_counterexample_points(std::span<const XBasisAngles> points,
                                                  const CounterexampleTolerances& tol) {
    const IsingProblem problem = counterexample_problem();
    const GroundTruth truth = brute_force_ground(problem);
    CounterexampleReport report;
    for (const XBasisAngles& angles : points) {
        CounterexampleCheck c;
        c.angles = angles;
        c.theta2 = angles[2];
        c.energy = counterexample_energy(angles);
        const auto g = counterexample_gradient(angles);
        c.grad_norm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));

        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(counterexample_hessian(angles),
                                                                Eigen::EigenvaluesOnly);
        c.hessian_eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        bool psd = true;
        for (double ev : c.hessian_eigenvalues) {
            if (std::abs(ev) < tol.eigenvalue) ++c.null_modes;
            if (ev < -tol.eigenvalue) psd = false;
        }

        std::vector<double> lin(angles.begin(), angles.begin() + 4);
        PairTable quad(4);
        std::copy(angles.begin() + 4, angles.end(), quad.values().begin());
        c.ground_overlap = ground_overlap(hadamard_iqp_state(lin, quad), truth);

        c.gradient_ok = c.grad_norm < tol.gradient;
        c.energy_ok = std::abs(c.energy + 2.0) <= tol.energy;
        c.hessian_ok = psd && c.null_modes == 1;
        c.overlap_ok = std::abs(c.ground_overlap - 0.5) <= tol.overlap;
        report.checks.push_back(std::move(c));
    }
    return report;
}

CounterexampleReport verify_counterexample(std::span<const double> theta2_samples, const CounterexampleTolerances& tol) {
    constexpr double kExcluded = 0.05;
    std::vector<XBasisAngles> points;
    for (double t2 : theta2_samples) {
        const double offset = std::remainder(t2 - std::numbers::pi / 2, 2 * std::numbers::pi);
        if (std::abs(offset) < kExcluded) {
            throw InputError("theta_2 = " + std::to_string(t2) + " lies at the excluded point pi/2");
        }
        points.push_back(critical_line_point(t2));
    }
    return verify_counterexample_points(points, tol);
}

std::size_t shots_schedule(std::size_t n) {
    if (n < 1) throw InputError("shots schedule needs n >= 1");
    const double raw = std::round(std::exp2(0.32 * static_cast<double>(n)));
    return static_cast<std::size_t>(std::clamp(raw, 4.0, 1208.0));
}

}  // namespace iqp
