#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iqpflow/analytic.hpp"
#include "iqpflow/ising.hpp"

namespace iqp {

// --- QAOA warm start --------------------------------------------------------

struct QaoaParams {
    double gamma = 0.0;  // problem-phase angle
    double beta = 0.0;   // mixer angle
};

/// theta_i = 2 gamma h_i, theta_ij = 2 gamma J_ij, phi_i = 2 beta: the ansatz
/// state then equals qaoa_state(problem, gamma, beta) exactly.
IqpParams embed_qaoa(const IsingProblem& problem, QaoaParams q);

struct QaoaEnergyGradient {
    double energy = 0.0;
    double d_gamma = 0.0;
    double d_beta = 0.0;
};

/// One-layer QAOA energy with the chain rule through embed_qaoa.
QaoaEnergyGradient qaoa_energy_and_gradient(const IsingProblem& problem, QaoaParams q);

struct QaoaOptions {
    int grid = 8;  // grid x grid starts over gamma in (0, pi], beta in (-pi/2, pi/2]
    int max_iterations = 200;
    double grad_tol = 1e-10;
};

struct QaoaResult {
    QaoaParams params;
    double energy = 0.0;
    std::vector<QaoaParams> starts;
    std::vector<double> start_energies;
};

std::vector<QaoaParams> qaoa_start_grid(int grid);

/// Best local minimum over the multi-start grid, each start refined by BFGS.
QaoaResult optimize_qaoa(const IsingProblem& problem, const QaoaOptions& options = {});

// Small dense BFGS with backtracking line search, used on the QAOA submanifold.
struct BfgsOptions {
    int max_iterations = 200;
    double grad_tol = 1e-10;
};
struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;
BfgsResult minimize_bfgs(const ValueAndGradient& f, std::vector<double> x0, const BfgsOptions& options = {});

// --- flows on the ansatz manifold -------------------------------------------

enum class FlowMode { plain_gradient, varqite };

struct FlowConfig {
    FlowMode mode = FlowMode::plain_gradient;
    double tau_max = 50.0;
    double rtol = 1e-8;
    double atol = 1e-10;
    double grad_tol = 1e-6;
    double gram_regularization = 1e-8;
    double gram_condition_max = 1e10;
    double record_stride = 0.1;
    double min_step = 1e-12;
    std::size_t max_steps = 2'000'000;

    void validate() const;
};

enum class Termination { tau_max, converged, gram_singular, integration_failure };

std::string to_string(FlowMode mode);
std::string to_string(Termination t);
FlowMode flow_mode_from_string(const std::string& s);
Termination termination_from_string(const std::string& s);

struct TrajectoryRecord {
    double tau = 0.0;
    IqpParams params;
    double energy = 0.0;
    double grad_norm = 0.0;
    std::optional<double> gram_condition;
    bool step_accepted = true;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    Termination termination = Termination::tau_max;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    std::size_t size() const { return records.size(); }
    const TrajectoryRecord& front() const { return records.front(); }
    const TrajectoryRecord& back() const { return records.back(); }
};

/// Thrown when the adaptive step collapses; carries everything recorded so far.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, Trajectory partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

/// Integrates  A dtheta/dtau = -1/2 grad E  (A = I in plain mode) with an
/// adaptive Dormand-Prince 5(4) pair. Records every record_stride in tau plus
/// both endpoints.
Trajectory flow(const IsingProblem& problem, const IqpParams& start, const FlowConfig& cfg);

/// 1e-8 (1 + |E|), the allowed energy increase between consecutive records.
double monotone_tolerance(double energy);
bool energy_non_increasing(const Trajectory& traj);

/// Condition number of A + lambda I.
double regularized_condition(const Eigen::MatrixXd& gram_matrix, double lambda);

// --- picking points on a trajectory ----------------------------------------

struct PlateauOptions {
    double slope_tol = 1e-3;     // |dE/dtau| < slope_tol (1 + |E|)
    double min_fraction = 0.05;  // window length relative to total tau span
};

/// Midpoint record index of the first flat window, or the last index if none.
std::size_t detect_plateau(const Trajectory& traj, const PlateauOptions& options = {});
std::size_t detect_plateau(std::span<const double> tau, std::span<const double> energy,
                           const PlateauOptions& options = {});

/// Two-qubit angles within `angle_tol` of a multiple of pi are replaceable by
/// single-qubit gates.
bool prunable(double angle, double angle_tol);
std::size_t entangling_gate_count(const PairTable& theta_quad, double angle_tol);
bool pruned_graph_connected(const PairTable& theta_quad, double angle_tol);

struct CircuitSelection {
    std::array<std::size_t, 4> steps{};
    std::array<double, 4> entangling_fraction{};  // relative to the warm start
    std::array<bool, 4> connected{};
    bool degenerate = false;
    std::vector<bool> connected_per_record;
    std::vector<double> fraction_per_record;
};

inline constexpr double kDefaultAngleTol = 0.05;

/// Warm start, the last record before the pruned graph first disconnects, and
/// two records at equidistant indices between them.
CircuitSelection select_circuits(const Trajectory& traj, double angle_tol = kDefaultAngleTol);

// --- second-order checks ----------------------------------------------------

inline constexpr std::size_t kDefaultHessianCap = 8;

/// Central differences of the analytic gradient, symmetrized.
Eigen::MatrixXd hessian(const IsingProblem& problem, const IqpParams& params, double step = 1e-5,
                        std::size_t cap = kDefaultHessianCap);

Eigen::MatrixXd counterexample_hessian(std::span<const double> angles, double step = 1e-5);

/// Point on the critical line of H = Z0 (Z1 + Z2 + Z3), parameterized by theta_2.
XBasisAngles critical_line_point(double theta2);

struct CounterexampleCheck {
    XBasisAngles angles{};
    double theta2 = 0.0;
    double energy = 0.0;
    double grad_norm = 0.0;
    std::vector<double> hessian_eigenvalues;
    int null_modes = 0;
    double ground_overlap = 0.0;

    bool gradient_ok = false;
    bool energy_ok = false;
    bool hessian_ok = false;
    bool overlap_ok = false;

    bool passed() const { return gradient_ok && energy_ok && hessian_ok && overlap_ok; }
    std::vector<std::string> failures() const;
};

struct CounterexampleReport {
    std::vector<CounterexampleCheck> checks;
    bool passed() const;
};

struct CounterexampleTolerances {
    double gradient = 1e-8;
    double energy = 1e-10;
    double eigenvalue = 1e-8;
    double overlap = 1e-10;
};

/// Checks gradient, energy -2, Hessian spectrum (PSD, one null mode) and ground
/// overlap 0.5 at each theta_2 on the critical line. theta_2 near pi/2 is rejected.
CounterexampleReport verify_counterexample(std::span<const double> theta2_samples,
                                           const CounterexampleTolerances& tol = {});

/// Same checks at arbitrary points of the four-qubit X-basis ansatz.
CounterexampleReport verify_counterexample_points(std::span<const XBasisAngles> points,
                                                  const CounterexampleTolerances& tol = {});

/// The Hamiltonian Z0 (Z1 + Z2 + Z3) as an Ising problem.
IsingProblem counterexample_problem();

/// round(2^{0.32 n}) clamped to [4, 1208].
std::size_t shots_schedule(std::size_t n);

}  // namespace iqp
