#pragma once

// Library side of the command-line driver. Each cmd_* function does its own
// file IO and returns an exit code; the run_* / summarize_* functions are pure
// and used directly by the tests.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "iqpflow/optimize.hpp"
#include "iqpflow/serialization.hpp"
#include "iqpflow/simulator.hpp"
#include "iqpflow/thermal.hpp"

namespace iqp {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int resource = 1;  // bad input, configuration, IO or size caps
inline constexpr int verification = 2;
inline constexpr int integration = 3;
}  // namespace exit_code

struct RunConfig {
    FlowConfig flow;
    QaoaOptions qaoa;
    PlateauOptions plateau;
    double angle_tol = kDefaultAngleTol;
    std::uint64_t seed = 0;
    std::size_t sv_cap = kDefaultStateVectorCap;
    std::size_t brute_force_cap = kDefaultBruteForceCap;
    std::size_t thermal_cap = 20;
    std::optional<std::uint64_t> shots;  // total budget; shots_schedule(N) when unset
    std::size_t workers = 1;
};

/// Nested keys: "flow", "qaoa", "plateau"; top-level scalars as in RunConfig.
RunConfig run_config_from_json(const json& j, RunConfig base = {});
json to_json(const RunConfig& cfg);

struct CircuitResult {
    std::string role;  // warm_start, plateau, intermediate, last_connected
    std::size_t record = 0;
    double tau = 0.0;
    double energy = 0.0;
    std::size_t entangling_gates = 0;
    double entangling_fraction = 0.0;
    bool connected = false;
    std::optional<double> ground_overlap;
    SampleSet samples;
    double best_energy = 0.0;
    std::uint64_t best_bits = 0;
    std::optional<double> approximation_ratio;
    std::optional<bool> ground_hit;
};

struct Timings {
    double qaoa = 0.0;
    double flow = 0.0;
    double sampling = 0.0;
    double thermal = 0.0;
    double total = 0.0;
};

struct RunOutcome {
    std::string instance_file;
    IsingProblem problem;
    bool biased = false;
    std::optional<GroundTruth> truth;
    QaoaResult warm_start;
    FlowMode mode = FlowMode::plain_gradient;
    Trajectory trajectory;
    std::optional<std::string> integration_error;
    std::string selection_rule;  // plateau or circuits
    std::optional<CircuitSelection> selection;
    std::vector<CircuitResult> circuits;
    std::optional<ThermalFit> thermal_warm_start;
    std::optional<ThermalFit> thermal_final;
    std::optional<double> best_approximation_ratio;
    bool ground_hit = false;
    Timings timings;

    int exit_code() const { return integration_error ? exit_code::integration : exit_code::ok; }
};

/// Unbiased instances sample the warm start and the plateau point; biased ones
/// sample the four select_circuits picks. The shot budget is shared.
RunOutcome run_instance(const IsingProblem& problem, const RunConfig& cfg, std::string instance_file = {});

/// The "timings" key is the only part that varies between identical runs.
json report_json(const RunOutcome& outcome);

/// Equal split with the remainder going to earlier circuits.
std::vector<std::uint64_t> split_shots(std::uint64_t total, std::size_t circuits);

// --- instance generation -----------------------------------------------------

struct GenOptions {
    std::size_t n_min = 7;
    std::size_t n_max = 14;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    bool biased = false;
};

/// Writes sk_n<N>_<index>.json per (N, index) with seed derive_seed(seed, N, index)
/// plus manifest.json; returns the instance paths.
std::vector<std::filesystem::path> generate_instances(const GenOptions& options, const std::filesystem::path& out_dir);

/// Instance paths listed in a manifest, resolved against its directory.
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest);

// --- scaling study -------------------------------------------------------------

struct ScalingSample {
    std::string file;
    std::size_t n = 0;
    double p_qaoa = 0.0;
    double p_iqp = 0.0;
    std::size_t record = 0;
    double tau = 0.0;
    Termination termination = Termination::tau_max;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x with standard errors.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScalingRow {
    std::size_t n = 0;
    std::size_t count = 0;
    double mean_qaoa = 0.0;
    double se_qaoa = 0.0;
    double mean_iqp = 0.0;
    double se_iqp = 0.0;
};

struct ScalingSummary {
    std::vector<ScalingRow> rows;
    LinearFit iqp_fit;    // log2 mean p_IQP vs N
    LinearFit ratio_fit;  // log2 (mean p_IQP / mean p_QAOA) vs N
    double alpha = 0.0, alpha_se = 0.0;
    double delta = 0.0, delta_se = 0.0;
    std::size_t improved = 0;  // instances with p_IQP >= p_QAOA
    std::vector<ScalingSample> samples;
    std::vector<std::pair<std::string, std::string>> exclusions;  // file, reason
};

/// Exact overlaps at the warm start and at the selected flow point.
ScalingSample scaling_sample(const IsingProblem& problem, const RunConfig& cfg, std::string file = {});

/// Throws InputError with fewer than four distinct sizes.
ScalingSummary summarize_scaling(std::vector<ScalingSample> samples,
                                 std::vector<std::pair<std::string, std::string>> exclusions = {});

using Logger = std::function<void(const std::string&)>;

/// Runs scaling_sample over the files on cfg.workers threads; failing
/// instances are excluded and logged.
ScalingSummary run_scaling(const std::vector<std::filesystem::path>& files, const RunConfig& cfg,
                           const Logger& log = {});

json to_json(const ScalingSummary& summary);
void write_scaling_csv(std::ostream& out, const ScalingSummary& summary);

// --- four-qubit example and thermal fits ---------------------------------------

json to_json(const CounterexampleReport& report);

/// Default theta_2 grid 0.1 k, k = 0..14, minus the excluded neighbourhood of pi/2.
std::vector<double> default_theta2_samples();

struct TemperatureComparison {
    QaoaResult warm_start;
    double params_energy = 0.0;
    ThermalFit warm_fit;
    ThermalFit params_fit;
    std::vector<EnergyLevel> warm_distribution;
    std::vector<EnergyLevel> params_distribution;
};

TemperatureComparison compare_temperatures(const IsingProblem& problem, const IqpParams& params,
                                           const RunConfig& cfg);
json to_json(const TemperatureComparison& cmp);

// --- commands (return exit codes) ------------------------------------------------

int cmd_gen(const GenOptions& options, const std::filesystem::path& out_dir, const Logger& log = {});
int cmd_run(const std::filesystem::path& instance, const RunConfig& cfg, const std::filesystem::path& out,
            const std::optional<std::filesystem::path>& trajectory_out = {},
            const std::optional<std::filesystem::path>& samples_dir = {}, const Logger& log = {});
int cmd_scaling(const std::filesystem::path& manifest, const RunConfig& cfg, const std::filesystem::path& out,
                const Logger& log = {});
int cmd_counterexample(const std::filesystem::path& out, const std::optional<std::filesystem::path>& points = {},
                       const Logger& log = {});
int cmd_fit_temp(const std::filesystem::path& instance, const std::filesystem::path& params, const RunConfig& cfg,
                 const std::filesystem::path& out, const Logger& log = {});

}  // namespace iqp
