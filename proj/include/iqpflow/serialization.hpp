#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "iqpflow/analytic.hpp"
#include "iqpflow/ising.hpp"
#include "iqpflow/optimize.hpp"
#include "iqpflow/simulator.hpp"
#include "iqpflow/thermal.hpp"

namespace iqp {

using json = nlohmann::json;

// Instance files: {"n", "h": [...], "J": [[i, j, value], ...], "seed": int|null, "biased": bool}
json to_json(const IsingProblem& problem);
IsingProblem problem_from_json(const json& j);

// Parameter files: {"n", "phi": [...], "theta_lin": [...], "theta_quad": [[i, j, value], ...]}
json to_json(const IqpParams& params);
IqpParams params_from_json(const json& j);

/// Keys present in `j` override the fields of `base`.
json to_json(const FlowConfig& cfg);
FlowConfig flow_config_from_json(const json& j, FlowConfig base = {});

json to_json(const ThermalFit& fit);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Qubit 0 is the leftmost character; '1' means spin -1.
std::string bitstring(std::uint64_t bits, std::size_t n);
std::uint64_t bits_from_bitstring(const std::string& s);

/// JSON lines, one record per line: tau, energy, grad_norm, gram_condition,
/// step_accepted and "params_file", a path relative to the trajectory file of a
/// parameter snapshot written into `<stem>_params/`.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

/// CSV with header bitstring,count,energy,is_ground. is_ground is empty when
/// no ground truth is supplied.
void write_samples_csv(std::ostream& out, const SampleSet& samples, const IsingProblem& problem,
                       const GroundTruth* truth);

/// Raw little-endian float64 pairs (re, im) in amplitude order.
void write_statevector(const std::filesystem::path& path, const StateVector& state);
StateVector read_statevector(const std::filesystem::path& path);

}  // namespace iqp
