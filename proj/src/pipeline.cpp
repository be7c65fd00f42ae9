#include "iqpflow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "iqpflow/random.hpp"

namespace iqp {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void emit(const Logger& log, const std::string& message) {
    if (log) log(message);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool is_biased(const IsingProblem& problem) { return problem.biased || !problem.unbiased(); }

// Maps library exceptions onto the exit-code contract.
template <typename Body>
int guarded(const Logger& log, Body&& body) {
    try {
        return body();
    } catch (const IntegrationError& e) {
        emit(log, std::string("integration failure: ") + e.what());
        return exit_code::integration;
    } catch (const std::exception& e) {
        emit(log, std::string("error: ") + e.what());
        return exit_code::resource;
    }
}

CircuitResult evaluate_circuit(const RunOutcome& run, std::size_t record, std::string role, double base_gates,
                               std::uint64_t shots, std::uint64_t sample_seed, const RunConfig& cfg) {
    const TrajectoryRecord& rec = run.trajectory.records[record];
    CircuitResult c;
    c.role = std::move(role);
    c.record = record;
    c.tau = rec.tau;
    c.energy = rec.energy;
    c.entangling_gates = entangling_gate_count(rec.params.theta_quad, cfg.angle_tol);
    c.entangling_fraction = base_gates > 0.0 ? static_cast<double>(c.entangling_gates) / base_gates : 0.0;
    c.connected = pruned_graph_connected(rec.params.theta_quad, cfg.angle_tol);

    const StateVector psi = iqp_state(rec.params, cfg.sv_cap);
    if (run.truth) c.ground_overlap = ground_overlap(psi, *run.truth);
    c.samples = shots > 0 ? sample(psi, shots, sample_seed) : SampleSet{{}, 0, sample_seed, run.problem.size()};
    c.best_energy = std::numeric_limits<double>::infinity();
    for (const auto& [bits, count] : c.samples.counts) {
        const double e = energy_of_bits(run.problem, bits);
        if (e < c.best_energy) {
            c.best_energy = e;
            c.best_bits = bits;
        }
    }
    if (run.truth && !c.samples.counts.empty()) {
        c.approximation_ratio = approximation_ratio(c.best_energy, *run.truth);
        c.ground_hit = std::any_of(c.samples.counts.begin(), c.samples.counts.end(),
                                   [&](const auto& kv) { return run.truth->is_ground(kv.first); });
    }
    return c;
}

json circuit_json(const CircuitResult& c, std::size_t n) {
    const bool sampled = !c.samples.counts.empty();
    return json{{"role", c.role},
                {"record", c.record},
                {"tau", c.tau},
                {"energy", c.energy},
                {"entangling_gates", c.entangling_gates},
                {"entangling_fraction", c.entangling_fraction},
                {"connected", c.connected},
                {"ground_overlap", optional_number(c.ground_overlap)},
                {"shots", c.samples.shots},
                {"sample_seed", c.samples.seed},
                {"distinct_outcomes", c.samples.counts.size()},
                {"best_energy", sampled ? json(c.best_energy) : json(nullptr)},
                {"best_bitstring", sampled ? json(bitstring(c.best_bits, n)) : json(nullptr)},
                {"approximation_ratio", optional_number(c.approximation_ratio)},
                {"ground_hit", c.ground_hit ? json(*c.ground_hit) : json(nullptr)}};
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double standard_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (v.size() - 1) / v.size());
}

}  // namespace

// --- configuration -------------------------------------------------------------

RunConfig run_config_from_json(const json& j, RunConfig base) {
    if (!j.is_object()) throw InputError("configuration must be a JSON object");
    if (j.contains("flow")) base.flow = flow_config_from_json(j.at("flow"), base.flow);
    if (j.contains("qaoa")) {
        const json& q = j.at("qaoa");
        base.qaoa.grid = q.value("grid", base.qaoa.grid);
        base.qaoa.max_iterations = q.value("max_iterations", base.qaoa.max_iterations);
        base.qaoa.grad_tol = q.value("grad_tol", base.qaoa.grad_tol);
    }
    if (j.contains("plateau")) {
        const json& p = j.at("plateau");
        base.plateau.slope_tol = p.value("slope_tol", base.plateau.slope_tol);
        base.plateau.min_fraction = p.value("min_fraction", base.plateau.min_fraction);
    }
    base.angle_tol = j.value("angle_tol", base.angle_tol);
    base.seed = j.value("seed", base.seed);
    base.sv_cap = j.value("sv_cap", base.sv_cap);
    base.brute_force_cap = j.value("brute_force_cap", base.brute_force_cap);
    base.thermal_cap = j.value("thermal_cap", base.thermal_cap);
    base.workers = j.value("workers", base.workers);
    if (j.contains("shots")) {
        base.shots = j.at("shots").is_null() ? std::nullopt : std::optional(j.at("shots").get<std::uint64_t>());
    }
    if (base.qaoa.grid < 1 || base.workers < 1 || !(base.angle_tol >= 0.0)) {
        throw InputError("configuration: qaoa.grid and workers must be >= 1, angle_tol >= 0");
    }
    return base;
}

json to_json(const RunConfig& cfg) {
    return json{{"flow", to_json(cfg.flow)},
                {"qaoa",
                 {{"grid", cfg.qaoa.grid}, {"max_iterations", cfg.qaoa.max_iterations}, {"grad_tol", cfg.qaoa.grad_tol}}},
                {"plateau", {{"slope_tol", cfg.plateau.slope_tol}, {"min_fraction", cfg.plateau.min_fraction}}},
                {"angle_tol", cfg.angle_tol},
                {"seed", cfg.seed},
                {"sv_cap", cfg.sv_cap},
                {"brute_force_cap", cfg.brute_force_cap},
                {"thermal_cap", cfg.thermal_cap},
                {"shots", cfg.shots ? json(*cfg.shots) : json(nullptr)},
                {"workers", cfg.workers}};
}

// --- single run -------------------------------------------------------------------

std::vector<std::uint64_t> split_shots(std::uint64_t total, std::size_t circuits) {
    if (circuits == 0) throw InputError("cannot split shots over zero circuits");
    std::vector<std::uint64_t> out(circuits, total / circuits);
    for (std::size_t c = 0; c < total % circuits; ++c) ++out[c];
    return out;
}

RunOutcome run_instance(const IsingProblem& problem, const RunConfig& cfg, std::string instance_file) {
    const auto t_start = Clock::now();
    const std::size_t n = problem.size();
    if (n == 0) throw InputError("empty instance");
    if (n > cfg.sv_cap) {
        throw ResourceLimitError("instance has " + std::to_string(n) + " spins, statevector cap is " +
                                 std::to_string(cfg.sv_cap));
    }
    RunOutcome run;
    run.instance_file = std::move(instance_file);
    run.problem = problem;
    run.biased = is_biased(problem);
    if (n <= cfg.brute_force_cap) run.truth = brute_force_ground(problem, cfg.brute_force_cap);

    auto t = Clock::now();
    run.warm_start = optimize_qaoa(problem, cfg.qaoa);
    run.timings.qaoa = seconds_since(t);

    t = Clock::now();
    const IqpParams start = embed_qaoa(problem, run.warm_start.params);
    run.mode = cfg.flow.mode;
    try {
        run.trajectory = flow(problem, start, cfg.flow);
    } catch (const IntegrationError& e) {
        run.trajectory = e.partial();
        run.integration_error = e.what();
    }
    run.timings.flow = seconds_since(t);

    t = Clock::now();
    std::vector<std::pair<std::size_t, std::string>> picks;
    if (run.biased) {
        run.selection_rule = "circuits";
        run.selection = select_circuits(run.trajectory, cfg.angle_tol);
        const char* roles[4] = {"warm_start", "intermediate", "intermediate", "last_connected"};
        for (std::size_t c = 0; c < 4; ++c) picks.emplace_back(run.selection->steps[c], roles[c]);
    } else {
        run.selection_rule = "plateau";
        picks.emplace_back(0, "warm_start");
        picks.emplace_back(detect_plateau(run.trajectory, cfg.plateau), "plateau");
    }
    const std::uint64_t budget = cfg.shots.value_or(shots_schedule(n));
    const auto shots = split_shots(budget, picks.size());
    const double base_gates =
        static_cast<double>(entangling_gate_count(run.trajectory.front().params.theta_quad, cfg.angle_tol));
    for (std::size_t c = 0; c < picks.size(); ++c) {
        const std::uint64_t seed = derive_seed(cfg.seed, problem.seed.value_or(0), c);
        run.circuits.push_back(
            evaluate_circuit(run, picks[c].first, picks[c].second, base_gates, shots[c], seed, cfg));
        const auto& r = run.circuits.back();
        if (r.approximation_ratio) {
            run.best_approximation_ratio = std::max(run.best_approximation_ratio.value_or(0.0), *r.approximation_ratio);
        }
        run.ground_hit = run.ground_hit || r.ground_hit.value_or(false);
    }
    run.timings.sampling = seconds_since(t);

    t = Clock::now();
    if (n <= cfg.thermal_cap) {
        const std::vector<double> energies = all_energies(problem, cfg.thermal_cap);
        const double norm = coupling_norm(problem);
        run.thermal_warm_start =
            fit_beta(energies, norm, iqp_state(run.trajectory.front().params, cfg.sv_cap).probabilities());
        run.thermal_final =
            fit_beta(energies, norm, iqp_state(run.trajectory.back().params, cfg.sv_cap).probabilities());
    }
    run.timings.thermal = seconds_since(t);
    run.timings.total = seconds_since(t_start);
    return run;
}

json report_json(const RunOutcome& run) {
    const std::size_t n = run.problem.size();
    const Trajectory& traj = run.trajectory;
    json report;
    report["instance"] = {{"file", run.instance_file},
                          {"seed", run.problem.seed ? json(*run.problem.seed) : json(nullptr)},
                          {"n", n},
                          {"biased", run.biased}};
    report["ground_truth"] = run.truth ? json{{"min_energy", run.truth->min_energy},
                                              {"max_energy", run.truth->max_energy},
                                              {"degeneracy", run.truth->degeneracy()}}
                                       : json(nullptr);
    std::optional<double> warm_overlap;
    if (!run.circuits.empty()) warm_overlap = run.circuits.front().ground_overlap;
    report["warm_start"] = {{"gamma", run.warm_start.params.gamma},
                            {"beta", run.warm_start.params.beta},
                            {"energy", run.warm_start.energy},
                            {"ground_overlap", optional_number(warm_overlap)}};
    report["trajectory"] = {{"mode", to_string(run.mode)},
                            {"termination", to_string(run.integration_error ? Termination::integration_failure
                                                                            : traj.termination)},
                            {"error", run.integration_error ? json(*run.integration_error) : json(nullptr)},
                            {"records", traj.size()},
                            {"accepted_steps", traj.accepted_steps},
                            {"rejected_steps", traj.rejected_steps},
                            {"initial_energy", traj.front().energy},
                            {"final_tau", traj.back().tau},
                            {"final_energy", traj.back().energy},
                            {"final_grad_norm", traj.back().grad_norm},
                            {"energy_non_increasing", energy_non_increasing(traj)}};
    json selection{{"rule", run.selection_rule}};
    selection["records"] = json::array();
    for (const auto& c : run.circuits) selection["records"].push_back(c.record);
    if (run.selection) {
        selection["degenerate"] = run.selection->degenerate;
        selection["entangling_fractions"] = run.selection->entangling_fraction;
    }
    report["selection"] = selection;
    report["shot_policy"] = "shared budget, equal split, remainder to earlier circuits";
    report["circuits"] = json::array();
    for (const auto& c : run.circuits) report["circuits"].push_back(circuit_json(c, n));
    report["best_approximation_ratio"] = optional_number(run.best_approximation_ratio);
    report["ground_hit"] = run.truth ? json(run.ground_hit) : json(nullptr);
    if (run.thermal_warm_start) {
        report["thermal"] = {{"orientation", "KL(ansatz || thermal)"},
                             {"warm_start", to_json(*run.thermal_warm_start)},
                             {"final", to_json(*run.thermal_final)}};
    } else {
        report["thermal"] = nullptr;
    }
    report["timings"] = {{"qaoa_s", run.timings.qaoa},
                         {"flow_s", run.timings.flow},
                         {"sampling_s", run.timings.sampling},
                         {"thermal_s", run.timings.thermal},
                         {"total_s", run.timings.total}};
    return report;
}

// --- instance generation ------------------------------------------------------------

std::vector<fs::path> generate_instances(const GenOptions& options, const fs::path& out_dir) {
    if (options.n_min < 2 || options.n_max < options.n_min || options.count == 0) {
        throw InputError("gen needs 2 <= n_min <= n_max and count >= 1");
    }
    fs::create_directories(out_dir);
    std::vector<fs::path> files;
    json listing = json::array();
    for (std::size_t n = options.n_min; n <= options.n_max; ++n) {
        for (std::size_t k = 0; k < options.count; ++k) {
            const std::uint64_t seed = derive_seed(options.seed, n, k);
            std::ostringstream name;
            name << "sk_n" << n << '_' << std::setw(3) << std::setfill('0') << k << ".json";
            const fs::path path = out_dir / name.str();
            write_json_file(path, to_json(sk_random(n, seed, options.biased)));
            files.push_back(path);
            listing.push_back(json{{"file", name.str()}, {"n", n}, {"index", k}, {"seed", seed}});
        }
    }
    write_json_file(out_dir / "manifest.json", json{{"seed", options.seed},
                                                    {"biased", options.biased},
                                                    {"n_min", options.n_min},
                                                    {"n_max", options.n_max},
                                                    {"count", options.count},
                                                    {"instances", listing}});
    return files;
}

std::vector<fs::path> read_manifest(const fs::path& manifest) {
    const json j = read_json_file(manifest);
    if (!j.contains("instances") || !j.at("instances").is_array()) {
        throw InputError(manifest.string() + ": manifest lacks an 'instances' array");
    }
    std::vector<fs::path> files;
    for (const auto& entry : j.at("instances")) files.push_back(manifest.parent_path() / entry.at("file").get<std::string>());
    return files;
}

// --- scaling --------------------------------------------------------------------------

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("fit_line: x and y differ in length");
    const std::size_t m = x.size();
    if (m < 2) throw InputError("fit_line needs at least two points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InputError("fit_line needs at least two distinct x values");
    LinearFit fit;
    fit.points = m;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (m > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        const double s2 = ssr / static_cast<double>(m - 2);
        fit.slope_se = std::sqrt(s2 / sxx);
        fit.intercept_se = std::sqrt(s2 * (1.0 / m + mx * mx / sxx));
    }
    return fit;
}

ScalingSample scaling_sample(const IsingProblem& problem, const RunConfig& cfg, std::string file) {
    const GroundTruth truth = brute_force_ground(problem, cfg.brute_force_cap);
    const QaoaResult warm = optimize_qaoa(problem, cfg.qaoa);
    const IqpParams start = embed_qaoa(problem, warm.params);
    const Trajectory traj = flow(problem, start, cfg.flow);
    ScalingSample s;
    s.file = std::move(file);
    s.n = problem.size();
    s.record = is_biased(problem) ? select_circuits(traj, cfg.angle_tol).steps[3] : detect_plateau(traj, cfg.plateau);
    s.tau = traj.records[s.record].tau;
    s.termination = traj.termination;
    s.p_qaoa = ground_overlap(iqp_state(start, cfg.sv_cap), truth);
    s.p_iqp = ground_overlap(iqp_state(traj.records[s.record].params, cfg.sv_cap), truth);
    return s;
}

ScalingSummary summarize_scaling(std::vector<ScalingSample> samples,
                                 std::vector<std::pair<std::string, std::string>> exclusions) {
    std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_n;
    for (const auto& s : samples) {
        by_n[s.n].first.push_back(s.p_qaoa);
        by_n[s.n].second.push_back(s.p_iqp);
    }
    if (by_n.size() < 4) {
        throw InputError("scaling fit needs at least 4 distinct sizes, got " + std::to_string(by_n.size()));
    }
    ScalingSummary out;
    std::vector<double> xs, y_iqp, y_ratio;
    for (const auto& [n, v] : by_n) {
        ScalingRow row;
        row.n = n;
        row.count = v.first.size();
        row.mean_qaoa = mean_of(v.first);
        row.se_qaoa = standard_error(v.first);
        row.mean_iqp = mean_of(v.second);
        row.se_iqp = standard_error(v.second);
        if (!(row.mean_iqp > 0.0) || !(row.mean_qaoa > 0.0)) {
            throw InputError("mean ground overlap is zero at N = " + std::to_string(n));
        }
        out.rows.push_back(row);
        xs.push_back(static_cast<double>(n));
        y_iqp.push_back(std::log2(row.mean_iqp));
        y_ratio.push_back(std::log2(row.mean_iqp / row.mean_qaoa));
    }
    out.iqp_fit = fit_line(xs, y_iqp);
    out.ratio_fit = fit_line(xs, y_ratio);
    out.alpha = -out.iqp_fit.slope;
    out.alpha_se = out.iqp_fit.slope_se;
    out.delta = out.ratio_fit.slope;
    out.delta_se = out.ratio_fit.slope_se;
    out.improved = static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const ScalingSample& s) { return s.p_iqp >= s.p_qaoa; }));
    out.samples = std::move(samples);
    out.exclusions = std::move(exclusions);
    return out;
}

ScalingSummary run_scaling(const std::vector<fs::path>& files, const RunConfig& cfg, const Logger& log) {
    std::vector<std::optional<ScalingSample>> results(files.size());
    std::vector<std::string> failures(files.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    const auto worker = [&] {
        for (std::size_t k = next++; k < files.size(); k = next++) {
            try {
                const IsingProblem problem = problem_from_json(read_json_file(files[k]));
                results[k] = scaling_sample(problem, cfg, files[k].filename().string());
            } catch (const std::exception& e) {
                failures[k] = e.what();
                const std::lock_guard lock(log_mutex);
                emit(log, "excluded " + files[k].string() + ": " + e.what());
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.workers, files.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    // Merge in manifest order so the summary does not depend on scheduling.
    std::vector<ScalingSample> samples;
    std::vector<std::pair<std::string, std::string>> exclusions;
    for (std::size_t k = 0; k < files.size(); ++k) {
        if (results[k]) {
            samples.push_back(std::move(*results[k]));
        } else {
            exclusions.emplace_back(files[k].filename().string(), failures[k]);
        }
    }
    return summarize_scaling(std::move(samples), std::move(exclusions));
}

json to_json(const ScalingSummary& s) {
    json rows = json::array();
    for (const auto& r : s.rows) {
        rows.push_back(json{{"n", r.n},
                            {"count", r.count},
                            {"mean_p_qaoa", r.mean_qaoa},
                            {"se_p_qaoa", r.se_qaoa},
                            {"mean_p_iqp", r.mean_iqp},
                            {"se_p_iqp", r.se_iqp},
                            {"ratio", r.mean_iqp / r.mean_qaoa}});
    }
    json samples = json::array();
    for (const auto& x : s.samples) {
        samples.push_back(json{{"file", x.file},
                               {"n", x.n},
                               {"p_qaoa", x.p_qaoa},
                               {"p_iqp", x.p_iqp},
                               {"record", x.record},
                               {"tau", x.tau},
                               {"termination", to_string(x.termination)}});
    }
    json excluded = json::array();
    for (const auto& [file, reason] : s.exclusions) excluded.push_back(json{{"file", file}, {"reason", reason}});
    const auto fit_json = [](const LinearFit& f) {
        return json{{"slope", f.slope},
                    {"slope_se", f.slope_se},
                    {"intercept", f.intercept},
                    {"intercept_se", f.intercept_se},
                    {"points", f.points}};
    };
    return json{{"alpha", s.alpha},
                {"alpha_se", s.alpha_se},
                {"delta", s.delta},
                {"delta_se", s.delta_se},
                {"fit_log2_p_iqp", fit_json(s.iqp_fit)},
                {"fit_log2_ratio", fit_json(s.ratio_fit)},
                {"instances", s.samples.size()},
                {"improved", s.improved},
                {"rows", rows},
                {"samples", samples},
                {"exclusions", excluded}};
}

void write_scaling_csv(std::ostream& out, const ScalingSummary& s) {
    out << "n,count,mean_p_qaoa,se_p_qaoa,mean_p_iqp,se_p_iqp,ratio\n" << std::setprecision(17);
    for (const auto& r : s.rows) {
        out << r.n << ',' << r.count << ',' << r.mean_qaoa << ',' << r.se_qaoa << ',' << r.mean_iqp << ','
            << r.se_iqp << ',' << r.mean_iqp / r.mean_qaoa << '\n';
    }
}

// --- counterexample and temperatures -------------------------------------------------

std::vector<double> default_theta2_samples() {
    std::vector<double> out;
    for (int k = 0; k <= 14; ++k) {
        const double t = 0.1 * k;
        if (std::abs(std::remainder(t - std::numbers::pi / 2, 2 * std::numbers::pi)) >= 0.05) out.push_back(t);
    }
    return out;
}

json to_json(const CounterexampleReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks) {
        checks.push_back(json{{"theta2", c.theta2},
                              {"angles", c.angles},
                              {"energy", c.energy},
                              {"grad_norm", c.grad_norm},
                              {"hessian_eigenvalues", c.hessian_eigenvalues},
                              {"null_modes", c.null_modes},
                              {"ground_overlap", c.ground_overlap},
                              {"gradient_ok", c.gradient_ok},
                              {"energy_ok", c.energy_ok},
                              {"hessian_ok", c.hessian_ok},
                              {"overlap_ok", c.overlap_ok},
                              {"failures", c.failures()}});
    }
    const CounterexampleTolerances tol;
    return json{{"hamiltonian", "Z0 (Z1 + Z2 + Z3)"},
                {"tolerances",
                 {{"gradient", tol.gradient}, {"energy", tol.energy}, {"eigenvalue", tol.eigenvalue}, {"overlap", tol.overlap}}},
                {"passed", report.passed()},
                {"checks", checks}};
}

TemperatureComparison compare_temperatures(const IsingProblem& problem, const IqpParams& params,
                                           const RunConfig& cfg) {
    if (params.size() != problem.size()) throw DimensionError("parameter file does not match the instance size");
    const std::size_t n = problem.size();
    if (n > cfg.thermal_cap) {
        throw ResourceLimitError("thermal fit over " + std::to_string(n) + " spins exceeds cap " +
                                 std::to_string(cfg.thermal_cap));
    }
    TemperatureComparison out;
    out.warm_start = optimize_qaoa(problem, cfg.qaoa);
    const std::vector<double> energies = all_energies(problem, cfg.thermal_cap);
    const double norm = coupling_norm(problem);
    const StateVector warm = iqp_state(embed_qaoa(problem, out.warm_start.params), cfg.sv_cap);
    const StateVector final_state = iqp_state(params, cfg.sv_cap);
    out.params_energy = energy(problem, params);
    out.warm_fit = fit_beta(energies, norm, warm.probabilities());
    out.params_fit = fit_beta(energies, norm, final_state.probabilities());
    out.warm_distribution = energy_distribution(warm, problem);
    out.params_distribution = energy_distribution(final_state, problem);
    return out;
}

json to_json(const TemperatureComparison& cmp) {
    const auto table = [](const std::vector<EnergyLevel>& levels) {
        json t = json::array();
        for (const auto& l : levels) t.push_back(json{{"energy", l.energy}, {"probability", l.probability}});
        return t;
    };
    return json{{"orientation", "KL(ansatz || thermal)"},
                {"warm_start",
                 {{"gamma", cmp.warm_start.params.gamma},
                  {"beta", cmp.warm_start.params.beta},
                  {"energy", cmp.warm_start.energy},
                  {"fit", to_json(cmp.warm_fit)},
                  {"energy_distribution", table(cmp.warm_distribution)}}},
                {"params",
                 {{"energy", cmp.params_energy},
                  {"fit", to_json(cmp.params_fit)},
                  {"energy_distribution", table(cmp.params_distribution)}}}};
}

// --- commands ---------------------------------------------------------------------------

int cmd_gen(const GenOptions& options, const fs::path& out_dir, const Logger& log) {
    return guarded(log, [&] {
        const auto files = generate_instances(options, out_dir);
        emit(log, "wrote " + std::to_string(files.size()) + " instances and " + (out_dir / "manifest.json").string());
        return exit_code::ok;
    });
}

int cmd_run(const fs::path& instance, const RunConfig& cfg, const fs::path& out,
            const std::optional<fs::path>& trajectory_out, const std::optional<fs::path>& samples_dir,
            const Logger& log) {
    return guarded(log, [&] {
        const IsingProblem problem = problem_from_json(read_json_file(instance));
        const RunOutcome run = run_instance(problem, cfg, instance.filename().string());
        json report = report_json(run);
        report["config"] = to_json(cfg);
        write_json_file(out, report);
        if (trajectory_out) write_trajectory(*trajectory_out, run.trajectory);
        if (samples_dir) {
            fs::create_directories(*samples_dir);
            for (std::size_t c = 0; c < run.circuits.size(); ++c) {
                std::ofstream csv(*samples_dir / ("circuit_" + std::to_string(c) + ".csv"));
                write_samples_csv(csv, run.circuits[c].samples, problem, run.truth ? &*run.truth : nullptr);
            }
        }
        if (run.integration_error) emit(log, "integration failure: " + *run.integration_error);
        return run.exit_code();
    });
}

int cmd_scaling(const fs::path& manifest, const RunConfig& cfg, const fs::path& out, const Logger& log) {
    return guarded(log, [&] {
        const ScalingSummary s = run_scaling(read_manifest(manifest), cfg, log);
        write_json_file(out, to_json(s));
        fs::path csv_path = out;
        csv_path.replace_extension(".csv");
        std::ofstream csv(csv_path);
        write_scaling_csv(csv, s);
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        std::ostringstream msg;
        msg << "alpha = " << s.alpha << " +- " << s.alpha_se << ", delta = " << s.delta << " +- " << s.delta_se
            << " over " << s.samples.size() << " instances (" << s.exclusions.size() << " excluded)";
        emit(log, msg.str());
        return exit_code::ok;
    });
}

int cmd_counterexample(const fs::path& out, const std::optional<fs::path>& points, const Logger& log) {
    return guarded(log, [&] {
        CounterexampleReport report;
        if (!points) {
            report = verify_counterexample(default_theta2_samples());
        } else {
            const json j = read_json_file(*points);
            if (j.contains("theta2")) {
                report = verify_counterexample(j.at("theta2").get<std::vector<double>>());
            } else if (j.contains("points")) {
                std::vector<XBasisAngles> pts;
                for (const auto& p : j.at("points")) {
                    const auto v = p.get<std::vector<double>>();
                    if (v.size() != 10) throw InputError("each point needs 10 angles");
                    XBasisAngles a;
                    std::copy(v.begin(), v.end(), a.begin());
                    pts.push_back(a);
                }
                report = verify_counterexample_points(pts);
            } else {
                throw InputError(points->string() + ": expected a 'theta2' or 'points' array");
            }
        }
        write_json_file(out, to_json(report));
        for (const auto& c : report.checks) {
            for (const auto& f : c.failures()) emit(log, "check " + f + " failed at theta2 = " + std::to_string(c.theta2));
        }
        return report.passed() ? exit_code::ok : exit_code::verification;
    });
}

int cmd_fit_temp(const fs::path& instance, const fs::path& params, const RunConfig& cfg, const fs::path& out,
                 const Logger& log) {
    return guarded(log, [&] {
        const IsingProblem problem = problem_from_json(read_json_file(instance));
        const IqpParams p = params_from_json(read_json_file(params));
        const TemperatureComparison cmp = compare_temperatures(problem, p, cfg);
        write_json_file(out, to_json(cmp));
        fs::path csv_path = out;
        csv_path.replace_extension(".csv");
        std::ofstream csv(csv_path);
        csv << "state,energy,probability\n" << std::setprecision(17);
        for (const auto& l : cmp.warm_distribution) csv << "warm_start," << l.energy << ',' << l.probability << '\n';
        for (const auto& l : cmp.params_distribution) csv << "params," << l.energy << ',' << l.probability << '\n';
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        return exit_code::ok;
    });
}

}  // namespace iqp
