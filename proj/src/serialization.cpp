#include "iqpflow/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace iqp {

namespace {

std::size_t read_size(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
        throw InputError(std::string("missing or invalid '") + key + "'");
    }
    return j.at(key).get<std::size_t>();
}

std::vector<double> read_vector(const json& j, const char* key, std::size_t n) {
    if (!j.contains(key) || !j.at(key).is_array()) throw InputError(std::string("missing array '") + key + "'");
    auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != n) {
        throw InputError(std::string("'") + key + "' has " + std::to_string(v.size()) + " entries, expected " +
                         std::to_string(n));
    }
    return v;
}

PairTable read_pairs(const json& j, const char* key, std::size_t n) {
    PairTable table(n);
    if (!j.contains(key)) return table;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& entry : j.at(key)) {
        if (!entry.is_array() || entry.size() != 3) {
            throw InputError(std::string("'") + key + "' entries must be [i, j, value]");
        }
        const auto i = entry[0].get<std::size_t>();
        const auto k = entry[1].get<std::size_t>();
        if (!(i < k && k < n)) {
            throw InputError(std::string("'") + key + "' entry (" + std::to_string(i) + ", " + std::to_string(k) +
                             ") violates 0 <= i < j < n");
        }
        if (!seen.emplace(i, k).second) {
            throw InputError(std::string("duplicate pair in '") + key + "'");
        }
        table.at(i, k) = entry[2].get<double>();
    }
    return table;
}

json write_pairs(const PairTable& table, bool skip_zero) {
    json out = json::array();
    std::size_t k = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = i + 1; j < table.size(); ++j, ++k) {
            const double v = table.values()[k];
            if (skip_zero && v == 0.0) continue;
            out.push_back(json::array({i, j, v}));
        }
    }
    return out;
}

}  // namespace

json to_json(const IsingProblem& problem) {
    json j;
    j["n"] = problem.size();
    j["h"] = problem.fields();
    j["J"] = write_pairs(problem.couplings(), true);
    j["seed"] = problem.seed ? json(*problem.seed) : json(nullptr);
    j["biased"] = problem.biased;
    return j;
}

IsingProblem problem_from_json(const json& j) {
    const std::size_t n = read_size(j, "n");
    IsingProblem problem(read_vector(j, "h", n), read_pairs(j, "J", n));
    if (j.contains("seed") && !j.at("seed").is_null()) problem.seed = j.at("seed").get<std::uint64_t>();
    problem.biased = j.value("biased", !problem.unbiased());
    return problem;
}

json to_json(const IqpParams& params) {
    json j;
    j["n"] = params.size();
    j["phi"] = params.phi;
    j["theta_lin"] = params.theta_lin;
    j["theta_quad"] = write_pairs(params.theta_quad, false);
    return j;
}

IqpParams params_from_json(const json& j) {
    const std::size_t n = read_size(j, "n");
    IqpParams p(n);
    p.phi = read_vector(j, "phi", n);
    p.theta_lin = read_vector(j, "theta_lin", n);
    p.theta_quad = read_pairs(j, "theta_quad", n);
    p.validate();
    return p;
}

json to_json(const FlowConfig& cfg) {
    return json{{"mode", to_string(cfg.mode)},
                {"tau_max", cfg.tau_max},
                {"rtol", cfg.rtol},
                {"atol", cfg.atol},
                {"grad_tol", cfg.grad_tol},
                {"gram_regularization", cfg.gram_regularization},
                {"gram_condition_max", cfg.gram_condition_max},
                {"record_stride", cfg.record_stride},
                {"min_step", cfg.min_step},
                {"max_steps", cfg.max_steps}};
}

FlowConfig flow_config_from_json(const json& j, FlowConfig base) {
    if (j.contains("mode")) base.mode = flow_mode_from_string(j.at("mode").get<std::string>());
    base.tau_max = j.value("tau_max", base.tau_max);
    base.rtol = j.value("rtol", base.rtol);
    base.atol = j.value("atol", base.atol);
    base.grad_tol = j.value("grad_tol", base.grad_tol);
    base.gram_regularization = j.value("gram_regularization", base.gram_regularization);
    base.gram_condition_max = j.value("gram_condition_max", base.gram_condition_max);
    base.record_stride = j.value("record_stride", base.record_stride);
    base.min_step = j.value("min_step", base.min_step);
    base.max_steps = j.value("max_steps", base.max_steps);
    base.validate();
    return base;
}

json to_json(const ThermalFit& fit) {
    return json{{"beta_eff", fit.beta_eff},
                {"beta_normalized", fit.beta_normalized},
                {"kl", fit.kl},
                {"bracket_hit_max", fit.bracket_hit_max}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string bitstring(std::uint64_t bits, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) {
        if ((bits >> i) & 1U) s[i] = '1';
    }
    return s;
}

std::uint64_t bits_from_bitstring(const std::string& s) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            bits |= std::uint64_t{1} << i;
        } else if (s[i] != '0') {
            throw InputError("bitstrings contain only '0' and '1'");
        }
    }
    return bits;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    namespace fs = std::filesystem;
    const fs::path dir_name = path.stem().string() + "_params";
    const fs::path snapshot_dir = path.parent_path() / dir_name;
    fs::create_directories(snapshot_dir);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& r = traj.records[k];
        std::ostringstream name;
        name << "step_" << std::setw(6) << std::setfill('0') << k << ".json";
        write_json_file(snapshot_dir / name.str(), to_json(r.params));
        json line{{"index", k},
                  {"tau", r.tau},
                  {"energy", r.energy},
                  {"grad_norm", r.grad_norm},
                  {"gram_condition", r.gram_condition ? json(*r.gram_condition) : json(nullptr)},
                  {"step_accepted", r.step_accepted},
                  {"params_file", (dir_name / name.str()).generic_string()}};
        if (k + 1 == traj.size()) line["termination"] = to_string(traj.termination);
        out << line.dump() << '\n';
    }
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    Trajectory traj;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        TrajectoryRecord r;
        r.tau = j.at("tau").get<double>();
        r.energy = j.at("energy").get<double>();
        r.grad_norm = j.at("grad_norm").get<double>();
        if (!j.at("gram_condition").is_null()) r.gram_condition = j.at("gram_condition").get<double>();
        r.step_accepted = j.value("step_accepted", true);
        r.params = params_from_json(read_json_file(path.parent_path() / j.at("params_file").get<std::string>()));
        if (j.contains("termination")) traj.termination = termination_from_string(j.at("termination"));
        traj.records.push_back(std::move(r));
    }
    return traj;
}

void write_samples_csv(std::ostream& out, const SampleSet& samples, const IsingProblem& problem,
                       const GroundTruth* truth) {
    out << "bitstring,count,energy,is_ground\n";
    out << std::setprecision(17);
    for (const auto& [bits, count] : samples.counts) {
        out << bitstring(bits, samples.n) << ',' << count << ',' << energy_of_bits(problem, bits) << ',';
        if (truth) out << (truth->is_ground(bits) ? "true" : "false");
        out << '\n';
    }
}

void write_statevector(const std::filesystem::path& path, const StateVector& state) {
    static_assert(std::endian::native == std::endian::little, "statevector dumps assume a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& a : state.amplitudes()) {
        const double pair[2] = {a.real(), a.imag()};
        out.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
}

StateVector read_statevector(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw InputError("cannot open " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    const std::size_t count = bytes / (2 * sizeof(double));
    if (count == 0 || bytes % (2 * sizeof(double)) != 0 || !std::has_single_bit(count)) {
        throw InputError(path.string() + " is not a statevector dump");
    }
    in.seekg(0);
    std::vector<std::complex<double>> amps(count);
    for (auto& a : amps) {
        double pair[2];
        in.read(reinterpret_cast<char*>(pair), sizeof pair);
        a = {pair[0], pair[1]};
    }
    return StateVector(static_cast<std::size_t>(std::countr_zero(count)), std::move(amps));
}

}  // namespace iqp
