// iqpflow: instance generation, training runs, scaling studies, the four-qubit
// local-minimum check and thermal fits.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "iqpflow/pipeline.hpp"

namespace {

struct FlowFlags {
    std::optional<std::string> mode;
    std::optional<double> tau_max, rtol, atol, grad_tol, gram_reg, gram_cond_max, record_stride;

    void add_to(CLI::App* app) {
        app->add_option("--mode", mode, "plain_gradient or varqite")
            ->check(CLI::IsMember({"plain_gradient", "varqite"}));
        app->add_option("--tau-max", tau_max, "flow end time");
        app->add_option("--rtol", rtol, "relative step tolerance");
        app->add_option("--atol", atol, "absolute step tolerance");
        app->add_option("--grad-tol", grad_tol, "stop once |grad E| falls below this");
        app->add_option("--gram-reg", gram_reg, "Tikhonov shift added to the Gram matrix");
        app->add_option("--gram-cond-max", gram_cond_max, "stop when cond(A + reg I) exceeds this");
        app->add_option("--record-stride", record_stride, "tau spacing of trajectory records");
    }

    void apply(iqp::FlowConfig& f) const {
        if (mode) f.mode = iqp::flow_mode_from_string(*mode);
        if (tau_max) f.tau_max = *tau_max;
        if (rtol) f.rtol = *rtol;
        if (atol) f.atol = *atol;
        if (grad_tol) f.grad_tol = *grad_tol;
        if (gram_reg) f.gram_regularization = *gram_reg;
        if (gram_cond_max) f.gram_condition_max = *gram_cond_max;
        if (record_stride) f.record_stride = *record_stride;
        f.validate();
    }
};

void log_line(const std::string& s) { std::cerr << s << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IQP warm-start training, sampling and analysis"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers, sv_cap;
    std::string out;
    std::string config_path;
    app.add_option("--seed", seed, "master seed for generation and sampling");
    app.add_option("--workers", workers, "worker threads for multi-instance commands");
    app.add_option("--sv-cap", sv_cap, "largest qubit count for dense statevectors");
    app.add_option("--out", out, "output file (directory for gen)");
    app.add_option("--config", config_path, "JSON configuration; flags override its values")
        ->check(CLI::ExistingFile);

    auto* gen = app.add_subcommand("gen", "generate SK instances and a manifest");
    std::size_t n_min = 7, n_max = 14, count = 1;
    bool biased = false;
    gen->add_option("--n-min", n_min, "smallest instance size")->capture_default_str();
    gen->add_option("--n-max", n_max, "largest instance size")->capture_default_str();
    gen->add_option("--count", count, "instances per size")->capture_default_str();
    gen->add_flag("--biased", biased, "draw Gaussian local fields as well");

    auto* run = app.add_subcommand("run", "warm start, flow, circuit selection, sampling and thermal fits");
    std::string instance;
    std::string trajectory_out, samples_dir;
    std::optional<std::uint64_t> shots;
    FlowFlags run_flow;
    run->add_option("instance", instance, "instance JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--trajectory", trajectory_out, "write the trajectory as JSON lines");
    run->add_option("--samples-dir", samples_dir, "write per-circuit sample CSVs here");
    run->add_option("--shots", shots, "total shot budget (default: schedule in N)");
    run_flow.add_to(run);

    auto* scaling = app.add_subcommand("scaling", "exact ground-overlap scaling study over a manifest");
    std::string manifest;
    FlowFlags scaling_flow;
    scaling->add_option("manifest", manifest, "manifest.json from gen")->required()->check(CLI::ExistingFile);
    scaling_flow.add_to(scaling);

    auto* cx = app.add_subcommand("counterexample", "verify the four-qubit local minimum line");
    std::string points;
    cx->add_option("--points", points, "JSON with a 'theta2' or 'points' array")->check(CLI::ExistingFile);

    auto* fit = app.add_subcommand("fit-temp", "effective temperatures of the warm start and a parameter file");
    std::string params_path;
    fit->add_option("instance", instance, "instance JSON")->required()->check(CLI::ExistingFile);
    fit->add_option("params", params_path, "parameter JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? iqp::exit_code::ok : iqp::exit_code::resource;
    }

    iqp::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = iqp::run_config_from_json(iqp::read_json_file(config_path));
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        if (sv_cap) cfg.sv_cap = *sv_cap;
        if (shots) cfg.shots = *shots;
        if (*run) run_flow.apply(cfg.flow);
        if (*scaling) scaling_flow.apply(cfg.flow);
    } catch (const std::exception& e) {
        log_line(std::string("error: ") + e.what());
        return iqp::exit_code::resource;
    }

    const auto need_out = [&](const char* fallback) { return out.empty() ? std::string(fallback) : out; };

    if (*gen) {
        iqp::GenOptions g{n_min, n_max, count, cfg.seed, biased};
        return iqp::cmd_gen(g, need_out("instances"), log_line);
    }
    if (*run) {
        std::optional<std::filesystem::path> traj, samples;
        if (!trajectory_out.empty()) traj = trajectory_out;
        if (!samples_dir.empty()) samples = samples_dir;
        return iqp::cmd_run(instance, cfg, need_out("report.json"), traj, samples, log_line);
    }
    if (*scaling) return iqp::cmd_scaling(manifest, cfg, need_out("scaling.json"), log_line);
    if (*cx) {
        std::optional<std::filesystem::path> pts;
        if (!points.empty()) pts = points;
        return iqp::cmd_counterexample(need_out("counterexample.json"), pts, log_line);
    }
    if (*fit) return iqp::cmd_fit_temp(instance, params_path, cfg, need_out("fit_temp.json"), log_line);
    return iqp::exit_code::resource;
}
