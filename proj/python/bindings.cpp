#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "iqpflow/pipeline.hpp"

namespace py = pybind11;
using namespace iqp;

namespace {

IsingProblem make_problem(const std::vector<double>& h, const std::vector<std::tuple<std::size_t, std::size_t, double>>& J) {
    PairTable table(h.size());
    for (const auto& [i, j, v] : J) table.at(i, j) = v;
    return IsingProblem(h, table);
}

py::array_t<std::complex<double>> amplitudes(const StateVector& s) {
    return py::array_t<std::complex<double>>(static_cast<py::ssize_t>(s.amplitudes().size()), s.amplitudes().data());
}

std::vector<std::tuple<std::size_t, std::size_t, double>> pair_list(const PairTable& t) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = i + 1; j < t.size(); ++j) out.emplace_back(i, j, t(i, j));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "IQP circuits warm-started from QAOA: closed-form energies, flows and sampling.";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_MemoryError);

    py::class_<IsingProblem>(m, "IsingProblem")
        .def(py::init(&make_problem), py::arg("h"), py::arg("J"),
             "Fields h and couplings as (i, j, value) triples with i < j.")
        .def_property_readonly("n", &IsingProblem::size)
        .def_property_readonly("h", &IsingProblem::fields)
        .def_property_readonly("J", [](const IsingProblem& p) { return pair_list(p.couplings()); })
        .def_property_readonly("seed", [](const IsingProblem& p) { return p.seed; })
        .def("coupling", &IsingProblem::coupling)
        .def("energy", [](const IsingProblem& p, const Spins& x) { return energy(p, x); })
        .def("to_json", [](const IsingProblem& p) { return to_json(p).dump(); })
        .def_static("from_json", [](const std::string& s) { return problem_from_json(json::parse(s)); });

    py::class_<IqpParams>(m, "IqpParams")
        .def(py::init<std::size_t>(), py::arg("n"))
        .def_readwrite("phi", &IqpParams::phi)
        .def_readwrite("theta_lin", &IqpParams::theta_lin)
        .def_property(
            "theta_quad", [](const IqpParams& p) { return pair_list(p.theta_quad); },
            [](IqpParams& p, const std::vector<std::tuple<std::size_t, std::size_t, double>>& v) {
                PairTable t(p.size());
                for (const auto& [i, j, x] : v) t.at(i, j) = x;
                p.theta_quad = t;
            })
        .def_property_readonly("n", &IqpParams::size)
        .def("flatten", &IqpParams::flatten)
        .def_static("unflatten",
                    [](std::size_t n, const std::vector<double>& v) { return IqpParams::unflatten(n, v); })
        .def("to_json", [](const IqpParams& p) { return to_json(p).dump(); })
        .def_static("from_json", [](const std::string& s) { return params_from_json(json::parse(s)); });

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_readonly("min_energy", &GroundTruth::min_energy)
        .def_readonly("max_energy", &GroundTruth::max_energy)
        .def_readonly("ground_states", &GroundTruth::ground_states);

    py::class_<QaoaParams>(m, "QaoaParams")
        .def(py::init<double, double>(), py::arg("gamma"), py::arg("beta"))
        .def_readwrite("gamma", &QaoaParams::gamma)
        .def_readwrite("beta", &QaoaParams::beta);

    py::class_<ThermalFit>(m, "ThermalFit")
        .def_readonly("beta_eff", &ThermalFit::beta_eff)
        .def_readonly("beta_normalized", &ThermalFit::beta_normalized)
        .def_readonly("kl", &ThermalFit::kl)
        .def_readonly("bracket_hit_max", &ThermalFit::bracket_hit_max);

    m.def("sk_random", &sk_random, py::arg("n"), py::arg("seed"), py::arg("biased") = false);
    m.def("brute_force_ground", &brute_force_ground, py::arg("problem"), py::arg("cap") = kDefaultBruteForceCap);
    m.def("energy", py::overload_cast<const IsingProblem&, const IqpParams&>(&energy));
    m.def("energy_and_gradient", [](const IsingProblem& p, const IqpParams& q) {
        auto eg = energy_and_gradient(p, q);
        return py::make_tuple(eg.energy, eg.gradient);
    });
    m.def("gram", &gram);
    m.def("embed_qaoa", &embed_qaoa);
    m.def("optimize_qaoa", [](const IsingProblem& p, int grid) {
        const auto r = optimize_qaoa(p, {.grid = grid});
        return py::make_tuple(r.params, r.energy);
    }, py::arg("problem"), py::arg("grid") = 8);
    m.def("iqp_state", [](const IqpParams& p, std::size_t cap) { return amplitudes(iqp_state(p, cap)); },
          py::arg("params"), py::arg("cap") = kDefaultStateVectorCap);
    m.def("qaoa_state", [](const IsingProblem& p, double g, double b) { return amplitudes(qaoa_state(p, g, b)); });
    m.def("ground_overlap", [](const IqpParams& p, const GroundTruth& t) { return ground_overlap(iqp_state(p), t); });
    m.def("sample", [](const IqpParams& p, std::uint64_t shots, std::uint64_t seed) {
        return sample(iqp_state(p), shots, seed).counts;
    });
    m.def("boltzmann", py::overload_cast<const IsingProblem&, double, std::size_t>(&boltzmann), py::arg("problem"),
          py::arg("beta"), py::arg("cap") = kDefaultBruteForceCap);
    m.def("fit_beta", [](const IsingProblem& p, const std::vector<double>& probs) { return fit_beta(p, probs); });
    m.def("shots_schedule", &shots_schedule);

    m.def("flow", [](const IsingProblem& p, const IqpParams& start, const std::string& config) {
        const Trajectory t = flow(p, start, flow_config_from_json(json::parse(config)));
        py::list records;
        for (const auto& r : t.records) {
            py::dict d;
            d["tau"] = r.tau;
            d["energy"] = r.energy;
            d["grad_norm"] = r.grad_norm;
            d["gram_condition"] = r.gram_condition;
            d["params"] = r.params;
            records.append(d);
        }
        return py::make_tuple(records, to_string(t.termination));
    }, py::arg("problem"), py::arg("start"), py::arg("config") = "{}",
       "Returns (records, termination). config is a FlowConfig JSON string.");

    m.def("run_report", [](const IsingProblem& p, const std::string& config) {
        return report_json(run_instance(p, run_config_from_json(json::parse(config)))).dump();
    }, py::arg("problem"), py::arg("config") = "{}", "Full pipeline; returns the report as a JSON string.");

    m.def("counterexample_report", [](const std::vector<double>& theta2) {
        return to_json(verify_counterexample(theta2)).dump();
    }, py::arg("theta2") = default_theta2_samples());
}
