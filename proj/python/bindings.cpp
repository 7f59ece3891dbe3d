#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmdplab/algorithms.hpp"
#include "cmdplab/env.hpp"
#include "cmdplab/estimator.hpp"
#include "cmdplab/harness.hpp"
#include "cmdplab/oracle.hpp"

namespace py = pybind11;
using namespace cmdplab;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tabular CMDP primal-dual learning laboratory";

    py::register_exception<InfeasibleError>(m, "InfeasibleError");
    py::register_exception<DegenerateEntropyError>(m, "DegenerateEntropyError");

    py::class_<TabularCmdp>(m, "TabularCmdp")
        .def_readonly("num_states", &TabularCmdp::num_states)
        .def_readonly("num_actions", &TabularCmdp::num_actions)
        .def_readonly("horizon", &TabularCmdp::horizon)
        .def_readonly("num_constraints", &TabularCmdp::num_constraints)
        .def_readonly("initial_state", &TabularCmdp::initial_state)
        .def_readonly("thresholds", &TabularCmdp::thresholds)
        .def("to_json", &cmdp_to_json)
        .def_static("from_json", &cmdp_from_json);

    py::class_<Policy>(m, "Policy")
        .def_static("uniform", &Policy::uniform, py::arg("horizon"), py::arg("num_states"),
                    py::arg("num_actions"))
        .def_readonly("probs", &Policy::probs)
        .def("strictly_positive", &Policy::strictly_positive);

    py::class_<ValueTables>(m, "ValueTables")
        .def_readonly("v", &ValueTables::v)
        .def_readonly("q", &ValueTables::q)
        .def("initial_value", &ValueTables::initial_value);

    py::class_<OccupancyMeasure>(m, "OccupancyMeasure")
        .def_readonly("w", &OccupancyMeasure::w);

    py::class_<GeneratedEnv>(m, "GeneratedEnv")
        .def_readonly("cmdp", &GeneratedEnv::cmdp)
        .def_readonly("threshold", &GeneratedEnv::threshold)
        .def_readonly("slater_gap", &GeneratedEnv::slater_gap);

    py::class_<CmdpSolution>(m, "CmdpSolution")
        .def_readonly("value", &CmdpSolution::value)
        .def_readonly("occupancy", &CmdpSolution::occupancy)
        .def_readonly("policy", &CmdpSolution::policy);

    py::class_<SaddlePoint>(m, "SaddlePoint")
        .def_readonly("policy", &SaddlePoint::policy)
        .def_readonly("lambda_", &SaddlePoint::lambda)
        .def_readonly("lagrangian", &SaddlePoint::lagrangian)
        .def_readonly("iterations", &SaddlePoint::iterations);

    m.def("generate_random_cmdp", &generate_random_cmdp, py::arg("seed"),
          py::arg("num_states"), py::arg("num_actions"), py::arg("horizon"));
    m.def("load_cmdp", &load_cmdp);
    m.def("save_cmdp", &save_cmdp);
    m.def("eval_policy_exact", &eval_policy_exact, py::arg("cmdp"),
          py::arg("reward_index"), py::arg("policy"), py::arg("tau") = 0.0);
    m.def("occupancy", &occupancy);
    m.def("value_from_occupancy", &value_from_occupancy);
    m.def("entropy_value_identity_check", &entropy_value_identity_check);
    m.def("llnp", &llnp);
    m.def("unconstrained_max", &unconstrained_max);
    m.def("solve_cmdp_lp", &solve_cmdp_lp);
    m.def("brute_force_constrained_opt", &brute_force_constrained_opt);
    m.def("slater_gap", &slater_gap);
    m.def("regularized_saddle", &regularized_saddle, py::arg("cmdp"), py::arg("tau"),
          py::arg("max_iterations") = 1000000, py::arg("tolerance") = 1e-8);
    m.def("regularized_lagrangian", &regularized_lagrangian);
    m.def("compute_gaps", &compute_gaps);

    // Learning runs returned as per-episode (opt_gap, violation, lambda_1) tuples.
    m.def(
        "run_variant",
        [](const TabularCmdp& cmdp, const std::string& variant_name, std::uint64_t seed,
           long episodes, double v_star, double gap, double alpha_eta, double alpha_tau,
           double delta, double bonus_scale) {
            ExperimentConfig cfg;
            AlgoVariant variant = variant_from_name(variant_name, cfg);
            Schedule schedule{alpha_eta, alpha_tau, delta};
            std::vector<std::tuple<double, double, double>> out;
            out.reserve(episodes);
            run_uopt_rpgpd(cmdp, schedule, gap, episodes, seed, variant,
                           [&out](const EpisodeRecord& rec) {
                               out.emplace_back(rec.opt_gap, rec.violation,
                                                rec.lambda.empty() ? 0.0 : rec.lambda[0]);
                           },
                           v_star, bonus_scale);
            return out;
        },
        py::arg("cmdp"), py::arg("variant"), py::arg("seed"), py::arg("episodes"),
        py::arg("v_star"), py::arg("slater_gap"), py::arg("alpha_eta") = 0.53,
        py::arg("alpha_tau") = 0.4, py::arg("delta") = 0.1, py::arg("bonus_scale") = 1.0);

    m.def("run_experiment_config", [](const std::string& config_path) {
        return run_experiment(ExperimentConfig::from_json_file(config_path));
    });
}
