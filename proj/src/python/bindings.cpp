#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "softirl/environments.hpp"
#include "softirl/exact.hpp"
#include "softirl/io.hpp"
#include "softirl/irl.hpp"
#include "softirl/metrics.hpp"
#include "softirl/sampling.hpp"
#include "softirl/verify.hpp"

namespace py = pybind11;
using namespace softirl;

namespace {

// Python-facing estimator wrappers take the MDP and a seed directly; the
// stream-per-call discipline stays on the C++ side.
double est_q_py(const Mdp& m, int s, int a, const Policy& pi, const RewardTable& r,
                int batch_size, std::uint64_t seed) {
  MdpGenerativeModel model(m);
  RngStream rng(seed);
  return est_q(s, a, pi, r, batch_size, model, rng);
}

VectorXd est_sigma_py(const Mdp& m, const Policy& pi, const FeatureMap& phi, int batch_size,
                      std::uint64_t seed) {
  MdpGenerativeModel model(m);
  RngStream rng(seed);
  return est_sigma(pi, phi, batch_size, model, rng);
}

IrlTrace run_irl_py(const Mdp& m, const FeatureMap& phi, const VectorXd& sigma_e_hat,
                    const IrlConfig& cfg) {
  MdpGenerativeModel model(m);
  return run_irl(model, phi, sigma_e_hat, cfg);
}

}  // namespace

PYBIND11_MODULE(_softirl, mod) {
  mod.doc() = "Entropy-regularized inverse reinforcement learning on finite MDPs";

  py::register_exception<SolverFailure>(mod, "SolverFailure", PyExc_RuntimeError);

  py::class_<Mdp>(mod, "Mdp")
      .def(py::init<>())
      .def_readwrite("n_states", &Mdp::n_states)
      .def_readwrite("n_actions", &Mdp::n_actions)
      .def_readwrite("transition", &Mdp::transition)
      .def_readwrite("initial_dist", &Mdp::initial_dist)
      .def_readwrite("gamma", &Mdp::discount)
      .def_readwrite("tau", &Mdp::temperature);

  py::class_<ValidationReport>(mod, "ValidationReport")
      .def_readonly("violations", &ValidationReport::violations)
      .def("ok", &ValidationReport::ok)
      .def("__repr__", &ValidationReport::to_string);

  py::class_<FeatureMap>(mod, "FeatureMap")
      .def(py::init<int, int, RowMatrixXd>(), py::arg("n_states"), py::arg("n_actions"),
           py::arg("values"))
      .def_readonly("n_states", &FeatureMap::n_states)
      .def_readonly("n_actions", &FeatureMap::n_actions)
      .def_readonly("k", &FeatureMap::k)
      .def_readonly("values", &FeatureMap::values)
      .def_readonly("sup_norm", &FeatureMap::sup_norm);

  py::class_<RewardWeights>(mod, "RewardWeights")
      .def(py::init<VectorXd>(), py::arg("w"))
      .def_readonly("w", &RewardWeights::w);

  py::class_<Policy>(mod, "Policy")
      .def(py::init([](RowMatrixXd probs) {
             Policy pi;
             pi.probs = std::move(probs);
             check_policy(pi);
             return pi;
           }),
           py::arg("probs"))
      .def_static("uniform", &Policy::uniform, py::arg("n_states"), py::arg("n_actions"))
      .def_readonly("probs", &Policy::probs);

  py::class_<RewardTable>(mod, "RewardTable")
      .def(py::init([](RowMatrixXd values) { return RewardTable{std::move(values)}; }),
           py::arg("values"))
      .def_readonly("values", &RewardTable::values);

  py::class_<ValuePair>(mod, "ValuePair")
      .def_readonly("v", &ValuePair::v)
      .def_readonly("q", &ValuePair::q)
      .def_readonly("residual", &ValuePair::residual)
      .def_readonly("iterations", &ValuePair::iterations);

  py::class_<OccupancyPair>(mod, "OccupancyPair")
      .def_readonly("nu", &OccupancyPair::nu)
      .def_readonly("mu", &OccupancyPair::mu);

  py::class_<SoftSubopt>(mod, "SoftSubopt")
      .def_readonly("gap", &SoftSubopt::gap)
      .def_readonly("kl_form", &SoftSubopt::kl_form);

  py::class_<EnvironmentBundle>(mod, "EnvironmentBundle")
      .def_readonly("mdp", &EnvironmentBundle::mdp)
      .def_readonly("phi", &EnvironmentBundle::phi)
      .def_readonly("w_true", &EnvironmentBundle::w_true)
      .def_readonly("pi_expert", &EnvironmentBundle::pi_expert)
      .def_readonly("provenance", &EnvironmentBundle::provenance);

  py::enum_<StepsizeRule>(mod, "StepsizeRule")
      .value("SQRT_KT", StepsizeRule::SqrtKT)
      .value("SQRT_2KT", StepsizeRule::Sqrt2KT);

  py::class_<IrlConfig>(mod, "IrlConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &IrlConfig::iterations)
      .def_readwrite("batch_size", &IrlConfig::batch_size)
      .def_readwrite("eta_w", &IrlConfig::eta_w)
      .def_readwrite("seed", &IrlConfig::seed)
      .def_readwrite("horizon_cap", &IrlConfig::horizon_cap)
      .def_readwrite("snapshot_cadence", &IrlConfig::snapshot_cadence)
      .def_readwrite("stepsize_rule", &IrlConfig::stepsize_rule)
      .def_readwrite("threads", &IrlConfig::threads);

  py::class_<IrlIterRecord>(mod, "IrlIterRecord")
      .def_readonly("t", &IrlIterRecord::t)
      .def_readonly("w", &IrlIterRecord::w)
      .def_readonly("sigma_hat", &IrlIterRecord::sigma_hat)
      .def_readonly("grad_linf", &IrlIterRecord::grad_linf)
      .def_readonly("w_l1", &IrlIterRecord::w_l1)
      .def_readonly("samples_total", &IrlIterRecord::samples_total);

  py::class_<IrlTrace>(mod, "IrlTrace")
      .def_readonly("records", &IrlTrace::records)
      .def_readonly("w_bar", &IrlTrace::w_bar)
      .def_readonly("final_weights", &IrlTrace::final_weights)
      .def_readonly("final_policy", &IrlTrace::final_policy)
      .def_readonly("samples_total", &IrlTrace::samples_total)
      .def_readonly("eta_w", &IrlTrace::eta_w);

  py::class_<ExpertDataset>(mod, "ExpertDataset")
      .def_readonly("trajectories", &ExpertDataset::trajectories)
      .def_readonly("n", &ExpertDataset::n)
      .def_readonly("horizon", &ExpertDataset::horizon)
      .def_readonly("seed", &ExpertDataset::seed);

  py::class_<PinskerReport>(mod, "PinskerReport")
      .def_readonly("lhs", &PinskerReport::lhs)
      .def_readonly("rhs", &PinskerReport::rhs)
      .def_readonly("tv", &PinskerReport::tv)
      .def_readonly("vartheta_e", &PinskerReport::vartheta_e)
      .def_readonly("assumption_holds", &PinskerReport::assumption_holds);

  py::class_<MetricReport>(mod, "MetricReport")
      .def_readonly("expert_subopt", &MetricReport::expert_subopt)
      .def_readonly("tv", &MetricReport::tv)
      .def_readonly("ipm", &MetricReport::ipm)
      .def_readonly("true_gap", &MetricReport::true_gap)
      .def_readonly("pinsker_lhs", &MetricReport::pinsker_lhs)
      .def_readonly("pinsker_rhs", &MetricReport::pinsker_rhs)
      .def_readonly("vartheta_e", &MetricReport::vartheta_e)
      .def_readonly("assumption3_holds", &MetricReport::assumption3_holds);

  py::class_<CheckResult>(mod, "CheckResult")
      .def_readonly("suite", &CheckResult::suite)
      .def_readonly("trial", &CheckResult::trial)
      .def_readonly("instance_seed", &CheckResult::instance_seed)
      .def_readonly("margin", &CheckResult::margin)
      .def_readonly("pass_", &CheckResult::pass)
      .def_readonly("detail", &CheckResult::detail);

  mod.def("validate_mdp", &validate_mdp, py::arg("mdp"));
  mod.def("shannon_entropy", &shannon_entropy, py::arg("dist"));
  mod.def("reward_of", &reward_of, py::arg("w"), py::arg("phi"));
  mod.def("soft_value_iteration", &soft_value_iteration, py::arg("mdp"), py::arg("reward"),
          py::arg("tol") = 1e-10);
  mod.def("optimal_policy", &optimal_policy, py::arg("value_pair"), py::arg("tau"));
  mod.def("policy_evaluation", &policy_evaluation, py::arg("mdp"), py::arg("reward"),
          py::arg("pi"), py::arg("tol") = 1e-10);
  mod.def("occupancy", &occupancy, py::arg("mdp"), py::arg("pi"));
  mod.def("feature_expectation_exact", &feature_expectation_exact, py::arg("mdp"),
          py::arg("pi"), py::arg("phi"));
  mod.def("objective_value", &objective_value, py::arg("mdp"), py::arg("reward"),
          py::arg("pi"));
  mod.def("soft_suboptimality", &soft_suboptimality, py::arg("mdp"), py::arg("reward"),
          py::arg("pi"));
  mod.def("distribution_mismatch", &distribution_mismatch, py::arg("mdp"), py::arg("pi"),
          py::arg("pi_ref"));

  mod.def("est_q", &est_q_py, py::arg("mdp"), py::arg("s"), py::arg("a"), py::arg("pi"),
          py::arg("reward"), py::arg("batch_size"), py::arg("seed"));
  mod.def("est_sigma", &est_sigma_py, py::arg("mdp"), py::arg("pi"), py::arg("phi"),
          py::arg("batch_size"), py::arg("seed"));
  mod.def(
      "generate_expert_dataset",
      [](const Mdp& m, const Policy& pi_expert, int n, int horizon, std::uint64_t seed) {
        MdpGenerativeModel model(m);
        return generate_expert_dataset(model, pi_expert, n, horizon, seed);
      },
      py::arg("mdp"), py::arg("pi_expert"), py::arg("n"), py::arg("horizon"), py::arg("seed"));
  mod.def("empirical_expert_features", &empirical_expert_features, py::arg("dataset"),
          py::arg("phi"), py::arg("gamma"));

  mod.def("project_l1_ball", &project_l1_ball, py::arg("v"), py::arg("radius") = 1.0);
  mod.def("policy_update", &policy_update, py::arg("q_hat"), py::arg("tau"));
  mod.def("default_stepsize", &default_stepsize, py::arg("k"), py::arg("iterations"),
          py::arg("gamma"), py::arg("phi_sup"));
  mod.def("run_irl", &run_irl_py, py::arg("mdp"), py::arg("phi"), py::arg("sigma_e_hat"),
          py::arg("config"));

  mod.def("tv_metric", &tv_metric, py::arg("pi1"), py::arg("pi2"));
  mod.def("ipm", &ipm, py::arg("sigma1"), py::arg("sigma2"));
  mod.def("true_reward_gap", &true_reward_gap, py::arg("w_true"), py::arg("sigma_pi"),
          py::arg("sigma_e"));
  mod.def("expert_suboptimality", &expert_suboptimality, py::arg("mdp"), py::arg("reward"),
          py::arg("pi_expert"));
  mod.def("pinsker_chain", &pinsker_chain, py::arg("mdp"), py::arg("reward"),
          py::arg("pi_expert"));
  mod.def("evaluate_metrics", &evaluate_metrics, py::arg("mdp"), py::arg("phi"),
          py::arg("reward"), py::arg("pi_expert"), py::arg("w_true") = std::nullopt);

  mod.def("one_state_mdp", &one_state_mdp, py::arg("gamma") = 0.9, py::arg("tau") = 1.0);
  mod.def("random_mdp", &random_mdp, py::arg("n_states"), py::arg("n_actions"),
          py::arg("seed"), py::arg("gamma") = 0.9, py::arg("tau") = 1.0,
          py::arg("nu0_floor") = 0.0, py::arg("expert_mix") = 0.0);
  mod.def("gridworld", &gridworld, py::arg("size"), py::arg("slip_prob") = 0.1,
          py::arg("gamma") = 0.9, py::arg("tau") = 1.0, py::arg("expert_mix") = 0.0);

  mod.def("verify_suite_names", &verify_suite_names);
  mod.def("run_verify_suite", &run_verify_suite, py::arg("suite"), py::arg("seed"),
          py::arg("trials"));
}
