#include "softirl/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "softirl/exact.hpp"
#include "softirl/io.hpp"
#include "softirl/metrics.hpp"
#include "softirl/parallel.hpp"
#include "softirl/verify.hpp"

namespace softirl {

namespace {

using nlohmann::json;

json vector_json(const VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json matrix_json(const RowMatrixXd& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    j.push_back(vector_json(m.row(r).transpose()));
  }
  return j;
}

void dump(const json& j, const std::filesystem::path& path) {
  std::ofstream o(path);
  if (!o) throw ConfigError("cannot write file: " + path.string());
  o << j.dump(1) << "\n";
}

RunConfig load_with_overrides(const CliOptions& opts) {
  RunConfig cfg = load_run_config(opts.config);
  if (opts.seeds) {
    if (opts.seeds->empty()) throw ConfigError("--seed list must be non-empty");
    cfg.seeds = *opts.seeds;
  }
  if (opts.out) cfg.output_dir = *opts.out;
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " +
                      ec.message());
  }
  return cfg;
}

VectorXd resolve_expert_features(const RunConfig& cfg, const EnvironmentBundle& bundle) {
  if (cfg.expert.source == "exact") {
    return feature_expectation_exact(bundle.mdp, bundle.pi_expert, bundle.phi);
  }
  ExpertDataset data;
  if (cfg.expert.source == "dataset") {
    MdpGenerativeModel model(bundle.mdp);
    data = generate_expert_dataset(model, bundle.pi_expert, cfg.expert.n, cfg.expert.horizon,
                                   cfg.expert.dataset_seed);
    save_expert_dataset(data, cfg.output_dir / "expert_dataset.jsonl");
  } else {
    data = load_expert_dataset(cfg.expert.path);
  }
  return empirical_expert_features(data, bundle.phi, bundle.mdp.discount);
}

std::string sanitize_status(std::string msg) {
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return "error:" + msg;
}

}  // namespace

int cmd_solve(const CliOptions& opts) {
  try {
    const RunConfig cfg = load_with_overrides(opts);
    const EnvironmentBundle bundle = build_environment(cfg.environment);

    std::optional<RewardWeights> weights;
    try {
      if (cfg.reward_w) {
        weights = RewardWeights(*cfg.reward_w);
      } else if (bundle.w_true) {
        weights = *bundle.w_true;
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("reward.w: ") + e.what());
    }
    if (!weights) {
      throw ConfigError("no reward source: set reward.w or use an environment with w_true");
    }
    if (weights->k() != bundle.phi.k) {
      throw ConfigError("reward.w dimension does not match the feature map");
    }
    const RewardTable r = reward_of(*weights, bundle.phi);

    const ValuePair vp = soft_value_iteration(bundle.mdp, r);
    const Policy pi_star = optimal_policy(vp, bundle.mdp.temperature);
    const OccupancyPair occ = occupancy(bundle.mdp, pi_star);
    const VectorXd sigma = feature_expectation_exact(bundle.mdp, pi_star, bundle.phi);

    dump({{"v", vector_json(vp.v)},
          {"q", matrix_json(vp.q)},
          {"residual", vp.residual},
          {"iterations", vp.iterations}},
         cfg.output_dir / "values.json");
    dump({{"probs", matrix_json(pi_star.probs)}}, cfg.output_dir / "policy.json");
    dump({{"nu", vector_json(occ.nu)}, {"mu", matrix_json(occ.mu)}},
         cfg.output_dir / "occupancy.json");
    dump({{"sigma", vector_json(sigma)}}, cfg.output_dir / "sigma.json");
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericFailure;
  }
}

int cmd_irl(const CliOptions& opts) {
  RunConfig cfg;
  EnvironmentBundle bundle;
  VectorXd sigma_e;
  try {
    cfg = load_with_overrides(opts);
    bundle = build_environment(cfg.environment);
    sigma_e = resolve_expert_features(cfg, bundle);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericFailure;
  }

  if (cfg.algorithm.horizon_cap) {
    std::cerr << "note: horizon_cap=" << *cfg.algorithm.horizon_cap
              << " truncates geometric horizons and biases the estimators\n";
  }

  const int n_seeds = static_cast<int>(cfg.seeds.size());
  std::vector<SummaryRow> rows(n_seeds);
  parallel_for(n_seeds, opts.threads, [&](int i) {
    const std::uint64_t seed = cfg.seeds[i];
    SummaryRow& row = rows[i];
    row.seed = seed;
    try {
      IrlConfig run_cfg = cfg.algorithm;
      run_cfg.seed = seed;
      run_cfg.threads = 1;  // one run per worker; see the concurrency contract

      ExactDiagnostics diag;
      diag.mdp = &bundle.mdp;
      diag.pi_expert = &bundle.pi_expert;
      diag.cadence = cfg.evaluation.cadence;
      diag.policy_subopt = cfg.evaluation.policy_subopt;
      diag.expert_subopt = cfg.evaluation.expert_subopt;
      diag.pinsker = cfg.evaluation.pinsker;
      diag.exact_sigma = cfg.evaluation.exact_sigma;
      const bool any_diag = diag.policy_subopt || diag.expert_subopt || diag.pinsker ||
                            diag.exact_sigma;

      MdpGenerativeModel model(bundle.mdp);
      const IrlTrace trace = run_irl(model, bundle.phi, sigma_e, run_cfg,
                                     any_diag ? &diag : nullptr);

      const std::string tag = "seed" + std::to_string(seed);
      write_trace_csv(trace, cfg.evaluation, cfg.output_dir / ("trace_" + tag + ".csv"));
      write_weights_json(trace.w_bar, seed, run_cfg, trace.eta_w, trace.samples_total,
                         cfg.output_dir / ("wbar_" + tag + ".json"));

      row.samples_total = trace.samples_total;
      row.eta_w = trace.eta_w;
      row.w_bar_l1 = trace.w_bar.lpNorm<1>();
      if (cfg.evaluation.metrics) {
        const RewardTable r_bar = reward_of(RewardWeights(trace.w_bar), bundle.phi);
        const MetricReport rep =
            evaluate_metrics(bundle.mdp, bundle.phi, r_bar, bundle.pi_expert, bundle.w_true);
        row.expert_subopt = rep.expert_subopt;
        row.tv = rep.tv;
        row.ipm = rep.ipm;
        row.true_gap = rep.true_gap;
        row.pinsker_lhs = rep.pinsker_lhs;
        row.pinsker_rhs = rep.pinsker_rhs;
        row.vartheta_e = rep.vartheta_e;
      } else if (cfg.evaluation.expert_subopt) {
        const RewardTable r_bar = reward_of(RewardWeights(trace.w_bar), bundle.phi);
        row.expert_subopt = expert_suboptimality(bundle.mdp, r_bar, bundle.pi_expert);
      }
    } catch (const std::exception& e) {
      row.status = sanitize_status(e.what());
    }
  });

  write_summary_csv(rows, cfg.evaluation, cfg.output_dir / "summary.csv");
  const bool all_failed = std::all_of(rows.begin(), rows.end(), [](const SummaryRow& r) {
    return r.status != "ok";
  });
  return all_failed ? kExitNumericFailure : kExitOk;
}

int cmd_verify(const VerifyOptions& opts) {
  std::vector<std::string> suites;
  try {
    if (opts.suite == "all") {
      suites = verify_suite_names();
    } else {
      suites = {opts.suite};
    }
    if (opts.trials < 1) throw ConfigError("--trials must be >= 1");

    std::vector<SuiteReport> reports;
    bool any_failure = false;
    for (const std::string& name : suites) {
      const std::vector<CheckResult> results = run_verify_suite(name, opts.seed, opts.trials);
      const SuiteReport rep = summarize(results);
      reports.push_back(rep);
      std::cout << (rep.failures == 0 ? "PASS" : "FAIL") << " suite=" << rep.suite
                << " trials=" << rep.trials << " failures=" << rep.failures
                << " worst_margin=" << format_double(rep.worst_margin)
                << " worst_seed=" << rep.worst_seed << "\n";
      for (const CheckResult& r : results) {
        if (!r.pass) {
          any_failure = true;
          std::cout << "  FAIL trial=" << r.trial << " seed=" << r.instance_seed
                    << " margin=" << format_double(r.margin) << " " << r.detail << "\n";
        }
      }
    }

    if (opts.out) {
      std::filesystem::create_directories(*opts.out);
      std::ofstream o(*opts.out / "verify_report.csv");
      if (!o) throw ConfigError("cannot write verify report");
      o << "suite,trials,failures,worst_margin,worst_seed\n";
      for (const auto& rep : reports) {
        o << rep.suite << ',' << rep.trials << ',' << rep.failures << ','
          << format_double(rep.worst_margin) << ',' << rep.worst_seed << "\n";
      }
    }
    return any_failure ? kExitVerifyFailure : kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericFailure;
  }
}

}  // namespace softirl
