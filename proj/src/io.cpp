#include "softirl/io.hpp"

#include "softirl/exact.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace softirl {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

VectorXd to_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json from_vector(const VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

}  // namespace

EnvironmentFile load_environment_file(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_keys(j, {"n_states", "n_actions", "gamma", "tau", "transition", "initial_dist",
                 "features", "expert_policy", "w_true"},
             path.string());
  for (const char* key : {"n_states", "n_actions", "gamma", "tau", "transition", "initial_dist"}) {
    if (!j.contains(key)) throw ConfigError(path.string() + ": missing key \"" + key + "\"");
  }

  EnvironmentFile out;
  Mdp& m = out.mdp;
  m.n_states = j["n_states"].get<int>();
  m.n_actions = j["n_actions"].get<int>();
  m.discount = j["gamma"].get<double>();
  m.temperature = j["tau"].get<double>();
  if (m.n_states <= 0 || m.n_actions <= 0) {
    throw ConfigError(path.string() + ": state/action counts must be positive");
  }

  const json& trans = j["transition"];
  if (!trans.is_array() || static_cast<int>(trans.size()) != m.n_states) {
    throw ConfigError(path.string() + ": transition must have n_states outer entries");
  }
  m.transition.resize(m.n_states * m.n_actions, m.n_states);
  for (int s = 0; s < m.n_states; ++s) {
    if (static_cast<int>(trans[s].size()) != m.n_actions) {
      throw ConfigError(path.string() + ": transition[" + std::to_string(s) +
                        "] must have n_actions entries");
    }
    for (int a = 0; a < m.n_actions; ++a) {
      const VectorXd row = to_vector(trans[s][a], "transition row");
      if (row.size() != m.n_states) {
        throw ConfigError(path.string() + ": transition row (s=" + std::to_string(s) +
                          ",a=" + std::to_string(a) + ") has wrong length");
      }
      m.transition.row(m.sa_index(s, a)) = row.transpose();
    }
  }
  m.initial_dist = to_vector(j["initial_dist"], "initial_dist");

  const ValidationReport rep = validate_mdp(m);
  if (!rep.ok()) throw ConfigError(path.string() + ": " + rep.to_string());

  if (j.contains("features")) {
    const json& f = j["features"];
    check_keys(f, {"k", "values"}, path.string() + ":features");
    const int k = f.at("k").get<int>();
    RowMatrixXd values(m.n_states * m.n_actions, k);
    const json& vals = f.at("values");
    for (int s = 0; s < m.n_states; ++s) {
      for (int a = 0; a < m.n_actions; ++a) {
        const VectorXd row = to_vector(vals.at(s).at(a), "features row");
        if (row.size() != k) throw ConfigError(path.string() + ": feature row has wrong length");
        values.row(m.sa_index(s, a)) = row.transpose();
      }
    }
    out.phi = FeatureMap(m.n_states, m.n_actions, std::move(values));
  }
  if (j.contains("expert_policy")) {
    Policy pi;
    pi.probs.resize(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
      const VectorXd row = to_vector(j["expert_policy"].at(s), "expert_policy row");
      if (row.size() != m.n_actions) {
        throw ConfigError(path.string() + ": expert_policy row has wrong length");
      }
      pi.probs.row(s) = row.transpose();
    }
    try {
      check_policy(pi);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    out.pi_expert = std::move(pi);
  }
  if (j.contains("w_true")) {
    try {
      out.w_true = RewardWeights(to_vector(j["w_true"], "w_true"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return out;
}

void save_environment_file(const EnvironmentBundle& bundle, const std::filesystem::path& path) {
  const Mdp& m = bundle.mdp;
  json j;
  j["n_states"] = m.n_states;
  j["n_actions"] = m.n_actions;
  j["gamma"] = m.discount;
  j["tau"] = m.temperature;
  json trans = json::array();
  for (int s = 0; s < m.n_states; ++s) {
    json per_action = json::array();
    for (int a = 0; a < m.n_actions; ++a) {
      per_action.push_back(from_vector(m.transition.row(m.sa_index(s, a)).transpose()));
    }
    trans.push_back(std::move(per_action));
  }
  j["transition"] = std::move(trans);
  j["initial_dist"] = from_vector(m.initial_dist);

  json fvals = json::array();
  for (int s = 0; s < m.n_states; ++s) {
    json per_action = json::array();
    for (int a = 0; a < m.n_actions; ++a) {
      per_action.push_back(from_vector(bundle.phi.row(s, a).transpose()));
    }
    fvals.push_back(std::move(per_action));
  }
  j["features"] = {{"k", bundle.phi.k}, {"values", std::move(fvals)}};

  json expert = json::array();
  for (int s = 0; s < m.n_states; ++s) {
    expert.push_back(from_vector(bundle.pi_expert.probs.row(s).transpose()));
  }
  j["expert_policy"] = std::move(expert);
  if (bundle.w_true) j["w_true"] = from_vector(bundle.w_true->w);

  std::ofstream o(path);
  if (!o) throw ConfigError("cannot write file: " + path.string());
  o << j.dump(1) << "\n";
}

void save_expert_dataset(const ExpertDataset& data, const std::filesystem::path& path) {
  std::ofstream o(path);
  if (!o) throw ConfigError("cannot write file: " + path.string());
  json header = {{"n", data.n}, {"horizon", data.horizon}, {"seed", data.seed}};
  o << header.dump() << "\n";
  for (const auto& traj : data.trajectories) {
    json line = json::array();
    for (const auto& [s, a] : traj) line.push_back(json::array({s, a}));
    o << line.dump() << "\n";
  }
}

ExpertDataset load_expert_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": missing dataset header");

  ExpertDataset out;
  try {
    const json header = json::parse(line);
    check_keys(header, {"n", "horizon", "seed"}, path.string() + " header");
    out.n = header.at("n").get<int>();
    out.horizon = header.at("horizon").get<int>();
    out.seed = header.at("seed").get<std::uint64_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json traj = json::parse(line);
      std::vector<std::pair<int, int>> steps;
      steps.reserve(traj.size());
      for (const auto& pair : traj) {
        steps.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
      }
      out.trajectories.push_back(std::move(steps));
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": malformed dataset: " + e.what());
  }
  if (static_cast<int>(out.trajectories.size()) != out.n) {
    throw ConfigError(path.string() + ": header n does not match trajectory count");
  }
  for (const auto& traj : out.trajectories) {
    if (static_cast<int>(traj.size()) != out.horizon) {
      throw ConfigError(path.string() + ": trajectory length differs from header horizon");
    }
  }
  return out;
}

namespace {

EnvironmentConfig parse_environment(const json& j) {
  EnvironmentConfig cfg;
  check_keys(j, {"name", "file", "features", "gamma", "tau", "n_states", "n_actions", "seed",
                 "nu0_floor", "expert_mix", "size", "slip_prob"},
             "environment");
  if (j.contains("file")) {
    cfg.file = j["file"].get<std::string>();
    if (j.contains("name")) throw ConfigError("environment: give either name or file, not both");
  } else if (j.contains("name")) {
    cfg.name = j["name"].get<std::string>();
    if (cfg.name != "one_state" && cfg.name != "random" && cfg.name != "gridworld") {
      throw ConfigError("environment: unknown name \"" + cfg.name + "\"");
    }
  } else {
    throw ConfigError("environment: missing name or file");
  }
  if (j.contains("features")) cfg.feature_override = j["features"].get<std::string>();
  if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
  if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
  if (j.contains("n_states")) cfg.n_states = j["n_states"].get<int>();
  if (j.contains("n_actions")) cfg.n_actions = j["n_actions"].get<int>();
  if (j.contains("seed")) cfg.env_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("nu0_floor")) cfg.nu0_floor = j["nu0_floor"].get<double>();
  if (j.contains("expert_mix")) cfg.expert_mix = j["expert_mix"].get<double>();
  if (j.contains("size")) cfg.size = j["size"].get<int>();
  if (j.contains("slip_prob")) cfg.slip_prob = j["slip_prob"].get<double>();
  return cfg;
}

IrlConfig parse_algorithm(const json& j) {
  IrlConfig cfg;
  check_keys(j, {"iterations", "batch_size", "eta_w", "horizon_cap", "snapshot_cadence",
                 "stepsize_rule"},
             "algorithm");
  if (j.contains("iterations")) cfg.iterations = j["iterations"].get<int>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
  if (j.contains("eta_w")) {
    const json& e = j["eta_w"];
    if (e.is_string()) {
      if (e.get<std::string>() != "auto") {
        throw ConfigError("algorithm.eta_w must be a positive number or \"auto\"");
      }
    } else {
      cfg.eta_w = e.get<double>();
      if (!(*cfg.eta_w > 0.0)) throw ConfigError("algorithm.eta_w must be > 0");
    }
  }
  if (j.contains("horizon_cap") && !j["horizon_cap"].is_null()) {
    cfg.horizon_cap = j["horizon_cap"].get<int>();
  }
  if (j.contains("snapshot_cadence")) cfg.snapshot_cadence = j["snapshot_cadence"].get<int>();
  if (j.contains("stepsize_rule")) {
    const std::string rule = j["stepsize_rule"].get<std::string>();
    if (rule == "sqrt_kT") {
      cfg.stepsize_rule = StepsizeRule::SqrtKT;
    } else if (rule == "sqrt_2kT") {
      cfg.stepsize_rule = StepsizeRule::Sqrt2KT;
    } else {
      throw ConfigError("algorithm.stepsize_rule must be sqrt_kT or sqrt_2kT");
    }
  }
  return cfg;
}

ExpertConfig parse_expert(const json& j) {
  ExpertConfig cfg;
  check_keys(j, {"source", "n", "horizon", "seed", "path"}, "expert");
  if (j.contains("source")) cfg.source = j["source"].get<std::string>();
  if (cfg.source != "exact" && cfg.source != "dataset" && cfg.source != "file") {
    throw ConfigError("expert.source must be exact, dataset, or file");
  }
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("horizon")) cfg.horizon = j["horizon"].get<int>();
  if (j.contains("seed")) cfg.dataset_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("path")) cfg.path = j["path"].get<std::string>();
  if (cfg.source == "file" && cfg.path.empty()) {
    throw ConfigError("expert.source=file requires expert.path");
  }
  return cfg;
}

EvaluationConfig parse_evaluation(const json& j) {
  EvaluationConfig cfg;
  check_keys(j, {"expert_subopt", "policy_subopt", "exact_sigma", "pinsker", "metrics",
                 "cadence"},
             "evaluation");
  if (j.contains("expert_subopt")) cfg.expert_subopt = j["expert_subopt"].get<bool>();
  if (j.contains("policy_subopt")) cfg.policy_subopt = j["policy_subopt"].get<bool>();
  if (j.contains("exact_sigma")) cfg.exact_sigma = j["exact_sigma"].get<bool>();
  if (j.contains("pinsker")) cfg.pinsker = j["pinsker"].get<bool>();
  if (j.contains("metrics")) cfg.metrics = j["metrics"].get<bool>();
  if (j.contains("cadence")) cfg.cadence = j["cadence"].get<int>();
  return cfg;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_keys(j, {"environment", "algorithm", "expert", "evaluation", "seeds", "output",
                 "reward"},
             path.string());
  if (!j.contains("environment")) throw ConfigError(path.string() + ": missing environment");

  RunConfig cfg;
  cfg.environment = parse_environment(j["environment"]);
  if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j["algorithm"]);
  if (j.contains("expert")) cfg.expert = parse_expert(j["expert"]);
  if (j.contains("evaluation")) cfg.evaluation = parse_evaluation(j["evaluation"]);
  if (j.contains("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
    if (cfg.seeds.empty()) throw ConfigError(path.string() + ": seeds must be non-empty");
  }
  if (j.contains("output")) {
    check_keys(j["output"], {"dir"}, "output");
    if (j["output"].contains("dir")) cfg.output_dir = j["output"]["dir"].get<std::string>();
  }
  if (j.contains("reward")) {
    check_keys(j["reward"], {"w"}, "reward");
    cfg.reward_w = to_vector(j["reward"].at("w"), "reward.w");
  }
  return cfg;
}

EnvironmentBundle build_environment(const EnvironmentConfig& cfg) try {
  EnvironmentBundle bundle;
  if (!cfg.file.empty()) {
    EnvironmentFile f = load_environment_file(cfg.file);
    bundle.mdp = std::move(f.mdp);
    bundle.provenance = "file:" + cfg.file.string();
    if (f.phi) {
      bundle.phi = std::move(*f.phi);
    } else if (!cfg.feature_override) {
      throw ConfigError(cfg.file.string() + ": no features in file; set environment.features");
    }
    bundle.w_true = std::move(f.w_true);
    if (f.pi_expert) {
      bundle.pi_expert = std::move(*f.pi_expert);
    }
  } else if (cfg.name == "one_state") {
    bundle = one_state_mdp(cfg.gamma, cfg.tau);
  } else if (cfg.name == "random") {
    bundle = random_mdp(cfg.n_states, cfg.n_actions, cfg.env_seed, cfg.gamma, cfg.tau,
                        cfg.nu0_floor, cfg.expert_mix);
  } else {
    bundle = gridworld(cfg.size, cfg.slip_prob, cfg.gamma, cfg.tau, cfg.expert_mix);
  }

  if (cfg.feature_override) {
    const std::string& f = *cfg.feature_override;
    const int S = bundle.mdp.n_states, A = bundle.mdp.n_actions;
    FeatureMap phi;
    if (f == "one_hot_sa") {
      phi = one_hot_sa_features(S, A);
    } else if (f == "one_hot_s") {
      phi = one_hot_state_features(S, A);
    } else if (f == "constant") {
      phi = constant_features(S, A);
    } else {
      throw ConfigError("unknown feature map \"" + f + "\"");
    }
    if (bundle.w_true && bundle.w_true->k() != phi.k) {
      throw ConfigError("feature override dimension " + std::to_string(phi.k) +
                        " conflicts with w_true dimension " +
                        std::to_string(bundle.w_true->k()));
    }
    bundle.phi = std::move(phi);
  }

  if (bundle.pi_expert.probs.size() == 0) {
    if (!bundle.w_true) {
      throw ConfigError("environment provides neither an expert policy nor w_true");
    }
    const RewardTable r = reward_of(*bundle.w_true, bundle.phi);
    bundle.pi_expert =
        optimal_policy(soft_value_iteration(bundle.mdp, r), bundle.mdp.temperature);
  }
  return bundle;
} catch (const std::invalid_argument& e) {
  // Constructor precondition failures are configuration problems.
  throw ConfigError(std::string("environment: ") + e.what());
}

namespace {

void append_optional(std::string& line, const std::optional<double>& v) {
  line += ',';
  if (v) line += format_double(*v);
}

}  // namespace

void write_trace_csv(const IrlTrace& trace, const EvaluationConfig& eval,
                     const std::filesystem::path& path) {
  std::ofstream o(path);
  if (!o) throw ConfigError("cannot write file: " + path.string());
  std::string header = "t,samples_total,grad_linf,w_l1";
  if (eval.policy_subopt) header += ",subopt_policy";
  if (eval.expert_subopt) header += ",subopt_expert";
  if (eval.pinsker) header += ",pinsker_lhs,pinsker_rhs";
  o << header << "\n";
  for (const auto& rec : trace.records) {
    std::string line = std::to_string(rec.t);
    line += ',' + std::to_string(rec.samples_total);
    line += ',' + format_double(rec.grad_linf);
    line += ',' + format_double(rec.w_l1);
    if (eval.policy_subopt) append_optional(line, rec.policy_subopt_exact);
    if (eval.expert_subopt) append_optional(line, rec.expert_subopt_exact);
    if (eval.pinsker) {
      append_optional(line, rec.pinsker_lhs);
      append_optional(line, rec.pinsker_rhs);
    }
    o << line << "\n";
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const EvaluationConfig& eval,
                       const std::filesystem::path& path) {
  std::ofstream o(path);
  if (!o) throw ConfigError("cannot write file: " + path.string());
  std::string header = "seed,status,samples_total,eta_w,w_bar_l1";
  const bool with_metrics = eval.metrics;
  if (eval.expert_subopt || with_metrics) header += ",expert_subopt";
  if (with_metrics) header += ",tv,ipm,true_gap,pinsker_lhs,pinsker_rhs,vartheta_e";
  o << header << "\n";
  for (const auto& row : rows) {
    std::string line = std::to_string(row.seed) + ',' + row.status;
    line += ',' + std::to_string(row.samples_total);
    line += ',' + format_double(row.eta_w);
    line += ',' + format_double(row.w_bar_l1);
    if (eval.expert_subopt || with_metrics) append_optional(line, row.expert_subopt);
    if (with_metrics) {
      append_optional(line, row.tv);
      append_optional(line, row.ipm);
      append_optional(line, row.true_gap);
      append_optional(line, row.pinsker_lhs);
      append_optional(line, row.pinsker_rhs);
      append_optional(line, row.vartheta_e);
    }
    o << line << "\n";
  }
}

void write_weights_json(const VectorXd& w_bar, std::uint64_t seed, const IrlConfig& cfg,
                        double eta_w, std::uint64_t samples_total,
                        const std::filesystem::path& path) {
  json j;
  j["seed"] = seed;
  j["iterations"] = cfg.iterations;
  j["batch_size"] = cfg.batch_size;
  j["eta_w"] = eta_w;
  j["samples_total"] = samples_total;
  j["w_bar"] = from_vector(w_bar);
  std::ofstream o(path);
  if (!o) throw ConfigError("cannot write file: " + path.string());
  o << j.dump(1) << "\n";
}

}  // namespace softirl
