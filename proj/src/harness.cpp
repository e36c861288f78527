#include "noisyts/harness.hpp"

#include "noisyts/denoising.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#ifndef NOISYTS_GIT_DESCRIBE
#define NOISYTS_GIT_DESCRIBE "unknown"
#endif

namespace noisyts {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct AlgorithmName {
  Algorithm alg;
  const char* name;
};

constexpr AlgorithmName kAlgorithmNames[] = {
    {Algorithm::kAlg1, "alg1"},
    {Algorithm::kAlg2Delayed, "alg2_delayed"},
    {Algorithm::kTsNaive, "ts_naive"},
    {Algorithm::kTsOracle, "ts_oracle"},
    {Algorithm::kOraclePolicy, "oracle_policy"},
};

}  // namespace

std::string to_string(Algorithm a) {
  for (const auto& entry : kAlgorithmNames) {
    if (entry.alg == a) return entry.name;
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
  for (const auto& entry : kAlgorithmNames) {
    if (s == entry.name) return entry.alg;
  }
  throw ConfigError("unknown algorithm '" + s + "' (expected alg1|alg2_delayed|ts_naive|ts_oracle|oracle_policy)");
}

const char* git_describe() { return NOISYTS_GIT_DESCRIBE; }

// --- configuration --------------------------------------------------------

void ExperimentConfig::validate() const {
  try {
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
  std::set<Algorithm> seen;
  for (Algorithm a : algorithms) {
    if (!seen.insert(a).second) throw ConfigError("algorithm '" + to_string(a) + "' listed twice");
    if (a == Algorithm::kAlg2Delayed && env.setting != Setting::kDelayed) {
      throw ConfigError("alg2_delayed requires setting = delayed");
    }
  }
  if (env.reward_family == RewardFamily::kLogistic) {
    if (!lmc) throw ConfigError("logistic reward family requires an lmc section");
    try {
      lmc->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (delta < 0.0 || delta >= 1.0) throw ConfigError("delta must lie in (0, 1), or 0 for 1/T");
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

Vec vector_field(const json& j, Index d, const std::string& name) {
  if (j.is_number()) return Vec::Constant(d, j.get<double>());
  if (!j.is_array() || static_cast<Index>(j.size()) != d) {
    throw ConfigError(name + " must be a number or an array of length d = " + std::to_string(d));
  }
  Vec v(d);
  for (Index i = 0; i < d; ++i) {
    if (!j[i].is_number()) throw ConfigError(name + " entries must be numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

Mat matrix_field(const json& j, Index d, const std::string& name) {
  if (j.is_number()) return j.get<double>() * Mat::Identity(d, d);
  if (!j.is_array() || static_cast<Index>(j.size()) != d) {
    throw ConfigError(name + " must be a number, a length-d array or a d x d array (d = " + std::to_string(d) + ")");
  }
  if (std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); })) {
    return vector_field(j, d, name).asDiagonal();
  }
  Mat m(d, d);
  for (Index r = 0; r < d; ++r) {
    if (!j[r].is_array() || static_cast<Index>(j[r].size()) != d) throw ConfigError(name + " rows must have length d");
    for (Index c = 0; c < d; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(name + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, {"env", "algorithms", "trials", "lmc", "output_path", "emit_bounds", "psi_mode", "delta"},
                 "config");

  const json env_doc = doc.value("env", json::object());
  if (!env_doc.is_object()) throw ConfigError("env must be an object");
  reject_unknown(env_doc,
                 {"d", "m", "K", "T", "sigma2", "lambda", "mu_c", "Sigma_c", "Sigma_n", "Sigma_gamma", "reward_family",
                  "setting", "feature_map", "normalize_features", "seed"},
                 "env");

  ExperimentConfig cfg;
  EnvConfig& env = cfg.env;
  try {
    env.reward_family = parse_reward_family(get_or<std::string>(env_doc, "reward_family", "gaussian"));
    env.setting = parse_setting(get_or<std::string>(env_doc, "setting", "unobserved"));
    env.feature_map = parse_feature_kind(get_or<std::string>(env_doc, "feature_map", "quadratic"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const bool logistic = env.reward_family == RewardFamily::kLogistic;

  env.d = get_or<Index>(env_doc, "d", 5);
  if (env.d < 1) throw ConfigError("env.d must be >= 1");
  env.m = get_or<Index>(env_doc, "m", feature_dim(env.feature_map, env.d));
  env.K = get_or<Index>(env_doc, "K", 40);
  env.T = get_or<Index>(env_doc, "T", 2000);
  env.sigma2 = get_or<double>(env_doc, "sigma2", 2.0);
  env.lambda = get_or<double>(env_doc, "lambda", 0.01);
  env.normalize_features = get_or<bool>(env_doc, "normalize_features", true);
  env.seed = get_or<std::uint64_t>(env_doc, "seed", 0);

  const Index d = env.d;
  env.mu_c = vector_field(env_doc.value("mu_c", json(0.0)), d, "mu_c");
  env.Sigma_c = matrix_field(env_doc.value("Sigma_c", json(1.0)), d, "Sigma_c");
  env.Sigma_n = matrix_field(env_doc.value("Sigma_n", json(logistic ? 2.0 : 1.1)), d, "Sigma_n");
  env.Sigma_gamma = matrix_field(env_doc.value("Sigma_gamma", json(logistic ? 2.5 : 1.1)), d, "Sigma_gamma");

  if (doc.contains("algorithms")) {
    if (!doc["algorithms"].is_array()) throw ConfigError("algorithms must be an array of names");
    for (const auto& name : doc["algorithms"]) {
      if (!name.is_string()) throw ConfigError("algorithms must be an array of names");
      cfg.algorithms.push_back(parse_algorithm(name.get<std::string>()));
    }
  } else {
    cfg.algorithms = {Algorithm::kAlg1, Algorithm::kTsNaive, Algorithm::kTsOracle, Algorithm::kOraclePolicy};
    if (env.setting == Setting::kDelayed) cfg.algorithms.insert(cfg.algorithms.begin() + 1, Algorithm::kAlg2Delayed);
  }

  cfg.trials = get_or<int>(doc, "trials", logistic ? 10 : 100);
  if (doc.contains("lmc")) {
    const json& l = doc["lmc"];
    if (!l.is_object()) throw ConfigError("lmc must be an object");
    reject_unknown(l, {"steps", "lr0", "beta_inv"}, "lmc");
    LmcConfig lmc;
    lmc.steps = get_or<int>(l, "steps", lmc.steps);
    lmc.lr0 = get_or<double>(l, "lr0", lmc.lr0);
    lmc.beta_inv = get_or<double>(l, "beta_inv", lmc.beta_inv);
    cfg.lmc = lmc;
  }
  cfg.output_path = get_or<std::string>(doc, "output_path", cfg.output_path);
  cfg.emit_bounds = get_or<bool>(doc, "emit_bounds", false);
  const std::string psi = get_or<std::string>(doc, "psi_mode", "frozen");
  if (psi == "frozen") {
    cfg.psi_mode = PsiMode::kFrozen;
  } else if (psi == "recompute") {
    cfg.psi_mode = PsiMode::kRecompute;
  } else {
    throw ConfigError("psi_mode must be frozen or recompute");
  }
  cfg.delta = get_or<double>(doc, "delta", 0.0);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiment_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  const EnvConfig& e = cfg.env;
  json env = {
      {"d", e.d},
      {"m", e.m},
      {"K", e.K},
      {"T", e.T},
      {"sigma2", e.sigma2},
      {"lambda", e.lambda},
      {"mu_c", vector_to_json(e.mu_c)},
      {"Sigma_c", matrix_to_json(e.Sigma_c)},
      {"Sigma_n", matrix_to_json(e.Sigma_n)},
      {"Sigma_gamma", matrix_to_json(e.Sigma_gamma)},
      {"reward_family", to_string(e.reward_family)},
      {"setting", to_string(e.setting)},
      {"feature_map", to_string(e.feature_map)},
      {"normalize_features", e.normalize_features},
      {"seed", e.seed},
  };
  json algs = json::array();
  for (Algorithm a : cfg.algorithms) algs.push_back(to_string(a));
  json doc = {
      {"env", env},
      {"algorithms", algs},
      {"trials", cfg.trials},
      {"output_path", cfg.output_path},
      {"emit_bounds", cfg.emit_bounds},
      {"psi_mode", cfg.psi_mode == PsiMode::kFrozen ? "frozen" : "recompute"},
      {"delta", cfg.delta},
  };
  if (cfg.lmc) doc["lmc"] = {{"steps", cfg.lmc->steps}, {"lr0", cfg.lmc->lr0}, {"beta_inv", cfg.lmc->beta_inv}};
  return doc;
}

// --- trials ----------------------------------------------------------------

namespace {

struct Agent {
  Algorithm alg;
  PolicyState ps;
  DenoiseState dn;
  Rng rng;
  Vec lmc_theta;  // warm start, empty before the first round
  double cumulative = 0.0;
  // recompute mode only
  std::vector<Index> played;
  std::vector<Vec> noisy_seen;
};

// Re-evaluate every past psi of alg1 under the current predictive posterior.
PolicyState recomputed_state(const Agent& agent, const ChannelModel& ch, const FeatureMap& fm) {
  PolicyState ps = PolicyState::prior(agent.ps.dim(), agent.ps.lambda, agent.ps.sigma2);
  for (std::size_t i = 0; i < agent.played.size(); ++i) {
    const Vec psi =
        fm.expected_feature(agent.played[i], predictive_posterior_unobserved(ch, agent.dn, agent.noisy_seen[i]));
    ps = update(std::move(ps), agent.ps.rewards[i], psi);
  }
  return ps;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, int trial) {
  const EnvConfig& ec = cfg.env;
  const auto trial_index = static_cast<std::uint64_t>(trial);
  Rng env_rng(split_seed(ec.seed, trial_index, StreamRole::kEnvInit));
  Rng ctx_rng(split_seed(ec.seed, trial_index, StreamRole::kContexts));
  const std::uint64_t policy_seed = split_seed(ec.seed, trial_index, StreamRole::kPolicy);

  const EnvState env = init_env(ec, env_rng);
  const FeatureMap& fm = env.features;
  const ChannelModel ch = ChannelModel::from_config(ec);
  const bool logistic = ec.reward_family == RewardFamily::kLogistic;

  std::vector<Agent> agents;
  for (Algorithm a : cfg.algorithms) {
    const Setting s = a == Algorithm::kAlg2Delayed ? Setting::kDelayed : Setting::kUnobserved;
    agents.push_back(Agent{a, PolicyState::prior(ec.m, ec.lambda, ec.sigma2), DenoiseState::initial(s, ec.d),
                           Rng(policy_seed), Vec(), 0.0, {}, {}});
  }

  TrialResult out;
  out.meta.trial = trial;
  out.meta.feature_scale = fm.scale();
  out.meta.max_trace_gtg = fm.kind() == FeatureKind::kLinearGa ? fm.max_trace_gtg() : kNaN;
  out.meta.norm_violation_rate = env.norm_violation_rate;
  out.records.resize(agents.size() * static_cast<std::size_t>(ec.T));
  out.actions.assign(agents.size(), std::vector<Index>(static_cast<std::size_t>(ec.T)));

  for (Index t = 1; t <= ec.T; ++t) {
    const ContextDraw draw = gen_context(ec, env, ctx_rng);
    const RewardNoise noise = draw_reward_noise(ec, ctx_rng);
    const Vec& c_hat = draw.noisy_context;

    const Mat psi_star = fm.expected_features(oracle_predictive(ch, c_hat, env.gamma_star));
    const Vec star_scores = psi_star * env.theta_star;
    const Index best = argmax_score(psi_star, env.theta_star);
    auto mean_reward = [&](Index a) { return logistic ? sigmoid(star_scores(a)) : star_scores(a); };

    for (std::size_t i = 0; i < agents.size(); ++i) {
      Agent& ag = agents[i];

      Mat scoring;
      if (ag.alg == Algorithm::kAlg1) {
        scoring = fm.expected_features(predictive_posterior_unobserved(ch, ag.dn, c_hat));
      } else if (ag.alg == Algorithm::kAlg2Delayed) {
        scoring = fm.expected_features(predictive_posterior_delayed(ch, ag.dn, c_hat));
      } else if (ag.alg == Algorithm::kTsNaive) {
        scoring = fm.features(c_hat);
      } else {
        scoring = psi_star;
      }

      Index action = best;
      if (ag.alg != Algorithm::kOraclePolicy) {
        if (cfg.psi_mode == PsiMode::kRecompute && ag.alg == Algorithm::kAlg1 && !ag.played.empty()) {
          PolicyState fresh = recomputed_state(ag, ch, fm);
          fresh.frozen_features = ag.ps.frozen_features;
          fresh.rewards = ag.ps.rewards;
          ag.ps = std::move(fresh);
        }
        Vec theta;
        if (logistic) {
          if (ag.lmc_theta.size() == 0) ag.lmc_theta = std::sqrt(ec.lambda) * ag.rng.standard_normal(ec.m);
          theta = lmc_sample([&ag](const Vec& th) { return logistic_log_posterior_grad(ag.ps, th); }, ag.lmc_theta,
                             *cfg.lmc, t, ag.rng);
          ag.lmc_theta = theta;
        } else {
          theta = sample_theta(ag.ps, ag.rng);
        }
        action = argmax_score(scoring, theta);
      }

      const double reward = reward_from_noise(ec, env, action, draw.true_context, noise);
      switch (ag.alg) {
        case Algorithm::kAlg1:
          ag.ps = update(std::move(ag.ps), reward, scoring.row(action).transpose());
          if (cfg.psi_mode == PsiMode::kRecompute) {
            ag.played.push_back(action);
            ag.noisy_seen.push_back(c_hat);
          }
          ag.dn = absorb(std::move(ag.dn), c_hat);
          break;
        case Algorithm::kAlg2Delayed:
          ag.ps = update(std::move(ag.ps), reward, fm.feature(action, draw.true_context));
          ag.dn = absorb(std::move(ag.dn), c_hat, draw.true_context);
          break;
        case Algorithm::kTsNaive:
        case Algorithm::kTsOracle:
          ag.ps = update(std::move(ag.ps), reward, scoring.row(action).transpose());
          break;
        case Algorithm::kOraclePolicy:
          break;
      }

      const double instant = ag.alg == Algorithm::kOraclePolicy ? 0.0 : mean_reward(best) - mean_reward(action);
      ag.cumulative += instant;
      const std::size_t slot = i * static_cast<std::size_t>(ec.T) + static_cast<std::size_t>(t - 1);
      out.records[slot] = RegretRecord{trial, t, ag.alg, instant, ag.cumulative};
      out.actions[i][static_cast<std::size_t>(t - 1)] = action;
    }
  }
  return out;
}

void run_trials(const ExperimentConfig& cfg, int workers, const TrialSink& sink) {
  cfg.validate();
  const int n_workers = std::clamp(workers, 1, cfg.trials);

  std::mutex mu;
  std::map<int, TrialResult> pending;
  int next_to_emit = 0;
  std::exception_ptr failure;
  std::atomic<int> next{0};

  auto work = [&] {
    for (int trial = next++; trial < cfg.trials; trial = next++) {
      try {
        TrialResult tr = run_trial(cfg, trial);
        std::lock_guard lock(mu);
        if (failure) return;
        pending.emplace(trial, std::move(tr));
        for (auto it = pending.find(next_to_emit); it != pending.end(); it = pending.find(next_to_emit)) {
          sink(std::move(it->second));
          pending.erase(it);
          ++next_to_emit;
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = cfg.trials;
        return;
      }
    }
  };
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers) {
  ExperimentResult result{cfg, {}};
  result.trials.reserve(static_cast<std::size_t>(cfg.trials));
  run_trials(cfg, workers, [&](TrialResult&& tr) { result.trials.push_back(std::move(tr)); });
  return result;
}

// --- output ------------------------------------------------------------------

namespace {

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

void append_number(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void write_csv(std::ostream& out, const ExperimentResult& result) {
  out << kCsvHeader << '\n';
  for (const TrialResult& tr : result.trials) write_csv_rows(out, tr);
}

void write_csv_rows(std::ostream& out, const TrialResult& tr) {
  std::string line;
  for (const RegretRecord& r : tr.records) {
    line = std::to_string(r.trial);
    line += ',';
    line += std::to_string(r.t);
    line += ',';
    line += to_string(r.algorithm);
    line += ',';
    append_number(line, r.instant_regret);
    line += ',';
    append_number(line, r.cumulative_regret);
    line += '\n';
    out << line;
  }
}

json metadata_json(const ExperimentResult& result) {
  std::vector<TrialMeta> metas;
  for (const TrialResult& tr : result.trials) metas.push_back(tr.meta);
  return metadata_json(result.config, metas);
}

json metadata_json(const ExperimentConfig& cfg, const std::vector<TrialMeta>& metas) {
  json trials = json::array();
  for (const TrialMeta& meta : metas) {
    json entry = {{"trial", meta.trial},
                  {"feature_scale", meta.feature_scale},
                  {"norm_violation_rate", meta.norm_violation_rate}};
    entry["max_trace_gtg"] = std::isnan(meta.max_trace_gtg) ? json(nullptr) : json(meta.max_trace_gtg);
    trials.push_back(std::move(entry));
  }
  return {{"config", to_json(cfg)},
          {"csv_header", kCsvHeader},
          {"git_describe", git_describe()},
          {"seeding", "split_seed(master, trial, role) = mix64(mix64(mix64(master) ^ trial) ^ role); "
                      "roles env_init=1, contexts=2, policy=3"},
          {"trials", trials}};
}

void write_results(const ExperimentResult& result, const std::string& csv_path) {
  ensure_parent_dir(csv_path);
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open '" + csv_path + "' for writing");
  write_csv(csv, result);
  if (!csv) throw std::runtime_error("failed writing '" + csv_path + "'");

  const std::string meta_path = csv_path + ".meta.json";
  std::ofstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot open '" + meta_path + "' for writing");
  meta << metadata_json(result).dump(2) << '\n';
}

void run_to_files(const ExperimentConfig& cfg, int workers, const std::string& csv_path) {
  ensure_parent_dir(csv_path);
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open '" + csv_path + "' for writing");
  csv << kCsvHeader << '\n';
  std::vector<TrialMeta> metas;
  run_trials(cfg, workers, [&](TrialResult&& tr) {
    write_csv_rows(csv, tr);
    metas.push_back(tr.meta);
  });
  csv.close();
  if (!csv) throw std::runtime_error("failed writing '" + csv_path + "'");

  const std::string meta_path = csv_path + ".meta.json";
  std::ofstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot open '" + meta_path + "' for writing");
  meta << metadata_json(cfg, metas).dump(2) << '\n';
}

// --- bounds ------------------------------------------------------------------

namespace {

double isotropic_scale(const Mat& m, const char* name) {
  const double s = m(0, 0);
  if ((m - s * Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() > 1e-12 * std::abs(s)) {
    throw ConfigError(std::string("bounds require an isotropic ") + name + " (a multiple of the identity)");
  }
  return s;
}

}  // namespace

bounds::BoundInputs bound_inputs(const ExperimentConfig& cfg, double max_trace_gtg) {
  const EnvConfig& e = cfg.env;
  bounds::BoundInputs in;
  in.d = static_cast<double>(e.d);
  in.m = static_cast<double>(e.m);
  in.K = static_cast<double>(e.K);
  in.T = static_cast<double>(e.T);
  in.sigma2 = e.sigma2;
  in.lambda = e.lambda;
  in.sigma_c2 = isotropic_scale(e.Sigma_c, "Sigma_c");
  in.sigma_n2 = isotropic_scale(e.Sigma_n, "Sigma_n");
  in.sigma_gamma2 = isotropic_scale(e.Sigma_gamma, "Sigma_gamma");
  in.delta = cfg.delta;
  in.max_trace_gtg = std::isnan(max_trace_gtg) ? 1.0 : max_trace_gtg;
  return in;
}

double resolve_max_trace(const ExperimentConfig& cfg) {
  if (cfg.env.feature_map != FeatureKind::kLinearGa) return kNaN;
  double best = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(split_seed(cfg.env.seed, static_cast<std::uint64_t>(trial), StreamRole::kEnvInit));
    best = std::min(best, init_env(cfg.env, rng).features.max_trace_gtg());
  }
  return best;
}

std::vector<BoundsRow> bounds_table(const ExperimentConfig& cfg, double max_trace_gtg) {
  const bounds::BoundInputs base = bound_inputs(cfg, max_trace_gtg);
  const bool linear = cfg.env.feature_map == FeatureKind::kLinearGa && cfg.env.m == cfg.env.d;
  std::vector<BoundsRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.env.T));
  double mi_exact = 0.0;
  for (Index t = 1; t <= cfg.env.T; ++t) {
    bounds::BoundInputs in = base;
    in.T = static_cast<double>(t);
    BoundsRow row;
    row.t = t;
    row.theorem1 = kNaN;
    if (linear) {
      try {
        row.theorem1 = bounds::theorem1_bound(in);
      } catch (const bounds::HypothesisError&) {
      }
    }
    row.theorem2 = bounds::theorem2_bound(in);
    row.u_bound = bounds::u_bound(in);
    row.mi_delayed = bounds::mi_delayed(in);
    mi_exact += bounds::mi_term_unobserved(in, static_cast<double>(t));
    row.mi_unobserved_exact = mi_exact;
    row.mi_unobserved_bound = bounds::mi_sum_unobserved(in).bound;
    rows.push_back(row);
  }
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundsRow>& rows) {
  out << kBoundsHeader << '\n';
  std::string line;
  for (const BoundsRow& r : rows) {
    line = std::to_string(r.t);
    for (double v : {r.theorem1, r.theorem2, r.u_bound, r.mi_delayed, r.mi_unobserved_exact, r.mi_unobserved_bound}) {
      line += ',';
      append_number(line, v);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace noisyts
