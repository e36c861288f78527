#include "noisyts/policies.hpp"

#include <cmath>

namespace noisyts {

PolicyState PolicyState::prior(Index m, double lambda, double sigma2) {
  if (!(lambda > 0.0) || !(sigma2 > 0.0)) throw std::invalid_argument("PolicyState: lambda and sigma2 must be > 0");
  PolicyState ps;
  ps.precision = Mat::Identity(m, m) / lambda;
  ps.weighted_sum = Vec::Zero(m);
  ps.lambda = lambda;
  ps.sigma2 = sigma2;
  return ps;
}

PolicyState update(PolicyState ps, double reward, const Vec& feature_used) {
  require_same_dim(feature_used.size(), ps.dim(), "update feature");
  ps.precision.selfadjointView<Eigen::Lower>().rankUpdate(feature_used, 1.0 / ps.sigma2);
  ps.precision.triangularView<Eigen::StrictlyUpper>() = ps.precision.transpose();
  ps.weighted_sum += (reward / ps.sigma2) * feature_used;
  ps.frozen_features.push_back(feature_used);
  ps.rewards.push_back(reward);
  return ps;
}

PolicyState rebuild(const PolicyState& ps) {
  PolicyState out = PolicyState::prior(ps.dim(), ps.lambda, ps.sigma2);
  for (std::size_t i = 0; i < ps.frozen_features.size(); ++i) {
    out = update(std::move(out), ps.rewards[i], ps.frozen_features[i]);
  }
  return out;
}

Vec posterior_mean(const PolicyState& ps) { return SpdFactor(ps.precision, "policy precision").solve(ps.weighted_sum); }

Gaussian sampling_law(const PolicyState& ps) {
  const SpdFactor factor(ps.precision, "policy precision");
  return Gaussian(factor.solve(ps.weighted_sum), factor.inverse());
}

Vec sample_theta(const PolicyState& ps, Rng& rng) {
  const SpdFactor factor(ps.precision, "policy precision");
  const Vec mean = factor.solve(ps.weighted_sum);
  const Vec z = rng.standard_normal(ps.dim());
  return mean + factor.llt().matrixU().solve(z);
}

Index argmax_score(const Mat& features, const Vec& theta) {
  require_same_dim(features.cols(), theta.size(), "argmax_score");
  if (features.rows() == 0) throw std::invalid_argument("argmax_score: empty action set");
  const Vec scores = features * theta;
  Index best = 0;
  for (Index a = 1; a < scores.size(); ++a) {
    if (scores(a) > scores(best)) best = a;
  }
  return best;
}

ActionChoice choose(Mat features, Vec theta) {
  const Index a = argmax_score(features, theta);
  return ActionChoice{a, std::move(theta), std::move(features)};
}

ActionChoice oracle_act(const EnvState& env, const ChannelModel& ch, const Vec& noisy_context) {
  return choose(env.features.expected_features(oracle_predictive(ch, noisy_context, env.gamma_star)),
                env.theta_star);
}

ActionChoice ts_act_unobserved(const PolicyState& ps, const DenoiseState& dn, const ChannelModel& ch,
                               const FeatureMap& fm, const Vec& noisy_context, Rng& rng) {
  Mat psi = fm.expected_features(predictive_posterior_unobserved(ch, dn, noisy_context));
  return choose(std::move(psi), sample_theta(ps, rng));
}

ActionChoice ts_act_delayed(const PolicyState& ps, const DenoiseState& dn, const ChannelModel& ch,
                            const FeatureMap& fm, const Vec& noisy_context, Rng& rng) {
  Mat psi = fm.expected_features(predictive_posterior_delayed(ch, dn, noisy_context));
  return choose(std::move(psi), sample_theta(ps, rng));
}

ActionChoice naive_act(const PolicyState& ps, const FeatureMap& fm, const Vec& noisy_context, Rng& rng) {
  return choose(fm.features(noisy_context), sample_theta(ps, rng));
}

ActionChoice ts_oracle_act(const PolicyState& ps, const EnvState& env, const ChannelModel& ch,
                           const Vec& noisy_context, Rng& rng) {
  Mat psi = env.features.expected_features(oracle_predictive(ch, noisy_context, env.gamma_star));
  return choose(std::move(psi), sample_theta(ps, rng));
}

void LmcConfig::validate() const {
  if (steps < 0) throw std::invalid_argument("LmcConfig: steps must be >= 0");
  if (!(lr0 > 0.0)) throw std::invalid_argument("LmcConfig: lr0 must be > 0");
  if (!(beta_inv > 0.0)) throw std::invalid_argument("LmcConfig: beta_inv must be > 0");
}

Vec lmc_sample(const GradientFn& log_post_grad, Vec init, const LmcConfig& cfg, Index round, Rng& rng) {
  cfg.validate();
  if (round < 1) throw std::invalid_argument("lmc_sample: round must be >= 1");
  const double eta = cfg.lr0 / static_cast<double>(round);
  const double noise_scale = std::sqrt(2.0 * eta * cfg.beta_inv);
  Vec theta = std::move(init);
  for (int k = 0; k < cfg.steps; ++k) {
    const Vec grad = log_post_grad(theta);
    if (!grad.allFinite()) throw NumericalError("lmc_sample: non-finite gradient");
    theta += eta * grad + noise_scale * rng.standard_normal(theta.size());
    if (!theta.allFinite()) throw NumericalError("lmc_sample: iterate diverged");
  }
  return theta;
}

namespace {

// log sigmoid(z), stable for large |z|.
double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

}  // namespace

double logistic_log_posterior(const PolicyState& ps, const Vec& theta) {
  require_same_dim(theta.size(), ps.dim(), "logistic_log_posterior");
  double value = -0.5 * theta.squaredNorm() / ps.lambda;
  for (std::size_t i = 0; i < ps.frozen_features.size(); ++i) {
    const double z = ps.frozen_features[i].dot(theta);
    value += ps.rewards[i] * log_sigmoid(z) + (1.0 - ps.rewards[i]) * log_sigmoid(-z);
  }
  return value;
}

Vec logistic_log_posterior_grad(const PolicyState& ps, const Vec& theta) {
  require_same_dim(theta.size(), ps.dim(), "logistic_log_posterior_grad");
  Vec grad = -theta / ps.lambda;
  for (std::size_t i = 0; i < ps.frozen_features.size(); ++i) {
    const Vec& f = ps.frozen_features[i];
    grad += (ps.rewards[i] - sigmoid(f.dot(theta))) * f;
  }
  return grad;
}

ActionChoice lmc_act(const PolicyState& ps, Mat scoring_features, const Vec& warm_start, const LmcConfig& cfg,
                     Index round, Rng& rng) {
  Vec theta = lmc_sample([&ps](const Vec& th) { return logistic_log_posterior_grad(ps, th); }, warm_start, cfg,
                         round, rng);
  return choose(std::move(scoring_features), std::move(theta));
}

}  // namespace noisyts
