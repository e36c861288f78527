#pragma once

#include "noisyts/denoising.hpp"
#include "noisyts/environment.hpp"
#include "noisyts/gaussian.hpp"

#include <functional>
#include <vector>

namespace noisyts {

/// Sufficient statistics of a linear-Gaussian sampling distribution over theta.
///
///   precision    = I / lambda + sum_tau f_tau f_tau^T / sigma2
///   weighted_sum = sum_tau r_tau f_tau / sigma2
///
/// The sampling law is N(precision^-1 weighted_sum, precision^-1). Features
/// are frozen at the value used in their own round; the logistic sampler reads
/// them back together with the rewards.
struct PolicyState {
  Mat precision;
  Vec weighted_sum;
  std::vector<Vec> frozen_features;
  std::vector<double> rewards;
  double lambda = 1.0;
  double sigma2 = 1.0;

  static PolicyState prior(Index m, double lambda, double sigma2);
  Index dim() const { return weighted_sum.size(); }
};

/// Rank-one accumulation of one played round. Pass the state by move to avoid
/// copying the feature log: `ps = update(std::move(ps), r, f);`
PolicyState update(PolicyState ps, double reward, const Vec& feature_used);

/// Recompute precision and weighted sum from the frozen features and rewards.
PolicyState rebuild(const PolicyState& ps);

Vec posterior_mean(const PolicyState& ps);
Gaussian sampling_law(const PolicyState& ps);
/// theta = mean + L^-T z where precision = L L^T.
Vec sample_theta(const PolicyState& ps, Rng& rng);

struct ActionChoice {
  Index action = 0;
  Vec sampled_theta;
  /// K x m matrix of the features the action was ranked by.
  Mat expected_features;
};

/// Row index maximizing features * theta; ties go to the lowest index.
Index argmax_score(const Mat& features, const Vec& theta);
ActionChoice choose(Mat features, Vec theta);

/// Bayesian oracle: psi(a, c_hat | gamma*)^T theta*.
ActionChoice oracle_act(const EnvState& env, const ChannelModel& ch, const Vec& noisy_context);

/// alg1: theta ~ N(mu_{t-1}, Sigma_{t-1}^-1), features from the
/// predictive posterior given past noisy contexts.
ActionChoice ts_act_unobserved(const PolicyState& ps, const DenoiseState& dn, const ChannelModel& ch,
                               const FeatureMap& fm, const Vec& noisy_context, Rng& rng);

/// Delayed-context TS: ps holds the exact posterior built on phi(a_tau, c_tau);
/// features from the predictive posterior given past (c, c_hat) pairs.
ActionChoice ts_act_delayed(const PolicyState& ps, const DenoiseState& dn, const ChannelModel& ch,
                            const FeatureMap& fm, const Vec& noisy_context, Rng& rng);

/// TS_naive: treats c_hat as the context, phi(a, c_hat)^T theta.
ActionChoice naive_act(const PolicyState& ps, const FeatureMap& fm, const Vec& noisy_context, Rng& rng);

/// TS_oracle: exact denoising with the true gamma*, psi(a, c_hat | gamma*)^T theta.
ActionChoice ts_oracle_act(const PolicyState& ps, const EnvState& env, const ChannelModel& ch,
                           const Vec& noisy_context, Rng& rng);

// --- Langevin Monte Carlo -------------------------------------------------

struct LmcConfig {
  int steps = 50;
  double lr0 = 0.2;        // step size at bandit round t is lr0 / t
  double beta_inv = 0.001;  // inverse temperature

  void validate() const;
};

using GradientFn = std::function<Vec(const Vec&)>;

/// theta <- theta + eta grad(theta) + sqrt(2 eta beta_inv) z, repeated cfg.steps
/// times with eta = cfg.lr0 / round. Throws NumericalError on a non-finite
/// gradient or iterate.
Vec lmc_sample(const GradientFn& log_post_grad, Vec init, const LmcConfig& cfg, Index round, Rng& rng);

/// log N(theta; 0, lambda I) + sum_tau log Ber(r_tau; sigmoid(f_tau^T theta)), up to a constant.
double logistic_log_posterior(const PolicyState& ps, const Vec& theta);
Vec logistic_log_posterior_grad(const PolicyState& ps, const Vec& theta);

/// Logistic TS step: LMC on the sampling density of ps, warm-started at
/// `warm_start`, then argmax of scoring_features * theta.
ActionChoice lmc_act(const PolicyState& ps, Mat scoring_features, const Vec& warm_start, const LmcConfig& cfg,
                     Index round, Rng& rng);

}  // namespace noisyts
