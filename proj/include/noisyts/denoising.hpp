#pragma once

#include "noisyts/environment.hpp"
#include "noisyts/gaussian.hpp"

#include <optional>

namespace noisyts {

/// Known context law P(c) = N(mu_c, Sigma_c), channel c_hat = c + gamma* + n
/// with n ~ N(0, Sigma_n), and prior gamma* ~ N(0, Sigma_gamma), together
/// with the precision-domain quantities every closed form reuses:
///
///   M = Sigma_c^-1 + Sigma_n^-1
///   G = Sigma_n^-1 - Sigma_n^-1 M^-1 Sigma_n^-1      (equals (Sigma_c + Sigma_n)^-1)
class ChannelModel {
 public:
  ChannelModel(Vec mu_c, const Mat& sigma_c, const Mat& sigma_n, const Mat& sigma_gamma);
  static ChannelModel from_config(const EnvConfig& cfg);

  Index dim() const { return mu_c_.size(); }
  const Vec& mu_c() const { return mu_c_; }
  const Mat& sigma_c() const { return sigma_c_; }
  const Mat& sigma_n() const { return sigma_n_; }
  const Mat& sigma_gamma() const { return sigma_gamma_; }

  const Mat& sigma_c_inv() const { return sigma_c_inv_; }
  const Mat& sigma_n_inv() const { return sigma_n_inv_; }
  const Mat& sigma_gamma_inv() const { return sigma_gamma_inv_; }
  const Mat& m() const { return m_; }
  const Mat& m_inv() const { return m_inv_; }
  const Mat& g() const { return g_; }
  /// Sigma_n^-1 M^-1 Sigma_n^-1.
  const Mat& n_minv_n() const { return n_minv_n_; }
  /// Sigma_c^-1 mu_c.
  const Vec& prior_info() const { return prior_info_; }

 private:
  Vec mu_c_;
  Mat sigma_c_, sigma_n_, sigma_gamma_;
  Mat sigma_c_inv_, sigma_n_inv_, sigma_gamma_inv_;
  Mat m_, m_inv_, g_, n_minv_n_;
  Vec prior_info_;
};

/// Sufficient statistics of the context history for one setting.
///
/// t is the index of the upcoming round (1 before anything is absorbed).
/// noisy_sum = sum of past c_hat (unobserved setting); offset_sum = sum of
/// past (c_hat - c) (delayed setting).
struct DenoiseState {
  Setting setting = Setting::kUnobserved;
  Vec noisy_sum;
  Vec offset_sum;
  Index t = 1;

  static DenoiseState initial(Setting setting, Index d);
  Index observations() const { return t - 1; }
};

/// Absorb one round. true_context must be given exactly in the delayed setting.
DenoiseState absorb(DenoiseState state, const Vec& noisy_context,
                    const std::optional<Vec>& true_context = std::nullopt);

/// P(c | c_hat, gamma*) = N(A, M^-1), A = M^-1 (Sigma_c^-1 mu_c + Sigma_n^-1 (c_hat - gamma*)).
Gaussian oracle_predictive(const ChannelModel& ch, const Vec& noisy_context, const Vec& gamma_star);

/// P(gamma* | past noisy contexts) = N(N_t^-1 (G S - (t-1) G mu_c), N_t^-1), N_t = (t-1) G + Sigma_gamma^-1,
/// with S the sum of past noisy contexts. The G mu_c term is computed as Sigma_n^-1 M^-1 Sigma_c^-1 mu_c.
Gaussian gamma_posterior_unobserved(const ChannelModel& ch, const DenoiseState& state);

/// P(gamma* | past (c, c_hat) pairs) = N(W_t^-1 Sigma_n^-1 S, W_t^-1), W_t = (t-1) Sigma_n^-1 + Sigma_gamma^-1,
/// with S the sum of past (c_hat - c).
Gaussian gamma_posterior_delayed(const ChannelModel& ch, const DenoiseState& state);

/// Closed-form predictive posterior N(V_t, R_t^-1) of the current true context
/// given the current noisy context and past noisy contexts.
Gaussian predictive_posterior_unobserved(const ChannelModel& ch, const DenoiseState& state,
                                         const Vec& noisy_context);

/// Closed-form predictive posterior N(V~_t, R~_t^-1) when past true contexts are known.
Gaussian predictive_posterior_delayed(const ChannelModel& ch, const DenoiseState& state, const Vec& noisy_context);

/// Dispatches on state.setting.
Gaussian predictive_posterior(const ChannelModel& ch, const DenoiseState& state, const Vec& noisy_context);

}  // namespace noisyts
