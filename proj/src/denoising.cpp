#include "noisyts/denoising.hpp"

namespace noisyts {

ChannelModel::ChannelModel(Vec mu_c, const Mat& sigma_c, const Mat& sigma_n, const Mat& sigma_gamma)
    : mu_c_(std::move(mu_c)), sigma_c_(symmetrize(sigma_c)), sigma_n_(symmetrize(sigma_n)),
      sigma_gamma_(symmetrize(sigma_gamma)) {
  const Index d = mu_c_.size();
  require_same_dim(sigma_c_.rows(), d, "ChannelModel Sigma_c");
  require_same_dim(sigma_n_.rows(), d, "ChannelModel Sigma_n");
  require_same_dim(sigma_gamma_.rows(), d, "ChannelModel Sigma_gamma");

  sigma_c_inv_ = spd_inverse(sigma_c_, "Sigma_c");
  sigma_n_inv_ = spd_inverse(sigma_n_, "Sigma_n");
  sigma_gamma_inv_ = spd_inverse(sigma_gamma_, "Sigma_gamma");
  m_ = symmetrize(sigma_c_inv_ + sigma_n_inv_);
  m_inv_ = spd_inverse(m_, "M");
  n_minv_n_ = symmetrize(sigma_n_inv_ * m_inv_ * sigma_n_inv_);
  g_ = symmetrize(sigma_n_inv_ - n_minv_n_);
  prior_info_ = sigma_c_inv_ * mu_c_;
}

ChannelModel ChannelModel::from_config(const EnvConfig& cfg) {
  return ChannelModel(cfg.mu_c, cfg.Sigma_c, cfg.Sigma_n, cfg.Sigma_gamma);
}

DenoiseState DenoiseState::initial(Setting setting, Index d) {
  return DenoiseState{setting, Vec::Zero(d), Vec::Zero(d), 1};
}

DenoiseState absorb(DenoiseState state, const Vec& noisy_context, const std::optional<Vec>& true_context) {
  require_same_dim(noisy_context.size(), state.noisy_sum.size(), "absorb noisy context");
  if (state.setting == Setting::kDelayed) {
    if (!true_context) throw std::invalid_argument("absorb: delayed setting requires the true context");
    require_same_dim(true_context->size(), state.offset_sum.size(), "absorb true context");
    state.offset_sum += noisy_context - *true_context;
  } else if (true_context) {
    throw std::invalid_argument("absorb: true context supplied in the unobserved setting");
  }
  state.noisy_sum += noisy_context;
  ++state.t;
  return state;
}

Gaussian oracle_predictive(const ChannelModel& ch, const Vec& noisy_context, const Vec& gamma_star) {
  require_same_dim(noisy_context.size(), ch.dim(), "oracle_predictive noisy context");
  require_same_dim(gamma_star.size(), ch.dim(), "oracle_predictive gamma");
  Vec mean = ch.m_inv() * (ch.prior_info() + ch.sigma_n_inv() * (noisy_context - gamma_star));
  return Gaussian(std::move(mean), ch.m_inv());
}

namespace {

void require_setting(const DenoiseState& state, Setting expected, const char* what) {
  if (state.setting != expected) {
    throw std::invalid_argument(std::string(what) + ": state belongs to the " + to_string(state.setting) +
                                " setting");
  }
}

// Shared tail of both predictive posteriors: given H (precision of gamma in the
// joint with c) and the bracketed information vector, R = M - S H^-1 S and
// mean = R^-1 * info.
Gaussian predictive_from_h(const ChannelModel& ch, const Mat& h, const Vec& info_without_h,
                           const Vec& h_rhs) {
  const Mat& s = ch.sigma_n_inv();
  const SpdFactor h_factor(h, "H_t");
  const Mat r = symmetrize(ch.m() - s * h_factor.solve(s));
  const SpdFactor r_factor(r, "R_t");
  Vec mean = r_factor.solve(Vec(info_without_h - s * h_factor.solve(h_rhs)));
  return Gaussian(std::move(mean), r_factor.inverse());
}

}  // namespace

Gaussian gamma_posterior_unobserved(const ChannelModel& ch, const DenoiseState& state) {
  require_setting(state, Setting::kUnobserved, "gamma_posterior_unobserved");
  const double k = static_cast<double>(state.observations());
  const Mat n_t = symmetrize(k * ch.g() + ch.sigma_gamma_inv());
  const SpdFactor factor(n_t, "N_t");
  const Vec rhs = ch.g() * state.noisy_sum - k * (ch.sigma_n_inv() * (ch.m_inv() * ch.prior_info()));
  return Gaussian(factor.solve(rhs), factor.inverse());
}

Gaussian gamma_posterior_delayed(const ChannelModel& ch, const DenoiseState& state) {
  require_setting(state, Setting::kDelayed, "gamma_posterior_delayed");
  const double k = static_cast<double>(state.observations());
  const Mat w_t = symmetrize(k * ch.sigma_n_inv() + ch.sigma_gamma_inv());
  const SpdFactor factor(w_t, "W_t");
  return Gaussian(factor.solve(Vec(ch.sigma_n_inv() * state.offset_sum)), factor.inverse());
}

Gaussian predictive_posterior_unobserved(const ChannelModel& ch, const DenoiseState& state,
                                         const Vec& noisy_context) {
  require_setting(state, Setting::kUnobserved, "predictive_posterior_unobserved");
  require_same_dim(noisy_context.size(), ch.dim(), "predictive_posterior_unobserved noisy context");
  const Mat& s = ch.sigma_n_inv();
  const double k = static_cast<double>(state.observations());

  // H_t = (t-1) S - (t-2) S M^-1 S + Sigma_gamma^-1, with (t-2) = -1 kept at t = 1.
  const Mat h = k * s - (k - 1.0) * ch.n_minv_n() + ch.sigma_gamma_inv();

  // info = Sigma_c^-1 mu_c + S c_hat_t
  const Vec info = ch.prior_info() + s * noisy_context;
  // L_t^T = S M^-1 info + G sum(c_hat) - (t-1) S M^-1 Sigma_c^-1 mu_c
  const Vec s_minv = s * (ch.m_inv() * info);
  const Vec l_t = s_minv + ch.g() * state.noisy_sum - k * (s * (ch.m_inv() * ch.prior_info()));
  return predictive_from_h(ch, h, info, l_t);
}

Gaussian predictive_posterior_delayed(const ChannelModel& ch, const DenoiseState& state, const Vec& noisy_context) {
  require_setting(state, Setting::kDelayed, "predictive_posterior_delayed");
  require_same_dim(noisy_context.size(), ch.dim(), "predictive_posterior_delayed noisy context");
  const Mat& s = ch.sigma_n_inv();
  const double k = static_cast<double>(state.observations());

  // H~_t = S M^-1 S + (t-1) S + Sigma_gamma^-1
  const Mat h = ch.n_minv_n() + k * s + ch.sigma_gamma_inv();

  const Vec info = ch.prior_info() + s * noisy_context;
  // S (D + E_t) + W_t Y_t = S M^-1 info + S sum(c_hat - c)
  const Vec rhs = s * (ch.m_inv() * info) + s * state.offset_sum;
  return predictive_from_h(ch, h, info, rhs);
}

Gaussian predictive_posterior(const ChannelModel& ch, const DenoiseState& state, const Vec& noisy_context) {
  return state.setting == Setting::kUnobserved ? predictive_posterior_unobserved(ch, state, noisy_context)
                                               : predictive_posterior_delayed(ch, state, noisy_context);
}

}  // namespace noisyts
