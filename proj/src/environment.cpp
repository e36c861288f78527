#include "noisyts/environment.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace noisyts {

std::string to_string(RewardFamily f) { return f == RewardFamily::kGaussian ? "gaussian" : "logistic"; }
std::string to_string(Setting s) { return s == Setting::kUnobserved ? "unobserved" : "delayed"; }
std::string to_string(FeatureKind k) { return k == FeatureKind::kQuadratic ? "quadratic" : "linear_ga"; }

RewardFamily parse_reward_family(const std::string& s) {
  if (s == "gaussian") return RewardFamily::kGaussian;
  if (s == "logistic") return RewardFamily::kLogistic;
  throw std::invalid_argument("unknown reward_family '" + s + "' (expected gaussian|logistic)");
}

Setting parse_setting(const std::string& s) {
  if (s == "unobserved") return Setting::kUnobserved;
  if (s == "delayed") return Setting::kDelayed;
  throw std::invalid_argument("unknown setting '" + s + "' (expected unobserved|delayed)");
}

FeatureKind parse_feature_kind(const std::string& s) {
  if (s == "quadratic") return FeatureKind::kQuadratic;
  if (s == "linear_ga") return FeatureKind::kLinearGa;
  throw std::invalid_argument("unknown feature_map '" + s + "' (expected quadratic|linear_ga)");
}

Index feature_dim(FeatureKind kind, Index d) { return kind == FeatureKind::kQuadratic ? 3 * d : d; }

EnvConfig EnvConfig::isotropic(Index d, Index K, Index T, double sigma_c2, double sigma_n2, double sigma_gamma2,
                               FeatureKind kind) {
  EnvConfig cfg;
  cfg.d = d;
  cfg.m = feature_dim(kind, d);
  cfg.K = K;
  cfg.T = T;
  cfg.feature_map = kind;
  cfg.mu_c = Vec::Zero(d);
  cfg.Sigma_c = sigma_c2 * Mat::Identity(d, d);
  cfg.Sigma_n = sigma_n2 * Mat::Identity(d, d);
  cfg.Sigma_gamma = sigma_gamma2 * Mat::Identity(d, d);
  return cfg;
}

void EnvConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("EnvConfig: " + what); };
  if (d < 1) fail("d must be >= 1");
  if (K < 1) fail("K must be >= 1");
  if (T < 1) fail("T must be >= 1");
  if (!(sigma2 > 0.0)) fail("sigma2 must be > 0");
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (m != feature_dim(feature_map, d)) {
    std::ostringstream msg;
    msg << "m = " << m << " does not match the " << to_string(feature_map) << " feature map (expected "
        << feature_dim(feature_map, d) << ")";
    fail(msg.str());
  }
  if (mu_c.size() != d) fail("mu_c must have length d");
  const std::pair<const Mat*, const char*> covs[] = {
      {&Sigma_c, "Sigma_c"}, {&Sigma_n, "Sigma_n"}, {&Sigma_gamma, "Sigma_gamma"}};
  for (const auto& [cov, name] : covs) {
    if (cov->rows() != d || cov->cols() != d) fail(std::string(name) + " must be d x d");
    try {
      SpdFactor check(*cov, name);
    } catch (const NumericalError& e) {
      fail(std::string(name) + " is not positive definite");
    }
  }
}

FeatureMap::FeatureMap(FeatureKind kind, std::vector<Vec> actions, std::vector<Mat> gains, double scale)
    : kind_(kind), actions_(std::move(actions)), gains_(std::move(gains)), scale_(scale) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw std::invalid_argument("FeatureMap: scale must be positive");
  if (kind_ == FeatureKind::kQuadratic) {
    if (actions_.empty()) throw std::invalid_argument("FeatureMap: no actions");
    k_ = static_cast<Index>(actions_.size());
    d_ = actions_.front().size();
    for (const auto& a : actions_) require_same_dim(a.size(), d_, "FeatureMap action");
  } else {
    if (gains_.empty()) throw std::invalid_argument("FeatureMap: no gain matrices");
    k_ = static_cast<Index>(gains_.size());
    d_ = gains_.front().cols();
    for (const auto& g : gains_) {
      require_square(g, "FeatureMap gain");
      require_same_dim(g.cols(), d_, "FeatureMap gain");
    }
  }
}

FeatureMap FeatureMap::quadratic(std::vector<Vec> actions, double scale) {
  return FeatureMap(FeatureKind::kQuadratic, std::move(actions), {}, scale);
}

FeatureMap FeatureMap::linear(std::vector<Mat> gains, double scale) {
  return FeatureMap(FeatureKind::kLinearGa, {}, std::move(gains), scale);
}

FeatureMap FeatureMap::with_scale(double scale) const { return FeatureMap(kind_, actions_, gains_, scale); }

Vec FeatureMap::feature(Index action, const Vec& context) const {
  require_same_dim(context.size(), d_, "feature context");
  if (action < 0 || action >= k_) throw std::out_of_range("FeatureMap: action index out of range");
  if (kind_ == FeatureKind::kLinearGa) return gains_[action] * context / scale_;
  const Vec& a = actions_[action];
  Vec phi(3 * d_);
  phi.segment(0, d_) = a.array().square();
  phi.segment(d_, d_) = context.array().square();
  phi.segment(2 * d_, d_) = a.array() * context.array();
  return phi / scale_;
}

Mat FeatureMap::features(const Vec& context) const {
  Mat out(k_, dim());
  for (Index a = 0; a < k_; ++a) out.row(a) = feature(a, context).transpose();
  return out;
}

Vec FeatureMap::expected_feature(Index action, const Gaussian& law) const {
  require_same_dim(law.dim(), d_, "expected_feature law");
  if (action < 0 || action >= k_) throw std::out_of_range("FeatureMap: action index out of range");
  const Vec& mu = law.mean();
  if (kind_ == FeatureKind::kLinearGa) return gains_[action] * mu / scale_;
  const Vec& a = actions_[action];
  Vec psi(3 * d_);
  psi.segment(0, d_) = a.array().square();
  psi.segment(d_, d_) = mu.array().square() + law.cov().diagonal().array();
  psi.segment(2 * d_, d_) = a.array() * mu.array();
  return psi / scale_;
}

Mat FeatureMap::expected_features(const Gaussian& law) const {
  Mat out(k_, dim());
  for (Index a = 0; a < k_; ++a) out.row(a) = expected_feature(a, law).transpose();
  return out;
}

double FeatureMap::max_trace_gtg() const {
  if (kind_ != FeatureKind::kLinearGa) throw std::logic_error("max_trace_gtg: only defined for linear_ga");
  double best = 0.0;
  for (const auto& g : gains_) best = std::max(best, (g.transpose() * g).trace());
  return best / (scale_ * scale_);
}

void History::append(double reward, Index action, Vec noisy_context, std::optional<Vec> true_context) {
  const bool delayed = setting_ == Setting::kDelayed;
  if (delayed != true_context.has_value()) {
    throw std::invalid_argument(delayed ? "History: delayed setting requires the true context"
                                        : "History: unobserved setting must not record the true context");
  }
  const Index t = static_cast<Index>(records_.size()) + 1;
  records_.push_back({t, reward, action, std::move(noisy_context), std::move(true_context)});
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

Vec unit_sphere(Index d, Rng& rng) {
  Vec v = rng.standard_normal(d);
  double norm = v.norm();
  while (norm == 0.0) {
    v = rng.standard_normal(d);
    norm = v.norm();
  }
  return v / norm;
}

// Haar-distributed orthogonal matrix: Q of a Gaussian matrix with the signs of R's diagonal folded in.
Mat random_rotation(Index d, Rng& rng) {
  Mat z(d, d);
  for (Index j = 0; j < d; ++j) z.col(j) = rng.standard_normal(d);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

EnvState init_env(const EnvConfig& cfg, Rng& rng) {
  cfg.validate();
  const Index d = cfg.d;

  Vec theta = std::sqrt(cfg.lambda) * rng.standard_normal(cfg.m);
  const Gaussian gamma_prior(Vec::Zero(d), cfg.Sigma_gamma);
  Vec gamma = gamma_prior.sample(rng);

  std::vector<Vec> actions;
  actions.reserve(cfg.K);
  for (Index a = 0; a < cfg.K; ++a) actions.push_back(unit_sphere(d, rng));
  std::vector<Mat> gains;
  if (cfg.feature_map == FeatureKind::kLinearGa) {
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index a = 0; a < cfg.K; ++a) gains.push_back(inv_sqrt_d * random_rotation(d, rng));
  }
  FeatureMap raw(cfg.feature_map, std::move(actions), std::move(gains), 1.0);

  const Gaussian context_law(cfg.mu_c, cfg.Sigma_c);
  const Mat noise_factor = SpdFactor(cfg.Sigma_n, "Sigma_n").lower();

  double scale = 1.0;
  double violation = 0.0;
  if (cfg.normalize_features) {
    std::vector<double> norms(kScaleDraws);
    std::uniform_int_distribution<Index> pick(0, cfg.K - 1);
    for (auto& n : norms) {
      const Index a = pick(rng.engine());
      n = raw.feature(a, context_law.sample(rng)).norm();
    }
    std::vector<double> sorted = norms;
    const auto rank = static_cast<std::size_t>(std::ceil(kScalePercentile * kScaleDraws)) - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
    if (sorted[rank] > 0.0) scale = sorted[rank];
    violation = static_cast<double>(std::count_if(norms.begin(), norms.end(), [&](double n) { return n > scale; })) /
                kScaleDraws;
  }

  return EnvState{std::move(theta), std::move(gamma), raw.with_scale(scale), context_law.factor().lower(),
                  noise_factor, violation};
}

ContextDraw gen_context(const EnvConfig& cfg, const EnvState& env, Rng& rng) {
  const Index d = cfg.d;
  Vec c = cfg.mu_c + env.context_factor * rng.standard_normal(d);
  Vec noisy = c + env.gamma_star + env.noise_factor * rng.standard_normal(d);
  return {std::move(c), std::move(noisy)};
}

RewardNoise draw_reward_noise(const EnvConfig& cfg, Rng& rng) {
  RewardNoise noise;
  if (cfg.reward_family == RewardFamily::kGaussian) {
    noise.gaussian = rng.normal();
  } else {
    noise.uniform = rng.uniform();
  }
  return noise;
}

double mean_score(const EnvState& env, Index action, const Vec& context) {
  return env.features.feature(action, context).dot(env.theta_star);
}

double reward_from_noise(const EnvConfig& cfg, const EnvState& env, Index action, const Vec& true_context,
                         const RewardNoise& noise) {
  const double score = mean_score(env, action, true_context);
  if (cfg.reward_family == RewardFamily::kGaussian) return score + std::sqrt(cfg.sigma2) * noise.gaussian;
  return noise.uniform < sigmoid(score) ? 1.0 : 0.0;
}

double gen_reward(const EnvConfig& cfg, const EnvState& env, Index action, const Vec& true_context, Rng& rng) {
  return reward_from_noise(cfg, env, action, true_context, draw_reward_noise(cfg, rng));
}

}  // namespace noisyts
