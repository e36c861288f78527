#pragma once

#include "noisyts/gaussian.hpp"
#include "noisyts/linalg.hpp"
#include "noisyts/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace noisyts {

enum class RewardFamily { kGaussian, kLogistic };
enum class Setting { kUnobserved, kDelayed };
enum class FeatureKind { kQuadratic, kLinearGa };

std::string to_string(RewardFamily f);
std::string to_string(Setting s);
std::string to_string(FeatureKind k);
RewardFamily parse_reward_family(const std::string& s);
Setting parse_setting(const std::string& s);
FeatureKind parse_feature_kind(const std::string& s);

/// Feature dimension implied by the kind: 3d for quadratic, d for linear_ga.
Index feature_dim(FeatureKind kind, Index d);

struct EnvConfig {
  Index d = 5;
  Index m = 15;
  Index K = 40;
  Index T = 2000;
  double sigma2 = 2.0;   // reward noise variance
  double lambda = 0.01;  // prior variance of each theta* coordinate
  Vec mu_c;
  Mat Sigma_c;
  Mat Sigma_n;
  Mat Sigma_gamma;
  RewardFamily reward_family = RewardFamily::kGaussian;
  Setting setting = Setting::kUnobserved;
  FeatureKind feature_map = FeatureKind::kQuadratic;
  /// When false the feature scale is fixed at 1 instead of the percentile rule.
  bool normalize_features = true;
  std::uint64_t seed = 0;

  /// Isotropic configuration with the given variances and mu_c = 0.
  static EnvConfig isotropic(Index d, Index K, Index T, double sigma_c2, double sigma_n2, double sigma_gamma2,
                             FeatureKind kind = FeatureKind::kQuadratic);

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Map (action index, context) -> R^m, divided by a positive scale.
///
/// quadratic: phi(a, c) = [a_i^2, c_i^2, a_i c_i] (m = 3d).
/// linear_ga: phi(a, c) = G(a) c (m = d).
class FeatureMap {
 public:
  FeatureMap(FeatureKind kind, std::vector<Vec> actions, std::vector<Mat> gains, double scale);

  static FeatureMap quadratic(std::vector<Vec> actions, double scale = 1.0);
  static FeatureMap linear(std::vector<Mat> gains, double scale = 1.0);

  FeatureKind kind() const { return kind_; }
  Index context_dim() const { return d_; }
  Index dim() const { return feature_dim(kind_, d_); }
  Index action_count() const { return k_; }
  double scale() const { return scale_; }
  const std::vector<Vec>& actions() const { return actions_; }
  const std::vector<Mat>& gains() const { return gains_; }

  FeatureMap with_scale(double scale) const;

  Vec feature(Index action, const Vec& context) const;
  /// K x m, row a = phi(a, context).
  Mat features(const Vec& context) const;
  /// Closed-form E[phi(a, c)] under c ~ law.
  Vec expected_feature(Index action, const Gaussian& law) const;
  /// K x m, row a = E[phi(a, c)].
  Mat expected_features(const Gaussian& law) const;

  /// max_a Tr(G(a)^T G(a)) of the scaled linear map; throws for quadratic.
  double max_trace_gtg() const;

 private:
  FeatureKind kind_;
  std::vector<Vec> actions_;
  std::vector<Mat> gains_;
  double scale_;
  Index d_ = 0;
  Index k_ = 0;
};

struct EnvState {
  Vec theta_star;
  Vec gamma_star;
  FeatureMap features;
  /// Lower Cholesky factors of Sigma_c and Sigma_n, cached for context draws.
  Mat context_factor;
  Mat noise_factor;
  /// Fraction of the scale-estimation draws with ||phi|| > 1 after scaling.
  double norm_violation_rate = 0.0;
};

struct ContextDraw {
  Vec true_context;
  Vec noisy_context;
};

/// Pre-drawn reward randomness. Sharing one draw across algorithms gives
/// common random numbers: a Gaussian reward is phi^T theta* + noise and a
/// logistic reward is 1 when uniform < sigmoid(phi^T theta*).
struct RewardNoise {
  double gaussian = 0.0;
  double uniform = 0.5;
};

struct HistoryRecord {
  Index t;
  double reward;
  Index action;
  Vec noisy_context;
  std::optional<Vec> true_context;
};

/// Append-only per-trial log.
class History {
 public:
  explicit History(Setting setting) : setting_(setting) {}

  void append(double reward, Index action, Vec noisy_context, std::optional<Vec> true_context = std::nullopt);
  const std::vector<HistoryRecord>& records() const { return records_; }
  Setting setting() const { return setting_; }
  std::size_t size() const { return records_.size(); }

 private:
  Setting setting_;
  std::vector<HistoryRecord> records_;
};

/// Number of prior draws used to estimate the feature scale.
inline constexpr int kScaleDraws = 10000;
inline constexpr double kScalePercentile = 0.999;

double sigmoid(double z);

/// Sample theta* ~ N(0, lambda I), gamma* ~ N(0, Sigma_gamma), K actions
/// uniform on the unit sphere (and random rotations G(a)/sqrt(d) for
/// linear_ga), then fix the feature scale to the 99.9th percentile of ||phi||
/// over kScaleDraws prior draws of (a, c).
EnvState init_env(const EnvConfig& cfg, Rng& rng);

ContextDraw gen_context(const EnvConfig& cfg, const EnvState& env, Rng& rng);

RewardNoise draw_reward_noise(const EnvConfig& cfg, Rng& rng);
double reward_from_noise(const EnvConfig& cfg, const EnvState& env, Index action, const Vec& true_context,
                         const RewardNoise& noise);
double gen_reward(const EnvConfig& cfg, const EnvState& env, Index action, const Vec& true_context, Rng& rng);

/// Mean reward phi(a, c)^T theta* (before the link function).
double mean_score(const EnvState& env, Index action, const Vec& context);

inline Vec expected_feature(const FeatureMap& fm, Index action, const Gaussian& context_law) {
  return fm.expected_feature(action, context_law);
}

}  // namespace noisyts
