#pragma once

#include "noisyts/linalg.hpp"
#include "noisyts/rng.hpp"

#include <string>
#include <vector>

namespace noisyts {

/// Multivariate normal N(mean, cov).
///
/// The covariance is symmetrized on construction and must factor under the
/// jitter policy of SpdFactor; the stored covariance is the matrix that was
/// actually factored. Immutable after construction.
class Gaussian {
 public:
  Gaussian(Vec mean, const Mat& cov);

  /// N(0, I_n).
  static Gaussian standard(Index n);
  /// N(mean, variance * I).
  static Gaussian isotropic(Vec mean, double variance);

  Index dim() const { return mean_.size(); }
  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return factor_.matrix(); }
  const SpdFactor& factor() const { return factor_; }

  /// mean + L z with cov = L L^T and z ~ N(0, I).
  Vec sample(Rng& rng) const;
  /// 0.5 * log((2 pi e)^n det cov).
  double entropy() const;
  double log_density(const Vec& x) const;

 private:
  Vec mean_;
  SpdFactor factor_;
};

/// A Gaussian over concatenated variables with named, contiguous blocks.
class JointGaussian {
 public:
  struct Block {
    std::string name;
    Index offset;
    Index size;
  };

  /// Blocks are laid out in the given order and must cover the full dimension.
  JointGaussian(Gaussian joint, const std::vector<std::pair<std::string, Index>>& blocks);

  const Gaussian& joint() const { return joint_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(const std::string& name) const;

  /// Marginal law of one block.
  Gaussian marginal(const std::string& name) const;

 private:
  Gaussian joint_;
  std::vector<Block> blocks_;
};

/// Conditional law of all blocks other than `observed_block` (in block order)
/// given observed_block = observed_value.
Gaussian condition(const JointGaussian& joint, const std::string& observed_block,
                   const Vec& observed_value);

/// KL(p || q), clamped at zero from below.
double kl(const Gaussian& p, const Gaussian& q);

/// Law of a x + b + eps with x ~ x_law and eps ~ N(0, noise_cov).
Gaussian affine_marginal(const Mat& a, const Vec& b, const Gaussian& x_law, const Mat& noise_cov);

}  // namespace noisyts
