#include "noisyts/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace noisyts {

Gaussian::Gaussian(Vec mean, const Mat& cov) : mean_(std::move(mean)), factor_(cov, "Gaussian covariance") {
  require_same_dim(mean_.size(), factor_.dim(), "Gaussian mean/cov");
  if (mean_.size() == 0) throw std::invalid_argument("Gaussian: zero dimension");
  if (!mean_.allFinite()) throw std::invalid_argument("Gaussian: non-finite mean");
}

Gaussian Gaussian::standard(Index n) { return Gaussian(Vec::Zero(n), Mat::Identity(n, n)); }

Gaussian Gaussian::isotropic(Vec mean, double variance) {
  const Index n = mean.size();
  return Gaussian(std::move(mean), variance * Mat::Identity(n, n));
}

Vec Gaussian::sample(Rng& rng) const {
  return mean_ + factor_.llt().matrixL() * rng.standard_normal(dim());
}

double Gaussian::entropy() const {
  const double n = static_cast<double>(dim());
  return 0.5 * (n * std::log(2.0 * std::numbers::pi * std::numbers::e) + factor_.log_det());
}

double Gaussian::log_density(const Vec& x) const {
  require_same_dim(x.size(), dim(), "log_density");
  const Vec diff = x - mean_;
  const Vec w = factor_.llt().matrixL().solve(diff);
  const double n = static_cast<double>(dim());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + factor_.log_det() + w.squaredNorm());
}

JointGaussian::JointGaussian(Gaussian joint, const std::vector<std::pair<std::string, Index>>& blocks)
    : joint_(std::move(joint)) {
  Index offset = 0;
  for (const auto& [name, size] : blocks) {
    if (size <= 0) throw std::invalid_argument("JointGaussian: block '" + name + "' has no size");
    for (const auto& b : blocks_) {
      if (b.name == name) throw std::invalid_argument("JointGaussian: duplicate block '" + name + "'");
    }
    blocks_.push_back({name, offset, size});
    offset += size;
  }
  if (offset != joint_.dim()) {
    std::ostringstream msg;
    msg << "JointGaussian: blocks cover " << offset << " of " << joint_.dim() << " dimensions";
    throw std::invalid_argument(msg.str());
  }
}

const JointGaussian::Block& JointGaussian::block(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw std::invalid_argument("JointGaussian: no block named '" + name + "'");
}

Gaussian JointGaussian::marginal(const std::string& name) const {
  const Block& b = block(name);
  return Gaussian(joint_.mean().segment(b.offset, b.size), joint_.cov().block(b.offset, b.offset, b.size, b.size));
}

Gaussian condition(const JointGaussian& joint, const std::string& observed_block, const Vec& observed_value) {
  const auto& obs = joint.block(observed_block);
  require_same_dim(observed_value.size(), obs.size, "condition observed value");

  const Index n = joint.joint().dim();
  std::vector<Index> rest;
  for (Index i = 0; i < n; ++i) {
    if (i < obs.offset || i >= obs.offset + obs.size) rest.push_back(i);
  }
  if (rest.empty()) throw std::invalid_argument("condition: nothing left to condition");

  const Mat& cov = joint.joint().cov();
  const Vec& mean = joint.joint().mean();
  const Index r = static_cast<Index>(rest.size());
  Mat s_rr(r, r);
  Mat s_ro(r, obs.size);
  Vec mu_r(r);
  for (Index i = 0; i < r; ++i) {
    mu_r(i) = mean(rest[i]);
    for (Index j = 0; j < r; ++j) s_rr(i, j) = cov(rest[i], rest[j]);
    for (Index j = 0; j < obs.size; ++j) s_ro(i, j) = cov(rest[i], obs.offset + j);
  }
  const SpdFactor s_oo(cov.block(obs.offset, obs.offset, obs.size, obs.size), "condition: observed-block covariance");
  const Vec innovation = observed_value - mean.segment(obs.offset, obs.size);
  const Mat gain = s_oo.solve(Mat(s_ro.transpose())).transpose();
  return Gaussian(mu_r + gain * innovation, s_rr - gain * s_ro.transpose());
}

double kl(const Gaussian& p, const Gaussian& q) {
  require_same_dim(p.dim(), q.dim(), "kl");
  const double n = static_cast<double>(p.dim());
  const Vec diff = q.mean() - p.mean();
  const double trace_term = q.factor().solve(p.cov()).trace();
  const double quad = diff.dot(q.factor().solve(diff));
  const double value = 0.5 * (trace_term + quad - n + q.factor().log_det() - p.factor().log_det());
  return std::max(0.0, value);
}

Gaussian affine_marginal(const Mat& a, const Vec& b, const Gaussian& x_law, const Mat& noise_cov) {
  require_same_dim(a.cols(), x_law.dim(), "affine_marginal map/law");
  require_same_dim(a.rows(), b.size(), "affine_marginal map/offset");
  require_square(noise_cov, "affine_marginal noise covariance");
  require_same_dim(noise_cov.rows(), a.rows(), "affine_marginal noise covariance");
  return Gaussian(a * x_law.mean() + b, a * x_law.cov() * a.transpose() + noise_cov);
}

}  // namespace noisyts
