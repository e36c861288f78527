#include "noisyts/linalg.hpp"

#include <cmath>
#include <sstream>

namespace noisyts {

Mat symmetrize(const Mat& a) {
  require_square(a, "symmetrize");
  return 0.5 * (a + a.transpose());
}

SpdFactor::SpdFactor(const Mat& a, const char* what) : factored_(symmetrize(a)) {
  if (!factored_.allFinite()) {
    throw NumericalError(std::string(what) + ": non-finite entries");
  }
  llt_.compute(factored_);
  if (llt_.info() == Eigen::Success) return;

  const Index n = factored_.rows();
  const double jitter = n > 0 ? 1e-10 * factored_.trace() / static_cast<double>(n) : 0.0;
  if (jitter > 0.0) {
    factored_.diagonal().array() += jitter;
    jittered_ = true;
    llt_.compute(factored_);
    if (llt_.info() == Eigen::Success) return;
  }
  std::ostringstream msg;
  msg << what << ": Cholesky factorization failed (matrix is not positive definite";
  if (jittered_) msg << " after jitter " << jitter;
  msg << ")";
  throw NumericalError(msg.str());
}

Mat SpdFactor::inverse() const {
  const Index n = dim();
  return symmetrize(llt_.solve(Mat::Identity(n, n)));
}

double SpdFactor::log_det() const {
  const Mat& lu = llt_.matrixLLT();
  return 2.0 * lu.diagonal().array().log().sum();
}

double relative_error(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("relative_error: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  const double diff = (a - b).cwiseAbs().maxCoeff();
  const double scale = b.cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

double relative_error(const Vec& a, const Vec& b) {
  return relative_error(Mat(a), Mat(b));
}

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << what << ": expected a square matrix, got " << a.rows() << "x" << a.cols();
    throw std::invalid_argument(msg.str());
  }
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace noisyts
