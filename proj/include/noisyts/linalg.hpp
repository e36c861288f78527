#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace noisyts {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a matrix that must be positive definite is not, even after jitter.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (A + A^T) / 2. Requires a square matrix.
Mat symmetrize(const Mat& a);

/// Cholesky factorization with a single diagonal jitter retry.
///
/// If the plain factorization fails, 1e-10 * trace(a) / n is added to the
/// diagonal and the factorization is attempted once more. A second failure
/// throws NumericalError. `a` is symmetrized first; the matrix actually
/// factored (possibly jittered) is returned in `factored`.
class SpdFactor {
 public:
  explicit SpdFactor(const Mat& a, const char* what = "matrix");

  Index dim() const { return llt_.rows(); }
  const Mat& matrix() const { return factored_; }
  Mat lower() const { return llt_.matrixL(); }
  bool jittered() const { return jittered_; }

  Vec solve(const Vec& b) const { return llt_.solve(b); }
  Mat solve(const Mat& b) const { return llt_.solve(b); }
  /// Inverse assembled from the factor, symmetrized.
  Mat inverse() const;
  double log_det() const;

  const Eigen::LLT<Mat>& llt() const { return llt_; }

 private:
  Mat factored_;
  Eigen::LLT<Mat> llt_;
  bool jittered_ = false;
};

/// Inverse of a symmetric positive definite matrix through its Cholesky factor.
inline Mat spd_inverse(const Mat& a, const char* what = "matrix") {
  return SpdFactor(a, what).inverse();
}

/// Max-norm relative error max|a - b| / max|b| (absolute when b is zero).
double relative_error(const Mat& a, const Mat& b);
double relative_error(const Vec& a, const Vec& b);

void require_square(const Mat& a, const char* what);
void require_same_dim(Index a, Index b, const char* what);

}  // namespace noisyts
