#pragma once

#include "noisyts/gaussian.hpp"

#include <json.hpp>

#include <istream>
#include <stdexcept>
#include <string>

namespace noisyts {

/// Malformed matrix file or a sample too small for a full covariance.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Headerless CSV of reals, one row per line; commas and/or whitespace separate fields.
Mat read_matrix(std::istream& in);
Mat read_matrix_file(const std::string& path);

struct ContextFit {
  Vec mean;
  Mat cov;
  Index rows = 0;
  double jitter = 0.0;
  bool diagonal = false;
};

/// Sample mean and unbiased sample covariance of the rows. A full fit needs
/// n > d; `diagonal` keeps only the per-coordinate variances. A covariance
/// that does not factor gets jitter 1e-10 * max(trace / d, 1) on the
/// diagonal, increased tenfold until it does.
ContextFit fit_context_distribution(const Mat& rows, bool diagonal = false);

/// {"env": {"d": d, "mu_c": [...], "Sigma_c": [[...]]}}, mergeable into an experiment config.
nlohmann::json context_fragment(const ContextFit& fit);

}  // namespace noisyts
