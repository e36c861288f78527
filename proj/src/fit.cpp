#include "noisyts/fit.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace noisyts {

Mat read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    }
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        throw FitError("line " + std::to_string(line_no) + ": '" + tok + "' is not a finite real");
      }
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FitError("line " + std::to_string(line_no) + ": expected " + std::to_string(rows.front().size()) +
                     " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FitError("matrix file contains no rows");
  Mat out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < out.rows(); ++r)
    for (Index c = 0; c < out.cols(); ++c) out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return out;
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FitError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

ContextFit fit_context_distribution(const Mat& rows, bool diagonal) {
  const Index n = rows.rows(), d = rows.cols();
  if (n < 2) throw FitError("need at least two rows to estimate a covariance");
  if (!diagonal && n <= d) {
    throw FitError("n = " + std::to_string(n) + " rows in d = " + std::to_string(d) +
                   " dimensions gives a singular covariance; rerun with --diagonal for a diagonal-only fit");
  }
  ContextFit fit;
  fit.rows = n;
  fit.diagonal = diagonal;
  fit.mean = rows.colwise().mean().transpose();
  const Mat centered = rows.rowwise() - fit.mean.transpose();
  fit.cov = symmetrize(centered.transpose() * centered / static_cast<double>(n - 1));
  if (diagonal) fit.cov = Mat(fit.cov.diagonal().asDiagonal());

  const double base = 1e-10 * std::max(fit.cov.trace() / static_cast<double>(d), 1.0);
  for (double jitter = 0.0; jitter <= base * 1e6; jitter = jitter == 0.0 ? base : jitter * 10.0) {
    const Mat candidate = fit.cov + jitter * Mat::Identity(d, d);
    Eigen::LLT<Mat> llt(candidate);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0) {
      fit.cov = candidate;
      fit.jitter = jitter;
      return fit;
    }
  }
  throw FitError("sample covariance is not positive definite even after jitter");
}

nlohmann::json context_fragment(const ContextFit& fit) {
  nlohmann::json cov = nlohmann::json::array();
  for (Index r = 0; r < fit.cov.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < fit.cov.cols(); ++c) row.push_back(fit.cov(r, c));
    cov.push_back(std::move(row));
  }
  return {{"env",
           {{"d", fit.mean.size()},
            {"mu_c", std::vector<double>(fit.mean.data(), fit.mean.data() + fit.mean.size())},
            {"Sigma_c", cov}}}};
}

}  // namespace noisyts
