#include "noisyts/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace noisyts::bounds {

namespace {

// log(T - 1) with the empty-sum reading: 0 when T <= 2.
double log_t_minus_one(double T) { return T > 2.0 ? std::log(T - 1.0) : 0.0; }

}  // namespace

double BoundInputs::resolved_delta() const { return delta > 0.0 ? delta : 1.0 / T; }

void BoundInputs::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("BoundInputs: ") + name + " must be > 0");
  };
  positive(d, "d");
  positive(m, "m");
  positive(K, "K");
  positive(sigma2, "sigma2");
  positive(lambda, "lambda");
  positive(sigma_c2, "sigma_c2");
  positive(sigma_n2, "sigma_n2");
  positive(sigma_gamma2, "sigma_gamma2");
  positive(max_trace_gtg, "max_trace_gtg");
  if (!(T >= 0.0)) throw std::invalid_argument("BoundInputs: T must be >= 0");
  if (delta > 0.0 && delta >= 1.0) throw std::invalid_argument("BoundInputs: delta must lie in (0, 1)");
}

double u_bound(const BoundInputs& in, double m, double lambda) {
  in.validate();
  if (in.T == 0.0) return 0.0;
  const double arms = std::min(m, 2.0 + 2.0 * std::log(in.K));
  return std::sqrt(2.0 * in.T * m * in.sigma2 * arms * std::log1p(in.T * lambda / (m * in.sigma2)));
}

double mi_delayed(const BoundInputs& in) {
  in.validate();
  if (in.T <= 1.0) return 0.0;
  return 0.5 * in.d * std::log1p((in.T - 1.0) * in.sigma_gamma2 / in.sigma_n2);
}

double isotropic_b(const BoundInputs& in, double t) {
  const double sc = in.sigma_c2, sn = in.sigma_n2, sg = in.sigma_gamma2;
  const double f = sc + sn;
  return sc * ((t - 1.0) * sg * sn + sc * sg + f * sn) / (f * ((t - 1.0) * sg + sn + sc));
}

double mi_term_unobserved(const BoundInputs& in, double t) {
  const double sc = in.sigma_c2, sn = in.sigma_n2, sg = in.sigma_gamma2;
  const double f = sc + sn;
  return 0.5 * in.d * std::log1p(sc * sg / ((t - 1.0) * sg * sn + f * sn));
}

MiSum mi_sum_unobserved(const BoundInputs& in) {
  in.validate();
  MiSum out;
  for (double t = 1.0; t <= in.T; t += 1.0) out.exact += mi_term_unobserved(in, t);
  const double sc = in.sigma_c2, sn = in.sigma_n2, sg = in.sigma_gamma2;
  out.bound = in.d * sc / (2.0 * sn) * (sg / (sc + sn) + log_t_minus_one(in.T));
  return out;
}

double l_constant(const BoundInputs& in) {
  const double sc = in.sigma_c2, sn = in.sigma_n2, sg = in.sigma_gamma2;
  const double f = sc + sn;
  const double nu = in.sigma2 * sc / f * in.max_trace_gtg;
  return in.d * in.K * nu * (sn + sc * sg / (in.T * f) + sc * log_t_minus_one(in.T) / in.T);
}

double theorem1_bound(const BoundInputs& in) {
  in.validate();
  if (in.T < 1.0) throw HypothesisError("theorem1_bound: T must be >= 1");
  const double ratio = in.lambda / in.sigma2;
  const double dt = in.d / in.T;
  if (!(ratio <= dt) || !(dt <= 1.0)) {
    throw HypothesisError("theorem1_bound: requires lambda / sigma2 <= d / T <= 1 (lambda / sigma2 = " +
                          std::to_string(ratio) + ", d / T = " + std::to_string(dt) + ")");
  }
  const double d = in.d, T = in.T, s2 = in.sigma2;
  const double sc = in.sigma_c2, sn = in.sigma_n2, sg = in.sigma_gamma2;
  const double cb = u_bound(in, d, d * s2 / T);
  const double mismatch1 = std::sqrt(d * s2 * (2.0 * T * std::log(in.K) + d * T / 2.0));
  const double mismatch2 = std::sqrt(d * d * T * s2 / 2.0);
  const double estimation =
      2.0 * std::sqrt(2.0 * l_constant(in) * d * sc / sn * (sg / (sn + sc) + log_t_minus_one(T)));
  return cb + mismatch1 + mismatch2 + estimation;
}

Theorem2Terms theorem2_terms(const BoundInputs& in) {
  in.validate();
  if (in.T < 1.0) throw HypothesisError("theorem2_bound: T must be >= 1");
  const double delta = in.resolved_delta();
  const double m = in.m, T = in.T, lam = in.lambda;
  const double tail = 2.0 * T * delta * delta * std::sqrt(2.0 * m * lam / std::numbers::pi);
  const double info = 2.0 * std::sqrt(2.0 * lam * m * T * in.d * std::log1p((T - 1.0) * in.sigma_gamma2 / in.sigma_n2) *
                                      std::log(2.0 * m / delta));
  return Theorem2Terms{u_bound(in), tail, info};
}

}  // namespace noisyts::bounds
