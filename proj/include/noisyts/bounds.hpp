#pragma once

#include <stdexcept>

namespace noisyts::bounds {

/// Scalar problem constants for the isotropic regret bounds
/// (Sigma_c = sigma_c2 I, Sigma_n = sigma_n2 I, Sigma_gamma = sigma_gamma2 I).
struct BoundInputs {
  double d = 1;
  double m = 1;
  double K = 1;
  double T = 1;
  double sigma2 = 1.0;
  double lambda = 1.0;
  double sigma_c2 = 1.0;
  double sigma_n2 = 1.0;
  double sigma_gamma2 = 1.0;
  /// Confidence parameter in (0, 1); a non-positive value selects 1/T.
  double delta = 0.0;
  /// max_a Tr(G(a)^T G(a)) of the linear feature map (enters the constant L).
  double max_trace_gtg = 1.0;

  double resolved_delta() const;
  void validate() const;
};

class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// U(m, lambda) = sqrt(2 T m sigma2 min{m, 2 + 2 log K} log(1 + T lambda / (m sigma2))).
/// Uses in.T, in.K, in.sigma2 together with the explicit (m, lambda) arguments.
double u_bound(const BoundInputs& in, double m, double lambda);
inline double u_bound(const BoundInputs& in) { return u_bound(in, in.m, in.lambda); }

/// I(gamma*; H_{T,c,c_hat}) = (d/2) log(1 + (T - 1) sigma_gamma2 / sigma_n2).
double mi_delayed(const BoundInputs& in);

/// f = sigma_c2 + sigma_n2 and the isotropic predictive variance
/// b_t = sigma_c2 ((t-1) sg sn + sc sg + f sn) / (f ((t-1) sg + sn + sc)).
double isotropic_b(const BoundInputs& in, double t);

struct MiSum {
  /// sum_{t=1}^T (1/2) log det(R_t^-1 M) = sum_t (d/2) log(1 + sc sg / ((t-1) sg sn + f sn)).
  double exact = 0.0;
  /// (d sc / (2 sn)) (sg / (sc + sn) + log(T - 1)), with log(T - 1) read as 0 for T <= 2.
  double bound = 0.0;
};
MiSum mi_sum_unobserved(const BoundInputs& in);

/// Per-round term (1/2) log det(R_t^-1 M) in the isotropic case.
double mi_term_unobserved(const BoundInputs& in, double t);

/// Constant L = d K nu (sn + sc sg / (T f) + sc log(T-1) / T),
/// nu = sigma2 sc / f * max_trace_gtg.
double l_constant(const BoundInputs& in);

/// Regret bound for alg1 with linear features (m = d).
/// Throws HypothesisError unless lambda / sigma2 <= d / T <= 1.
double theorem1_bound(const BoundInputs& in);

/// Regret bound for the delayed setting:
/// U(m, lambda) + 2 T delta^2 sqrt(2 m lambda / pi)
///   + 2 sqrt(2 lambda m T d log(1 + (T-1) sg / sn) log(2m / delta)).
struct Theorem2Terms {
  double u = 0.0;
  double tail = 0.0;
  double information = 0.0;
  double total() const { return u + tail + information; }
};
Theorem2Terms theorem2_terms(const BoundInputs& in);
inline double theorem2_bound(const BoundInputs& in) { return theorem2_terms(in).total(); }

/// sum_t D_t <= d T / 4 (posterior-mismatch budget for linear features).
inline double kl_mismatch_bound(const BoundInputs& in) { return in.d * in.T / 4.0; }

}  // namespace noisyts::bounds
