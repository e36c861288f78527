#include "noisyts/bounds.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace noisyts::bounds;

namespace {

BoundInputs example() {
  BoundInputs in;
  in.d = 3;
  in.m = 3;
  in.K = 40;
  in.T = 1000;
  in.sigma2 = 2.0;
  in.lambda = 0.001;
  in.sigma_c2 = 1.0;
  in.sigma_n2 = 1.1;
  in.sigma_gamma2 = 1.1;
  in.max_trace_gtg = 0.5;
  return in;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("U(m, lambda) at a hand-computed point") {
  BoundInputs in = example();
  // min{m, 2 + 2 log K} = 3 for K = 40.
  const double ref = std::sqrt(2.0 * 1000 * 3 * 2.0 * 3 * std::log(1.0 + 1000 * 0.001 / (3 * 2.0)));
  CHECK(u_bound(in) == doctest::Approx(ref).epsilon(1e-14));
  in.K = 2;
  const double small_k = std::min(3.0, 2.0 + 2.0 * std::log(2.0));
  CHECK(u_bound(in) == doctest::Approx(std::sqrt(2.0 * 1000 * 3 * 2.0 * small_k *
                                                 std::log(1.0 + 1000 * 0.001 / 6.0))));
  in.T = 0;
  CHECK(u_bound(in) == 0.0);
}

TEST_CASE("delayed mutual information") {
  BoundInputs in = example();
  CHECK(mi_delayed(in) == doctest::Approx(1.5 * std::log(1.0 + 999 * 1.1 / 1.1)));
  in.T = 1;
  CHECK(mi_delayed(in) == 0.0);
}

TEST_CASE("unobserved information terms add up") {
  BoundInputs in = example();
  in.T = 57;
  double sum = 0.0;
  for (int t = 1; t <= 57; ++t) {
    const double f = in.sigma_c2 + in.sigma_n2;
    const double term = 1.5 * std::log(1.0 + in.sigma_c2 * in.sigma_gamma2 /
                                                 ((t - 1) * in.sigma_gamma2 * in.sigma_n2 + f * in.sigma_n2));
    CHECK(mi_term_unobserved(in, t) == doctest::Approx(term).epsilon(1e-13));
    sum += term;
  }
  const MiSum s = mi_sum_unobserved(in);
  CHECK(s.exact == doctest::Approx(sum).epsilon(1e-13));
  CHECK(s.bound == doctest::Approx(3 * 1.0 / (2 * 1.1) * (1.1 / 2.1 + std::log(56.0))));
  for (double t = 3; t <= 300; t += 1) {
    in.T = t;
    const MiSum m = mi_sum_unobserved(in);
    CHECK(m.exact <= m.bound);
  }
}

TEST_CASE("L constant and mismatch budget") {
  const BoundInputs in = example();
  const double f = 2.1;
  const double nu = 2.0 * 1.0 / f * 0.5;
  CHECK(l_constant(in) == doctest::Approx(3 * 40 * nu * (1.1 + 1.1 / (1000 * f) + std::log(999.0) / 1000)));
  CHECK(kl_mismatch_bound(in) == 750.0);
}

TEST_CASE("theorem1_bound hypothesis domain") {
  BoundInputs in = example();
  CHECK(theorem1_bound(in) > 0.0);
  in.lambda = 1.0;  // lambda / sigma2 > d / T
  CHECK_THROWS_AS(theorem1_bound(in), HypothesisError);
  in = example();
  in.T = 2;  // d / T > 1
  CHECK_THROWS_AS(theorem1_bound(in), HypothesisError);
}

TEST_CASE("theorem2_terms") {
  BoundInputs in = example();
  const Theorem2Terms t = theorem2_terms(in);
  const double delta = 1.0 / 1000;
  CHECK(in.resolved_delta() == delta);
  CHECK(t.u == doctest::Approx(u_bound(in)));
  CHECK(t.tail == doctest::Approx(2 * 1000 * delta * delta * std::sqrt(2 * 3 * 0.001 / std::numbers::pi)));
  CHECK(t.information ==
        doctest::Approx(2 * std::sqrt(2 * 0.001 * 3 * 1000 * 3 * std::log(1 + 999.0) * std::log(6 / delta))));
  CHECK(theorem2_bound(in) == doctest::Approx(t.u + t.tail + t.information));
  in.delta = 0.05;
  CHECK(theorem2_terms(in).tail == doctest::Approx(2 * 1000 * 0.0025 * std::sqrt(0.006 / std::numbers::pi)));
}

TEST_CASE("bounds grow with the horizon") {
  BoundInputs in = example();
  double prev1 = 0.0, prev2 = 0.0;
  for (double t = 3; t <= 1000; t += 1) {
    in.T = t;
    const double b2 = theorem2_bound(in);
    CHECK(b2 >= prev2);
    prev2 = b2;
    const double b1 = theorem1_bound(in);
    CHECK(b1 >= prev1);
    prev1 = b1;
  }
}

TEST_CASE("input validation") {
  BoundInputs in = example();
  in.sigma_n2 = 0.0;
  CHECK_THROWS(in.validate());
  in = example();
  in.delta = 1.0;
  CHECK_THROWS(in.validate());
}

}  // TEST_SUITE
