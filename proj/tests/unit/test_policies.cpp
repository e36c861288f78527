#include "noisyts/policies.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace noisyts;

TEST_SUITE("policies") {

TEST_CASE("the prior sampling law is N(0, lambda I)") {
  const PolicyState ps = PolicyState::prior(4, 0.25, 2.0);
  const Gaussian law = sampling_law(ps);
  CHECK(oracle::max_abs(law.mean()) == 0.0);
  CHECK(oracle::max_abs(law.cov() - 0.25 * Mat::Identity(4, 4)) < 1e-15);
}

TEST_CASE("one update along e1") {
  PolicyState ps = PolicyState::prior(2, 1.0, 1.0);
  ps = update(std::move(ps), 1.0, Vec::Unit(2, 0));
  Mat expect(2, 2);
  expect << 2.0, 0.0, 0.0, 1.0;
  CHECK(oracle::max_abs(ps.precision - expect) == 0.0);
  CHECK(posterior_mean(ps)(0) == doctest::Approx(0.5));
  CHECK(posterior_mean(ps)(1) == 0.0);
  CHECK(ps.frozen_features.size() == 1);
}

TEST_CASE("posterior mean is the ridge solution and rebuild is exact") {
  std::mt19937_64 gen(3);
  const double lambda = 0.3, sigma2 = 1.7;
  PolicyState ps = PolicyState::prior(3, lambda, sigma2);
  Mat f(25, 3);
  Vec r(25);
  for (int i = 0; i < 25; ++i) {
    f.row(i) = oracle::random_vec(3, gen).transpose();
    r(i) = oracle::random_vec(1, gen)(0);
    const Mat before = ps.precision;
    ps = update(std::move(ps), r(i), f.row(i).transpose());
    // Loewner monotone: the increment is PSD.
    CHECK(Eigen::SelfAdjointEigenSolver<Mat>(ps.precision - before).eigenvalues().minCoeff() > -1e-12);
  }
  const Mat a = f.transpose() * f / sigma2 + Mat::Identity(3, 3) / lambda;
  const Vec ridge = oracle::inv(a) * f.transpose() * r / sigma2;
  CHECK(oracle::max_abs(posterior_mean(ps) - ridge) < 1e-12);
  const PolicyState rb = rebuild(ps);
  CHECK(oracle::max_abs(rb.precision - ps.precision) < 1e-12);
  CHECK(oracle::max_abs(rb.weighted_sum - ps.weighted_sum) < 1e-12);
}

TEST_CASE("theta draws follow the sampling law") {
  std::mt19937_64 gen(8);
  PolicyState ps = PolicyState::prior(3, 1.0, 1.0);
  for (int i = 0; i < 5; ++i) ps = update(std::move(ps), 1.0, oracle::random_vec(3, gen));
  const Mat cov = oracle::inv(ps.precision);
  const Vec mean = cov * ps.weighted_sum;
  Rng rng(4);
  const int n = 200000;
  Mat xs(3, n);
  for (int i = 0; i < n; ++i) xs.col(i) = sample_theta(ps, rng);
  const Vec m = xs.rowwise().mean();
  const Mat c = xs.colwise() - m;
  CHECK(oracle::max_abs(m - mean) < 0.01);
  CHECK(oracle::max_abs(c * c.transpose() / (n - 1.0) - cov) < 0.01);
}

TEST_CASE("argmax breaks ties to the lowest index and ignores positive scaling") {
  Mat f(4, 2);
  f << 1, 0, 0, 1, 1, 0, 0.5, 0.5;
  CHECK(argmax_score(f, Vec::Unit(2, 0)) == 0);
  CHECK(argmax_score(f, Vec::Unit(2, 1)) == 1);
  Vec theta(2);
  theta << 1.0, 1.0;
  CHECK(argmax_score(f, theta) == 0);
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 50; ++rep) {
    Mat g(10, 3);
    for (int i = 0; i < 10; ++i) g.row(i) = oracle::random_vec(3, gen).transpose();
    const Vec th = oracle::random_vec(3, gen);
    CHECK(argmax_score(g, th) == argmax_score(g * 3.7, th));
    CHECK(argmax_score(g, th) == argmax_score(g, th * 0.01));
  }
}

TEST_CASE("oracle action maximizes the Monte Carlo expected reward") {
  EnvConfig cfg = EnvConfig::isotropic(2, 6, 10, 1.0, 0.5, 1.0);
  Rng rng(10);
  const EnvState env = init_env(cfg, rng);
  const ChannelModel ch = ChannelModel::from_config(cfg);
  const Vec chat = Vec::Constant(2, 0.8);
  const ActionChoice pick = oracle_act(env, ch, chat);
  const Gaussian post = oracle_predictive(ch, chat, env.gamma_star);
  Vec value = Vec::Zero(6);
  const int n = 200000;
  for (int i = 0; i < n; ++i) value += env.features.features(post.sample(rng)) * env.theta_star;
  value /= n;
  Index best = 0;
  value.maxCoeff(&best);
  const Vec exact = pick.expected_features * env.theta_star;
  CHECK(oracle::max_abs(value - exact) < 0.01);
  CHECK(pick.action == argmax_score(pick.expected_features, env.theta_star));
  // The Monte Carlo winner is the oracle's pick or within sampling noise of it.
  CHECK(value(pick.action) >= value(best) - 0.01);
}

TEST_CASE("naive and oracle TS rank by the features they claim to use") {
  EnvConfig cfg = EnvConfig::isotropic(2, 5, 10, 1.0, 0.5, 1.0);
  Rng rng(11);
  const EnvState env = init_env(cfg, rng);
  const ChannelModel ch = ChannelModel::from_config(cfg);
  const PolicyState ps = PolicyState::prior(env.features.dim(), 1.0, 1.0);
  const Vec chat = Vec::Constant(2, -0.3);
  Rng a(5), b(5);
  const ActionChoice n = naive_act(ps, env.features, chat, a);
  CHECK(oracle::max_abs(n.expected_features - env.features.features(chat)) == 0.0);
  const ActionChoice o = ts_oracle_act(ps, env, ch, chat, b);
  CHECK(oracle::max_abs(o.expected_features -
                        env.features.expected_features(oracle_predictive(ch, chat, env.gamma_star))) == 0.0);
  // Same policy seed, same draw.
  CHECK(oracle::max_abs(n.sampled_theta - o.sampled_theta) == 0.0);
}

TEST_CASE("lmc with zero steps returns the initial point") {
  LmcConfig cfg;
  cfg.steps = 0;
  Rng rng(1);
  Vec init(3);
  init << 1, 2, 3;
  const Vec out = lmc_sample([](const Vec& x) { return Vec(-x); }, init, cfg, 5, rng);
  CHECK(oracle::max_abs(out - init) == 0.0);
  LmcConfig bad;
  bad.lr0 = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("lmc rejects a non-finite gradient") {
  LmcConfig cfg;
  Rng rng(1);
  auto blowup = [](const Vec& x) { return Vec(Vec::Constant(x.size(), std::nan(""))); };
  CHECK_THROWS_AS(lmc_sample(blowup, Vec::Zero(2), cfg, 1, rng), NumericalError);
}

TEST_CASE("logistic log posterior gradient against finite differences") {
  std::mt19937_64 gen(12);
  PolicyState ps = PolicyState::prior(4, 0.8, 1.0);
  for (int i = 0; i < 30; ++i) ps = update(std::move(ps), i % 3 == 0 ? 1.0 : 0.0, oracle::random_vec(4, gen));
  const Vec theta = oracle::random_vec(4, gen);
  const Vec g = logistic_log_posterior_grad(ps, theta);
  const double h = 1e-6;
  for (Index j = 0; j < 4; ++j) {
    Vec up = theta, dn = theta;
    up(j) += h;
    dn(j) -= h;
    const double fd = (logistic_log_posterior(ps, up) - logistic_log_posterior(ps, dn)) / (2 * h);
    CHECK(g(j) == doctest::Approx(fd).epsilon(1e-6));
  }
}

}  // TEST_SUITE
