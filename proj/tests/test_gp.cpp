#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ewhi/errors.hpp"
#include "ewhi/gp.hpp"
#include "ewhi/normal.hpp"

using namespace ewhi;

namespace {

// Reference Matern-5/2, written out from the closed form.
double matern_ref(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double s2, const Eigen::VectorXd& ell) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) r2 += std::pow((a(i) - b(i)) / ell(i), 2);
  const double r = std::sqrt(r2);
  return s2 * (1.0 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

// Dense-solve kriging oracle (LU, no reuse of the model's factorization).
Prediction dense_oracle(const GpModel& m, const Eigen::VectorXd& x) {
  const auto& X = m.inputs();
  const auto& y = m.outputs();
  const auto& p = m.params();
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = matern_ref(X.row(i), X.row(j), p.signal_variance, p.lengthscales);
    K(i, i) += p.nugget;
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd kinv_y = lu.solve(y), kinv_1 = lu.solve(ones);
  const double mu = ones.dot(kinv_y) / ones.dot(kinv_1);
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k(i) = matern_ref(x, X.row(i), p.signal_variance, p.lengthscales);
  const double mean = mu + k.dot(lu.solve((y.array() - mu).matrix()));
  const double var = p.signal_variance - k.dot(lu.solve(k));
  return {mean, std::sqrt(std::max(var, 0.0))};
}

Eigen::MatrixXd random_inputs(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = u(rng);
  return X;
}

Eigen::VectorXd smooth_outputs(const Eigen::MatrixXd& X) {
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) s += std::sin(3.0 * X(i, j) + j) + X(i, j) * X(i, j);
    y(i) = 2.0 + s;
  }
  return y;
}

}  // namespace

TEST_CASE("normal cdf and tails") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.97500210485177956379).epsilon(1e-15));
  CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220436213).epsilon(1e-14));
  CHECK(normal_cdf(-8.0) == doctest::Approx(6.2209605742717841235e-16).epsilon(1e-13));
  CHECK(normal_cdf(-20.0) == doctest::Approx(2.7536241186062336951e-89).epsilon(1e-12));
  CHECK(log_normal_cdf(-5.0) == doctest::Approx(-15.064998393988725736).epsilon(1e-14));
  CHECK(log_normal_cdf(-30.0) == doctest::Approx(-454.32124395634319711).epsilon(1e-14));
  CHECK(log_normal_cdf(-40.0) == doctest::Approx(-804.60844201375378817).epsilon(1e-14));
  CHECK(log_normal_cdf(-100.0) == doctest::Approx(-5005.5242086942050886).epsilon(1e-14));
  CHECK(log_normal_cdf(-1000.0) == doctest::Approx(-500007.82669481218431).epsilon(1e-14));
  CHECK(log_normal_cdf(3.0) == doctest::Approx(-0.0013508099647481937988).epsilon(1e-13));
  CHECK(log_normal_cdf(10.0) == doctest::Approx(-7.6198530241605260704e-24).epsilon(1e-10));
}

TEST_CASE("gaussian partial moment") {
  CHECK(gaussian_partial_moment(1.0, 0.0, 1.0) == doctest::Approx(1.0833154705876862984).epsilon(1e-14));
  CHECK(gaussian_partial_moment(0.0, 0.0, 1.0) == doctest::Approx(0.39894228040143267794).epsilon(1e-14));
  CHECK(gaussian_partial_moment(-3.0, 0.0, 2.0) == doctest::Approx(0.058613587525209257215).epsilon(1e-13));
  CHECK(gaussian_partial_moment(10.0, 2.0, 0.5) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(gaussian_partial_moment(-INFINITY, 0.0, 1.0) == 0.0);
}

TEST_CASE("matern52 matches the closed form") {
  std::mt19937_64 rng(1);
  KernelParams p;
  p.signal_variance = 2.5;
  p.lengthscales = Eigen::Vector3d(0.2, 0.7, 1.3);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd ab = random_inputs(rng, 2, 3);
    const Eigen::VectorXd a = ab.row(0), b = ab.row(1);
    CHECK(matern52(a, b, p) == doctest::Approx(matern_ref(a, b, 2.5, p.lengthscales)).epsilon(1e-14));
  }
  CHECK(matern52(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), p) == 2.5);
}

TEST_CASE("prob_dominates examples and limits") {
  CHECK(prob_dominates({{1.0, 2.0, 3.0}, {0.5, 1.0, 2.0}}, std::vector<double>{1.0, 2.0, 3.0}) ==
        doctest::Approx(0.125).epsilon(1e-15));
  CHECK(prob_dominates({{0.0, 0.0}, {0.0, 0.0}}, std::vector<double>{1.0, 1.0}) == 1.0);
  CHECK(prob_dominates({{0.0, 0.0}, {0.0, 0.0}}, std::vector<double>{-1.0, 1.0}) == 0.0);
  CHECK(prob_dominates({{0.0, 0.0}, {1.0, 1.0}}, std::vector<double>{1.96, 1.96}) ==
        doctest::Approx(0.9506291044654005504).epsilon(1e-6));
  CHECK(prob_dominates({{0.0, 0.0}, {1.0, 1.0}}, std::vector<double>{1e6, 1e6}) == 1.0);
  CHECK(prob_dominates({{0.0, 0.0}, {1.0, 1.0}}, std::vector<double>{-1e6, 1e6}) == 0.0);
  const double tiny = prob_dominates({{0.0, 0.0}, {1.0, 1.0}}, std::vector<double>{-20.0, -20.0});
  CHECK(tiny == doctest::Approx(2.7536241186062336951e-89 * 2.7536241186062336951e-89).epsilon(1e-12));
  const double small = prob_dominates({{0.0, 0.0}, {1.0, 1.0}}, std::vector<double>{-38.0, 30.0});
  CHECK(small == doctest::Approx(2.8854283600687843084e-316).epsilon(1e-6));
  CHECK_THROWS_AS(prob_dominates({{0.0, 0.0}, {1.0, 1.0}}, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("prob_dominates is non-decreasing in y") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 2.0);
  std::uniform_real_distribution<double> s(0.01, 3.0), step(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    PredictiveDistribution pred{{n(rng), n(rng)}, {s(rng), s(rng)}};
    std::vector<double> y{n(rng), n(rng)};
    const double before = prob_dominates(pred, y);
    y[i % 2] += step(rng);
    CHECK(prob_dominates(pred, y) >= before);
  }
}

TEST_CASE("prob_feasible") {
  CHECK(prob_feasible({}) == 1.0);
  const std::vector<Prediction> one{{0.0, 1.0}};
  CHECK(prob_feasible(one) == 0.5);
  const std::vector<Prediction> two{{-1.0, 1.0}, {-1.0, 1.0}};
  CHECK(prob_feasible(two) == doctest::Approx(0.70786098173714101534).epsilon(1e-14));
  const std::vector<Prediction> certain{{-1.0, 0.0}, {2.0, 0.0}};
  CHECK(prob_feasible(certain) == 0.0);
}

TEST_CASE("GLS constant on constant data") {
  Eigen::MatrixXd X(2, 1);
  X << 0.1, 0.8;
  const Eigen::Vector2d y(3.5, 3.5);
  KernelParams p;
  p.signal_variance = 1.0;
  p.lengthscales = Eigen::VectorXd::Constant(1, 0.3);
  const GpModel m(X, y, p);
  CHECK(m.mean_constant() == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("interpolation at training inputs and the far-field limit") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd X = random_inputs(rng, 12, 2);
  const Eigen::VectorXd y = smooth_outputs(X);
  const GpModel m = fit(X, y);
  REQUIRE(m.params().nugget <= 1e-12 * m.params().signal_variance * (1 + 1e-9));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Prediction pr = m.predict(X.row(i).transpose());
    CHECK(std::abs(pr.mean - y(i)) <= 1e-6 * std::abs(y(i)));
    CHECK(pr.sd <= 1e-4 * std::sqrt(m.params().signal_variance));
  }
  const double far = 10.0 * m.params().lengthscales.maxCoeff() + 10.0;
  const Prediction pr = m.predict(Eigen::Vector2d(far, -far));
  CHECK(pr.mean == doctest::Approx(m.mean_constant()).epsilon(0.01));
  CHECK(pr.sd == doctest::Approx(std::sqrt(m.params().signal_variance)).epsilon(0.01));
}

TEST_CASE("prediction matches a dense-solve oracle") {
  SUBCASE("one dimension, three points") {
    Eigen::MatrixXd X(3, 1);
    X << 0.0, 0.4, 1.0;
    const Eigen::Vector3d y(1.0, -0.5, 2.0);
    KernelParams p;
    p.signal_variance = 1.7;
    p.lengthscales = Eigen::VectorXd::Constant(1, 0.35);
    const GpModel m(X, y, p);
    for (double x : {-0.3, 0.1, 0.25, 0.55, 0.9, 1.4}) {
      const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, x);
      const Prediction a = m.predict(q), b = dense_oracle(m, q);
      CHECK(std::abs(a.mean - b.mean) <= 1e-8);
      CHECK(std::abs(a.sd - b.sd) <= 1e-8);
    }
  }
  SUBCASE("random fitted models up to twenty points") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Index n = 3 + trial * 2, d = 1 + trial % 3;
      const Eigen::MatrixXd X = random_inputs(rng, n, d);
      FitOptions opt;
      opt.seed = static_cast<std::uint64_t>(trial);
      const GpModel m = fit(X, smooth_outputs(X), opt);
      const Eigen::MatrixXd Q = random_inputs(rng, 20, d);
      for (Eigen::Index i = 0; i < Q.rows(); ++i) {
        const Prediction a = m.predict(Q.row(i).transpose()), b = dense_oracle(m, Q.row(i).transpose());
        CHECK(std::abs(a.mean - b.mean) <= 1e-8);
        CHECK(std::abs(a.sd - b.sd) <= 1e-8);
      }
    }
  }
}

TEST_CASE("predictive variance is non-negative") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd X = random_inputs(rng, 15, 2);
    const GpModel m = fit(X, smooth_outputs(X));
    const Eigen::MatrixXd Q = random_inputs(rng, 2000, 2);
    for (Eigen::Index i = 0; i < Q.rows(); ++i) {
      const Prediction pr = m.predict(Q.row(i).transpose());
      CHECK(pr.sd >= 0.0);
      CHECK(std::isfinite(pr.sd));
    }
  }
}

TEST_CASE("log posterior gradient matches central differences") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 1 + trial % 3;
    const Eigen::MatrixXd X = random_inputs(rng, 10, d);
    const Eigen::VectorXd y = smooth_outputs(X);
    const HyperPrior prior = HyperPrior::defaults_for(X, y);
    Eigen::VectorXd u(d + 1);
    u(0) = prior.log_variance_mean + n(rng);
    u.tail(d) = prior.log_lengthscale_mean.array() + 0.3 * n(rng);
    Eigen::VectorXd grad;
    const double f = log_posterior(X, y, prior, u, 1e-8, &grad);
    REQUIRE(std::isfinite(f));
    for (Eigen::Index j = 0; j <= d; ++j) {
      const double h = 1e-5;
      Eigen::VectorXd up = u, dn = u;
      up(j) += h;
      dn(j) -= h;
      const double fd = (log_posterior(X, y, prior, up, 1e-8) - log_posterior(X, y, prior, dn, 1e-8)) / (2 * h);
      CHECK(std::abs(grad(j) - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("linear data: held-out prediction") {
  Eigen::MatrixXd X(5, 1);
  X << 0.0, 0.25, 0.5, 0.75, 1.0;
  const Eigen::VectorXd y = X.col(0);
  const GpModel m = fit(X, y);
  for (double x : {0.1, 0.4, 0.6, 0.9}) {
    CHECK(std::abs(m.predict(Eigen::VectorXd::Constant(1, x)).mean - x) < 0.05);
  }
}

TEST_CASE("lengthscale recovery from Matern-5/2 sample paths") {
  int within = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);
    const Eigen::Index n = 50;
    Eigen::MatrixXd X(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) X(i, 0) = u(rng);
    Eigen::MatrixXd K(n, n);
    const Eigen::VectorXd ell = Eigen::VectorXd::Constant(1, 0.3);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) K(i, j) = matern_ref(X.row(i), X.row(j), 1.0, ell);
      K(i, i) += 1e-10;
    }
    const Eigen::MatrixXd L = K.llt().matrixL();
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = z(rng);
    const Eigen::VectorXd y = L * w;
    FitOptions opt;
    opt.seed = seed;
    const GpModel m = fit(X, y, opt);
    const double l = m.params().lengthscales(0);
    if (l >= 0.15 && l <= 0.6) ++within;
  }
  CHECK(within >= 16);
}

TEST_CASE("fit rejects degenerate data") {
  Eigen::MatrixXd X(1, 1);
  X << 0.5;
  CHECK_THROWS_AS(fit(X, Eigen::VectorXd::Constant(1, 1.0)), FitError);
  Eigen::MatrixXd X2(2, 1);
  X2 << 0.1, 0.2;
  CHECK_THROWS_AS(fit(X2, Eigen::Vector2d(1.0, NAN)), FitError);
}
