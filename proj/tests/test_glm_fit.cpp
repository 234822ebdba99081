#include <gtest/gtest.h>

#include <random>

#include "dlnr/design_matrix.hpp"
#include "dlnr/glm_fit.hpp"

using namespace dlnr;

namespace {

struct Sample {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> labels;
};

/// Intercept plus (p-1) standard normal columns; y drawn from the logistic model.
Sample simulate(std::size_t n, const Eigen::VectorXd &theta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  const auto p = theta.size();
  Sample s{Eigen::MatrixXd(n, p), Eigen::VectorXd(n), {}};
  for (Eigen::Index c = 0; c < p; ++c) s.labels.push_back(c == 0 ? "intercept" : "x" + std::to_string(c));
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r) {
    s.X(r, 0) = 1.0;
    for (Eigen::Index c = 1; c < p; ++c) s.X(r, c) = z(rng);
    double eta = s.X.row(r).dot(theta);
    s.y(r) = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return s;
}

// plain-loop log-likelihood, no shared code with the fitter
double oracle_loglik(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, const Eigen::VectorXd &theta) {
  long double ll = 0;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    long double eta = 0;
    for (Eigen::Index c = 0; c < X.cols(); ++c) eta += static_cast<long double>(X(r, c)) * theta(c);
    long double log1pe = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    ll += y(r) * eta - log1pe;
  }
  return static_cast<double>(ll);
}

}  // namespace

TEST(Bic, Arithmetic) {
  EXPECT_EQ(bic(0.0, 0, 10.0), 0.0);
  EXPECT_NEAR(bic(100.0, 2, std::numbers::e), 102.0, 1e-12);
}

TEST(TwoSidedP, ReferenceValues) {
  EXPECT_NEAR(two_sided_p(1.959963984540054), 0.05, 1e-12);
  EXPECT_NEAR(two_sided_p(0.0), 1.0, 1e-15);
  EXPECT_EQ(two_sided_p(-2.5), two_sided_p(2.5));
}

TEST(FitLogistic, InterceptOnlyIsLogitOfMean) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.27);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(5000, 1);
  Eigen::VectorXd y(5000);
  for (auto &v : y) v = coin(rng);
  FitResult fit = fit_logistic(DenseDesign(X, y, {"intercept"}));
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.theta(0), logit(y.mean()), 1e-10);
  // se of the intercept: 1/sqrt(n ybar (1-ybar))
  EXPECT_NEAR(fit.se(0), 1.0 / std::sqrt(5000 * y.mean() * (1 - y.mean())), 1e-8);
}

TEST(FitLogistic, ScoreMatchesCentralDifferences) {
  Sample s = simulate(800, Eigen::Vector4d(-1.0, 0.5, -0.8, 0.3), 8);
  DenseDesign d(s.X, s.y, s.labels, 100);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0, 0.7);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::Vector4d theta(z(rng), z(rng), z(rng), z(rng));
    LikelihoodPass pass = likelihood_pass(d, theta);
    EXPECT_NEAR(pass.loglik, oracle_loglik(s.X, s.y, theta), 1e-8 * std::abs(pass.loglik));
    for (int c = 0; c < 4; ++c) {
      const double h = 1e-5;
      Eigen::Vector4d up = theta, down = theta;
      up(c) += h;
      down(c) -= h;
      double fd = (oracle_loglik(s.X, s.y, up) - oracle_loglik(s.X, s.y, down)) / (2 * h);
      EXPECT_LT(std::abs(fd - pass.score(c)), 1e-5 * std::max(1.0, std::abs(fd))) << "column " << c;
    }
  }
}

TEST(FitLogistic, OneParameterMatchesGoldenSection) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  Eigen::MatrixXd X(3000, 1);
  Eigen::VectorXd y(3000);
  for (Eigen::Index r = 0; r < 3000; ++r) {
    X(r, 0) = z(rng);
    y(r) = u(rng) < 1.0 / (1.0 + std::exp(-0.7 * X(r, 0))) ? 1.0 : 0.0;
  }
  auto f = [&](double a) { return -oracle_loglik(X, y, Eigen::VectorXd::Constant(1, a)); };
  double lo = -10, hi = 10;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f(a), fb = f(b);
  while (hi - lo > 1e-10) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = f(b);
    }
  }
  FitResult fit = fit_logistic(DenseDesign(X, y, {"x"}));
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.theta(0), (lo + hi) / 2, 1e-6);
}

TEST(FitLogistic, ScoreVanishesAtEstimate) {
  Sample s = simulate(20000, Eigen::Vector3d(-2.0, 1.0, 0.5), 12);
  DenseDesign d(s.X, s.y, s.labels);
  FitResult fit = fit_logistic(d);
  ASSERT_TRUE(fit.converged);
  EXPECT_EQ(fit.status, FitStatus::Converged);
  LikelihoodPass at = likelihood_pass(d, fit.theta);
  EXPECT_LT(at.score.cwiseAbs().maxCoeff(), 1e-6 * 20000);
  EXPECT_NEAR(fit.deviance, -2 * fit.loglik, 1e-9);
  for (Eigen::Index c = 0; c < 3; ++c) {
    EXPECT_GT(fit.se(c), 0.0);
    EXPECT_DOUBLE_EQ(fit.z(c), fit.theta(c) / fit.se(c));
  }
  EXPECT_LE(fit.iterations, 100);
}

TEST(FitLogistic, ColumnRescalingInvariance) {
  Sample s = simulate(5000, Eigen::Vector3d(-0.5, 0.8, -0.4), 21);
  FitResult base = fit_logistic(DenseDesign(s.X, s.y, s.labels));
  for (double c : {0.001, 3.0, 250.0}) {
    Eigen::MatrixXd Xs = s.X;
    Xs.col(2) *= c;
    FitResult scaled = fit_logistic(DenseDesign(Xs, s.y, s.labels));
    ASSERT_TRUE(scaled.converged);
    EXPECT_NEAR(scaled.deviance, base.deviance, 1e-8 * base.deviance);
    EXPECT_NEAR(scaled.bic, base.bic, 1e-8 * base.bic);
    EXPECT_NEAR(scaled.theta(2) * c, base.theta(2), 1e-8 * std::abs(base.theta(2)));
    EXPECT_NEAR(scaled.theta(1), base.theta(1), 1e-8 * std::abs(base.theta(1)));
  }
}

TEST(FitLogistic, RankDeficiencyNamesColumns) {
  Sample s = simulate(500, Eigen::Vector3d(0.1, 0.5, 0.2), 3);
  Eigen::MatrixXd X(500, 4);
  X << s.X, 2.0 * s.X.col(1);
  try {
    fit_logistic(DenseDesign(X, s.y, {"intercept", "lag", "sender", "lag2"}));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::Fit);
    std::string msg = e.what();
    EXPECT_TRUE(msg.find("lag") != std::string::npos) << msg;
    EXPECT_EQ(msg.find("sender"), std::string::npos) << msg;
  }
  Eigen::MatrixXd Z = s.X;
  Z.col(2).setZero();
  EXPECT_THROW(fit_logistic(DenseDesign(Z, s.y, s.labels)), Error);
}

TEST(FitLogistic, DegenerateResponse) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(10, 1);
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(10), ones = Eigen::VectorXd::Ones(10);
  EXPECT_THROW(fit_logistic(DenseDesign(X, zeros, {"intercept"})), Error);
  EXPECT_THROW(fit_logistic(DenseDesign(X, ones, {"intercept"})), Error);
}

TEST(FitLogistic, SeparationIsReported) {
  Eigen::MatrixXd X(40, 2);
  Eigen::VectorXd y(40);
  for (int r = 0; r < 40; ++r) {
    X(r, 0) = 1;
    X(r, 1) = r - 19.5;
    y(r) = r >= 20;
  }
  FitResult fit = fit_logistic(DenseDesign(X, y, {"intercept", "x"}));
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.status, FitStatus::Separation);
  EXPECT_GT(std::abs(fit.theta(1)) * 19.5, 50.0);

  FitOptions ridge;
  ridge.ridge_on_separation = true;
  FitResult r = fit_logistic(DenseDesign(X, y, {"intercept", "x"}), ridge);
  EXPECT_TRUE(r.ridge);
  EXPECT_TRUE(r.se.allFinite());
}

TEST(FitLogistic, IterationCapReturnsBestIterate) {
  Sample s = simulate(2000, Eigen::Vector3d(-1.0, 1.5, 0.5), 6);
  FitOptions opts;
  opts.max_iter = 1;
  FitResult fit = fit_logistic(DenseDesign(s.X, s.y, s.labels), opts);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.status, FitStatus::MaxIterations);
  EXPECT_EQ(fit.iterations, 1);
  EXPECT_LT(fit.deviance, -2 * oracle_loglik(s.X, s.y, Eigen::Vector3d::Zero()));
}

TEST(FitLogistic, DeterministicAcrossThreadCounts) {
  Sample s = simulate(30000, Eigen::Vector4d(-1.0, 0.5, -0.8, 0.3), 77);
  FitOptions one, many;
  one.threads = 1;
  many.threads = 8;
  FitResult a = fit_logistic(DenseDesign(s.X, s.y, s.labels, 1000), one);
  FitResult b = fit_logistic(DenseDesign(s.X, s.y, s.labels, 1000), many);
  FitResult c = fit_logistic(DenseDesign(s.X, s.y, s.labels, 1000), many);
  EXPECT_TRUE(a.theta == b.theta);
  EXPECT_TRUE(a.se == b.se);
  EXPECT_EQ(a.deviance, b.deviance);
  EXPECT_TRUE(b.theta == c.theta);
}

TEST(FitLogistic, NoiseColumnUsuallyRaisesBic) {
  int raised = 0;
  for (int rep = 0; rep < 50; ++rep) {
    Sample s = simulate(2000, Eigen::Vector2d(-0.5, 1.0), 1000 + rep);
    std::mt19937_64 rng(5000 + rep);
    std::normal_distribution<double> z;
    Eigen::MatrixXd Xn(2000, 3);
    Xn << s.X, Eigen::VectorXd::NullaryExpr(2000, [&] { return z(rng); });
    FitResult small = fit_logistic(DenseDesign(s.X, s.y, s.labels));
    FitResult big = fit_logistic(DenseDesign(Xn, s.y, {"intercept", "x1", "noise"}));
    raised += big.bic > small.bic;
  }
  EXPECT_GE(raised, 45);
}
