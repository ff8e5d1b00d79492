#include <doctest.h>

#include <random>

#include "nlkf/sigma_points.hpp"

using namespace nlkf;

namespace {

GaussianBelief random_belief(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  VectorXd mean(n);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    mean(i) = dist(rng);
    for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
  }
  return GaussianBelief(mean, a * a.transpose() + 0.1 * MatrixXd::Identity(n, n));
}

VectorXd weighted_mean(const SigmaPointSet& set) {
  VectorXd m = VectorXd::Zero(set.points.front().size());
  for (int i = 0; i < set.count(); ++i) m += set.mean_weights[i] * set.points[i];
  return m;
}

MatrixXd weighted_cov(const SigmaPointSet& set, const VectorXd& mean) {
  MatrixXd c = MatrixXd::Zero(mean.size(), mean.size());
  for (int i = 0; i < set.count(); ++i) {
    VectorXd r = set.points[i] - mean;
    c += set.cov_weights[i] * r * r.transpose();
  }
  return c;
}

}  // namespace

TEST_CASE("symmetric points, unit scalar case") {
  GaussianBelief b(VectorXd::Zero(1), MatrixXd::Identity(1, 1));
  UtParams p;
  p.lambda = 0.0;
  const auto set = symmetric_sigma_points(b, p);
  REQUIRE(set.count() == 3);
  CHECK(set.points[0](0) == doctest::Approx(0.0));
  CHECK(set.points[1](0) == doctest::Approx(1.0));
  CHECK(set.points[2](0) == doctest::Approx(-1.0));
  CHECK(set.mean_weights[0] == doctest::Approx(0.0));
  CHECK(set.mean_weights[1] == doctest::Approx(0.5));
  CHECK(set.mean_weights[2] == doctest::Approx(0.5));
}

TEST_CASE("symmetric points, n=2 lambda=1") {
  GaussianBelief b(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  UtParams p;
  p.lambda = 1.0;
  const auto set = symmetric_sigma_points(b, p);
  REQUIRE(set.count() == 5);
  const double s = std::sqrt(3.0);
  CHECK(set.points[1](0) == doctest::Approx(s));
  CHECK(set.points[1](1) == doctest::Approx(0.0));
  CHECK(set.points[2](1) == doctest::Approx(s));
  CHECK(set.points[3](0) == doctest::Approx(-s));
  CHECK(set.points[4](1) == doctest::Approx(-s));
  CHECK(set.mean_weights[0] == doctest::Approx(1.0 / 3.0));
  CHECK(set.mean_weights[1] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("symmetric points require n + lambda > 0") {
  GaussianBelief b(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  UtParams p;
  p.lambda = -2.0;
  CHECK_THROWS_AS(symmetric_sigma_points(b, p), DomainError);
}

TEST_CASE("simplex points, n=1 hand-solved recursion") {
  GaussianBelief b(VectorXd::Zero(1), MatrixXd::Identity(1, 1));
  UtParams p;
  p.w0_simplex = 0.5;
  const auto set = spherical_simplex_points(b, p);
  REQUIRE(set.count() == 3);
  CHECK(set.points[0](0) == doctest::Approx(0.0));
  CHECK(set.points[1](0) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(set.points[2](0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(set.mean_weights[0] == doctest::Approx(0.5));
  CHECK(set.mean_weights[1] == doctest::Approx(0.25));
  CHECK(set.mean_weights[2] == doctest::Approx(0.25));
}

TEST_CASE("moment matching for both constructions") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const auto b = random_belief(n, rng);
    UtParams p = UtParams::defaults_for(n);

    for (bool simplex : {false, true}) {
      const auto set = simplex ? spherical_simplex_points(b, p)
                               : symmetric_sigma_points(b, p);
      CHECK(set.count() == (simplex ? n + 2 : 2 * n + 1));
      double wsum = 0.0;
      for (double w : set.mean_weights) wsum += w;
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
      const VectorXd m = weighted_mean(set);
      CHECK((m - b.mean).norm() <= 1e-10 * std::max(1.0, b.mean.norm()));
      const MatrixXd c = weighted_cov(set, m);
      CHECK((c - b.cov).norm() <= 1e-9 * b.cov.norm());
    }
  }
}

TEST_CASE("unscented mean of a constant is the constant") {
  std::mt19937_64 rng(1);
  const auto b = random_belief(3, rng);
  const auto set = symmetric_sigma_points(b, UtParams::defaults_for(3));
  VectorXd c(2);
  c << 4.0, -1.0;
  std::vector<VectorXd> transformed(set.points.size(), c);
  CHECK((unscented_mean(set, transformed) - c).norm() < 1e-12);
}

TEST_CASE("unscented transform is exact on affine maps") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const auto belief = random_belief(n, rng);
    MatrixXd a(n, n);
    VectorXd bvec(n);
    for (int i = 0; i < n; ++i) {
      bvec(i) = dist(rng);
      for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
    }
    for (bool simplex : {false, true}) {
      const auto set = simplex
                           ? spherical_simplex_points(belief, UtParams::defaults_for(n))
                           : symmetric_sigma_points(belief, UtParams::defaults_for(n));
      std::vector<VectorXd> y;
      for (const auto& pt : set.points) y.push_back(a * pt + bvec);
      const VectorXd mean = unscented_mean(set, y);
      CHECK((mean - (a * belief.mean + bvec)).norm() <=
            1e-9 * std::max(1.0, belief.mean.norm()));
      const MatrixXd cov = unscented_covariance(set, y, mean);
      const MatrixXd want = a * belief.cov * a.transpose();
      CHECK((cov - want).norm() <= 1e-9 * want.norm());
    }
  }
}

TEST_CASE("unscented mean captures the quadratic term exactly") {
  // g(x) = x^T M x has true mean mean^T M mean + trace(M P).
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const auto belief = random_belief(n, rng);
    MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
    m = symmetrize(m);
    for (bool simplex : {false, true}) {
      const auto set = simplex
                           ? spherical_simplex_points(belief, UtParams::defaults_for(n))
                           : symmetric_sigma_points(belief, UtParams::defaults_for(n));
      std::vector<VectorXd> y;
      for (const auto& pt : set.points)
        y.push_back(VectorXd::Constant(1, pt.dot(m * pt)));
      const double got = unscented_mean(set, y)(0);
      const double want =
          belief.mean.dot(m * belief.mean) + (m * belief.cov).trace();
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("unscented moments of x^2 under N(0,1)") {
  GaussianBelief b(VectorXd::Zero(1), MatrixXd::Identity(1, 1));

  // lambda = 0: points {0, +1, -1}, center weight 0. Mean is exact (1.0);
  // the transform covariance degenerates to 0 because both outer points map
  // to the same value and the center carries no covariance weight.
  {
    UtParams p;
    p.lambda = 0.0;
    const auto set = symmetric_sigma_points(b, p);
    std::vector<VectorXd> y;
    for (const auto& pt : set.points)
      y.push_back(VectorXd::Constant(1, pt(0) * pt(0)));
    const VectorXd mean = unscented_mean(set, y);
    CHECK(mean(0) == doctest::Approx(1.0));  // true E[x^2]
    CHECK(unscented_covariance(set, y, mean)(0, 0) == doctest::Approx(0.0));
  }

  // lambda = 2 (the 3 - n default in 1-d): points {0, +sqrt(3), -sqrt(3)}
  // match the Gaussian 4th moment, so the covariance of x^2 is exact too:
  // Var[x^2] = E[x^4] - 1 = 2.
  {
    UtParams p;
    p.lambda = 2.0;
    const auto set = symmetric_sigma_points(b, p);
    std::vector<VectorXd> y;
    for (const auto& pt : set.points)
      y.push_back(VectorXd::Constant(1, pt(0) * pt(0)));
    const VectorXd mean = unscented_mean(set, y);
    CHECK(mean(0) == doctest::Approx(1.0));
    CHECK(unscented_covariance(set, y, mean)(0, 0) == doctest::Approx(2.0));
  }
}

TEST_CASE("unscented covariance reproduces the source moments") {
  std::mt19937_64 rng(5);
  const auto b = random_belief(4, rng);
  const auto set = symmetric_sigma_points(b, UtParams::defaults_for(4));
  std::vector<VectorXd> same(set.points.begin(), set.points.end());
  const VectorXd mean = unscented_mean(set, same);
  const MatrixXd cov = unscented_covariance(set, same, mean);
  CHECK((cov - b.cov).norm() <= 1e-9 * b.cov.norm());
}

TEST_CASE("cardinality mismatch is rejected") {
  GaussianBelief b(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  const auto set = symmetric_sigma_points(b, UtParams::defaults_for(2));
  std::vector<VectorXd> wrong(3, VectorXd::Zero(2));
  CHECK_THROWS_AS(unscented_mean(set, wrong), DimensionError);
  CHECK_THROWS_AS(unscented_covariance(set, wrong, VectorXd::Zero(2)),
                  DimensionError);
}
