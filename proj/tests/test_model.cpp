#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "clmbr/model.hpp"
#include "clmbr/oracle.hpp"
#include "clmbr/presets.hpp"
#include "clmbr/solver.hpp"
#include "test_util.hpp"

using namespace clmbr;
using clmbr::test::TestRand;

namespace {

const Link kLinks[] = {Link::logit, Link::probit, Link::cloglog};

// Cutpoints-only dataset with n1 observations in category 1 and n2 in 2.
Dataset binary_counts(int n1, int n2) {
  const int n = n1 + n2;
  std::vector<int> y(static_cast<size_t>(n), 2);
  std::fill(y.begin(), y.begin() + n1, 1);
  return Dataset(Eigen::MatrixXd(n, 0), std::move(y), 2);
}

// Direct per-row log-likelihood using link_cdf only, independent of the
// ObsWork machinery.
double loglik_by_hand(const Eigen::VectorXd& theta, const Dataset& data,
                      Link link) {
  const int c = data.c;
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double xb =
        data.p() > 0 ? (data.X.row(i) * theta.tail(data.p()))(0, 0) : 0.0;
    const int j = data.y[i];
    const double upper = j == c ? 1.0 : link_cdf(link, theta[j - 1] + xb);
    const double lower = j == 1 ? 0.0 : link_cdf(link, theta[j - 2] + xb);
    total += data.w[i] * std::log(upper - lower);
  }
  return total;
}

}  // namespace

TEST_CASE("dataset validation") {
  TestRand rand(201);
  Dataset good = clmbr::test::random_dataset(rand, 10, 2, 3);
  CHECK_NOTHROW(good.validate());

  Dataset bad_c = good;
  bad_c.c = 1;
  CHECK_THROWS_AS(bad_c.validate(), std::invalid_argument);

  Dataset bad_y = good;
  bad_y.y[3] = 4;
  CHECK_THROWS_AS(bad_y.validate(), std::invalid_argument);
  bad_y.y[3] = 0;
  CHECK_THROWS_AS(bad_y.validate(), std::invalid_argument);

  Dataset bad_x = good;
  bad_x.X(1, 1) = std::nan("");
  CHECK_THROWS_AS(bad_x.validate(), std::invalid_argument);

  Dataset bad_shape = good;
  bad_shape.X = Eigen::MatrixXd::Zero(9, 2);
  CHECK_THROWS_AS(bad_shape.validate(), std::invalid_argument);

  Dataset bad_w = good;
  bad_w.w[0] = 0.5;
  CHECK_THROWS_AS(bad_w.validate(), std::invalid_argument);
  bad_w.w[0] = -1.0;
  CHECK_THROWS_AS(bad_w.validate(), std::invalid_argument);

  Dataset empty(Eigen::MatrixXd(0, 2), {}, 3);
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("category counts respect weights") {
  Eigen::VectorXd w(3);
  w << 2.0, 1.0, 3.0;
  Dataset data(Eigen::MatrixXd(3, 0), {1, 2, 2}, 3, w);
  const std::vector<double> counts = data.category_counts();
  REQUIRE(counts.size() == 3);
  CHECK(counts[0] == 2.0);
  CHECK(counts[1] == 4.0);
  CHECK(counts[2] == 0.0);
}

TEST_CASE("param vector flatten/split round trip") {
  TestRand rand(202);
  for (int rep = 0; rep < 10; ++rep) {
    const int c = rand.uniform_int(2, 5);
    const int p = rand.uniform_int(0, 3);
    const Eigen::VectorXd theta = clmbr::test::random_theta(rand, c, p);
    const ParamVector pv = ParamVector::split(theta, c);
    CHECK(pv.alpha.size() == c - 1);
    CHECK(pv.beta.size() == p);
    CHECK(pv.ordered());
    CHECK((pv.flatten() - theta).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cutpoints_ordered(theta, c));
  }
  ParamVector unordered;
  unordered.alpha = Eigen::Vector2d(1.0, 1.0);
  unordered.beta = Eigen::VectorXd(0);
  CHECK_FALSE(unordered.ordered());
}

TEST_CASE("cell probabilities at starting cutpoints are uniform") {
  TestRand rand(203);
  for (Link link : kLinks) {
    for (int c = 2; c <= 5; ++c) {
      ParamVector theta;
      theta.alpha.resize(c - 1);
      for (int j = 1; j < c; ++j)
        theta.alpha[j - 1] = link_quantile(link, static_cast<double>(j) / c);
      theta.beta = Eigen::VectorXd::Zero(2);
      Eigen::RowVectorXd x(2);
      x << rand.normal(), rand.normal();
      // beta = 0 so x does not move the cells
      const Eigen::VectorXd probs = cell_probs(theta, x, link);
      for (int j = 0; j < c; ++j)
        CHECK(std::fabs(probs[j] - 1.0 / c) < 1e-12);
    }
  }
}

TEST_CASE("cell probabilities closed forms") {
  ParamVector half;
  half.alpha = Eigen::VectorXd::Constant(1, 0.0);
  half.beta = Eigen::VectorXd(0);
  const Eigen::RowVectorXd x0(0);
  const Eigen::VectorXd two = cell_probs(half, x0, Link::logit);
  CHECK(std::fabs(two[0] - 0.5) < 1e-15);
  CHECK(std::fabs(two[1] - 0.5) < 1e-15);

  ParamVector three;
  three.alpha = Eigen::Vector2d(-1.0, 2.0);
  three.beta = Eigen::VectorXd(0);
  const Eigen::VectorXd probs = cell_probs(three, x0, Link::logit);
  // G(-1), G(2) - G(-1), 1 - G(2) for the logistic cdf
  CHECK(std::fabs(probs[0] - 0.2689414) < 5e-8);
  CHECK(std::fabs(probs[1] - 0.6118557) < 5e-8);
  CHECK(std::fabs(probs[2] - 0.1192029) < 5e-8);
  CHECK(std::fabs(probs.sum() - 1.0) < 1e-12);
}

TEST_CASE("cell probabilities sum to one at random points") {
  TestRand rand(204);
  for (Link link : kLinks) {
    for (int rep = 0; rep < 50; ++rep) {
      const int c = rand.uniform_int(2, 5);
      const Eigen::VectorXd flat = clmbr::test::random_theta(rand, c, 2);
      const ParamVector theta = ParamVector::split(flat, c);
      Eigen::RowVectorXd x(2);
      x << rand.normal(), rand.normal();
      const Eigen::VectorXd probs = cell_probs(theta, x, link);
      CHECK(std::fabs(probs.sum() - 1.0) < 1e-12);
      CHECK(probs.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("cell probabilities reject unordered cutpoints") {
  ParamVector theta;
  theta.alpha = Eigen::Vector2d(1.0, -1.0);
  theta.beta = Eigen::VectorXd(0);
  const Eigen::RowVectorXd x0(0);
  CHECK_THROWS_AS(cell_probs(theta, x0, Link::logit), std::invalid_argument);
}

TEST_CASE("loglik closed forms") {
  const Dataset one = binary_counts(1, 0);
  Eigen::VectorXd alpha0 = Eigen::VectorXd::Constant(1, 0.0);
  CHECK(std::fabs(loglik(alpha0, one, Link::logit) - std::log(0.5)) < 1e-14);

  // starting cutpoints make every cell 1/3
  const Dataset wine = wine_dataset();
  const Eigen::VectorXd start = starting_values(wine, Link::logit);
  CHECK(std::fabs(loglik(start, wine, Link::logit) -
                  72.0 * std::log(1.0 / 3.0)) < 1e-9);
}

TEST_CASE("loglik matches an independent summation on the wine data") {
  const Dataset wine = wine_dataset();
  Eigen::VectorXd theta(4);
  theta << -1.2893, 6.4622, -4.4784, -1.2369;
  for (Link link : kLinks) {
    CHECK(std::fabs(loglik(theta, wine, link) -
                    loglik_by_hand(theta, wine, link)) < 1e-10);
  }
}

TEST_CASE("per-category score contributions have zero expectation") {
  TestRand rand(205);
  for (Link link : kLinks) {
    for (int rep = 0; rep < 20; ++rep) {
      const int c = rand.uniform_int(2, 4);
      const int p = rand.uniform_int(0, 2);
      const Eigen::VectorXd theta = clmbr::test::random_theta(rand, c, p);
      Eigen::RowVectorXd x(p);
      for (int k = 0; k < p; ++k) x[k] = rand.normal();
      const Eigen::VectorXd probs =
          cell_probs(ParamVector::split(theta, c), x, link);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(c - 1 + p);
      for (int j = 1; j <= c; ++j)
        mean += probs[j - 1] * score_contrib(theta, x, j, c, link);
      CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("score contribution closed form at a symmetric binary point") {
  // c = 2, logit, alpha = 0, category 1: d log G / d alpha = g/G = 0.25/0.5
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.0);
  const Eigen::RowVectorXd x0(0);
  const Eigen::VectorXd contrib = score_contrib(theta, x0, 1, 2, Link::logit);
  REQUIRE(contrib.size() == 1);
  CHECK(std::fabs(contrib[0] - 0.5) < 1e-14);
}

TEST_CASE("score contribution matches finite differences of log cell prob") {
  TestRand rand(206);
  for (Link link : kLinks) {
    for (int rep = 0; rep < 10; ++rep) {
      const int c = rand.uniform_int(2, 4);
      const int p = rand.uniform_int(0, 2);
      const Eigen::VectorXd theta = clmbr::test::random_theta(rand, c, p);
      Eigen::RowVectorXd x(p);
      for (int k = 0; k < p; ++k) x[k] = rand.normal();
      for (int j = 1; j <= c; ++j) {
        const auto log_pj = [&](const Eigen::VectorXd& t) {
          return std::log(
              cell_probs(ParamVector::split(t, c), x, link)[j - 1]);
        };
        const Eigen::VectorXd grad = fd_gradient(log_pj, theta);
        const Eigen::VectorXd analytic = score_contrib(theta, x, j, c, link);
        const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
        CHECK((grad - analytic).cwiseAbs().maxCoeff() / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("score vanishes at an interior ML estimate") {
  TestRand rand(207);
  const Dataset data = clmbr::test::random_dataset(rand, 60, 2, 3);
  FitOptions options;
  options.method = Method::ml;
  options.link = Link::logit;
  const FitResult result = fit(data, options);
  REQUIRE(result.converged);
  REQUIRE_FALSE(result.boundary());
  CHECK(score(result.theta, data, Link::logit).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("score matches the finite-difference gradient of loglik") {
  const Dataset wine = wine_dataset();
  TestRand rand(208);
  for (Link link : kLinks) {
    for (int rep = 0; rep < 5; ++rep) {
      const Eigen::VectorXd theta = clmbr::test::random_theta(rand, wine.c, wine.p());
      const auto f = [&](const Eigen::VectorXd& t) {
        return loglik(t, wine, link);
      };
      const Eigen::VectorXd grad = fd_gradient(f, theta);
      const Eigen::VectorXd analytic = score(theta, wine, link);
      const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
      CHECK((grad - analytic).cwiseAbs().maxCoeff() / scale < 1e-6);
    }
  }
}

TEST_CASE("cutpoints-only score closed form") {
  TestRand rand(209);
  for (Link link : kLinks) {
    for (int rep = 0; rep < 5; ++rep) {
      const int n1 = rand.uniform_int(1, 8);
      const int n2 = rand.uniform_int(1, 8);
      const Dataset data = binary_counts(n1, n2);
      const double a = rand.uniform(-1.5, 1.5);
      const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, a);
      const double G = link_cdf(link, a), g = link_pdf(link, a);
      const double expected =
          (n1 - (n1 + n2) * G) * g / (G * (1.0 - G));
      CHECK(std::fabs(score(theta, data, link)[0] - expected) < 1e-10);
    }
  }
}

TEST_CASE("observed information matches finite differences and is symmetric") {
  const Dataset wine = wine_dataset();
  TestRand rand(210);
  for (Link link : kLinks) {
    for (int rep = 0; rep < 3; ++rep) {
      const Eigen::VectorXd theta = clmbr::test::random_theta(rand, wine.c, wine.p());
      const auto neg_loglik = [&](const Eigen::VectorXd& t) {
        return -loglik(t, wine, link);
      };
      const Eigen::MatrixXd fd = fd_hessian(neg_loglik, theta);
      const Eigen::MatrixXd analytic = obs_info(theta, wine, link);
      const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
      CHECK(clmbr::test::max_abs_diff(fd, analytic) / scale < 1e-5);
      CHECK(clmbr::test::max_abs_diff(analytic, analytic.transpose()) < 1e-12);
    }
  }
}

TEST_CASE("binary information closed form") {
  // four Bernoulli(1/2) observations: information 4 * G(1-G) = 1 at alpha = 0
  Dataset data = binary_counts(2, 2);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.0);
  CHECK(std::fabs(obs_info(theta, data, Link::logit)(0, 0) - 1.0) < 1e-12);
  CHECK(std::fabs(exp_info(theta, data, Link::logit)(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("expected information satisfies the information identity") {
  const Dataset wine = wine_dataset();
  const Eigen::VectorXd start = starting_values(wine, Link::logit);
  TestRand rand(211);
  for (Link link : kLinks) {
    for (int rep = 0; rep < 4; ++rep) {
      const Eigen::VectorXd theta =
          rep == 0 ? start : clmbr::test::random_theta(rand, wine.c, wine.p());
      // outer-product form assembled independently of exp_info
      const int d = wine.dim();
      Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
      ObsWork work;
      for (int i = 0; i < wine.n(); ++i) {
        per_obs_quantities(theta, wine.X.row(i), wine.c, link, work);
        for (int j = 0; j < wine.c; ++j)
          outer += wine.w[i] * work.prob[j] * work.u.col(j) * work.u.col(j).transpose();
      }
      const Eigen::MatrixXd hess_form = exp_info(theta, wine, link);
      const double tol = rep == 0 ? 1e-10 : 1e-9;
      CHECK(clmbr::test::max_abs_diff(outer, hess_form) < tol);
    }
  }
}

TEST_CASE("expected information is positive semidefinite") {
  TestRand rand(212);
  int checked = 0;
  while (checked < 100) {
    const int c = rand.uniform_int(2, 4);
    const int p = rand.uniform_int(0, 2);
    const Dataset data = clmbr::test::random_dataset(rand, 20, p, c);
    const Eigen::VectorXd theta = clmbr::test::random_theta(rand, c, p);
    const Link link = kLinks[checked % 3];
    const Eigen::MatrixXd info = exp_info(theta, data, link);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(info);
    CHECK(eigen.eigenvalues().minCoeff() >= -1e-10);
    ++checked;
  }
}

TEST_CASE("model quantities are invariant to observation order") {
  const Dataset wine = wine_dataset();
  std::vector<int> perm(static_cast<size_t>(wine.n()));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 gen(213);
  std::shuffle(perm.begin(), perm.end(), gen);

  Dataset shuffled = wine;
  for (int i = 0; i < wine.n(); ++i) {
    shuffled.X.row(i) = wine.X.row(perm[static_cast<size_t>(i)]);
    shuffled.y[static_cast<size_t>(i)] = wine.y[static_cast<size_t>(perm[static_cast<size_t>(i)])];
    shuffled.w[i] = wine.w[perm[static_cast<size_t>(i)]];
  }

  TestRand rand(214);
  const Eigen::VectorXd theta = clmbr::test::random_theta(rand, wine.c, wine.p());
  for (Link link : kLinks) {
    CHECK(std::fabs(loglik(theta, wine, link) - loglik(theta, shuffled, link)) < 1e-12);
    CHECK((score(theta, wine, link) - score(theta, shuffled, link))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(clmbr::test::max_abs_diff(obs_info(theta, wine, link),
                                    obs_info(theta, shuffled, link)) < 1e-12);
    CHECK(clmbr::test::max_abs_diff(exp_info(theta, wine, link),
                                    exp_info(theta, shuffled, link)) < 1e-12);
  }
}
