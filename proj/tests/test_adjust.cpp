#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clmbr/adjust.hpp"
#include "clmbr/oracle.hpp"
#include "clmbr/presets.hpp"
#include "clmbr/solver.hpp"
#include "test_util.hpp"

using namespace clmbr;
using clmbr::test::TestRand;

namespace {

Dataset binary_counts(int n1, int n2) {
  const int n = n1 + n2;
  std::vector<int> y(static_cast<size_t>(n), 2);
  std::fill(y.begin(), y.begin() + n1, 1);
  return Dataset(Eigen::MatrixXd(n, 0), std::move(y), 2);
}

// Bisection root of a scalar decreasing function.
double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  REQUIRE(f(lo) > 0.0);
  REQUIRE(f(hi) < 0.0);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double scalar_adjusted_score(const Dataset& data, Method method, double a) {
  return adjusted_score(Eigen::VectorXd::Constant(1, a), data, Link::logit,
                        method)[0];
}

}  // namespace

TEST_CASE("method names round-trip") {
  const Method methods[] = {Method::ml, Method::mean_br, Method::median_br};
  for (Method m : methods) CHECK(method_from_name(method_name(m)) == m);
  CHECK(method_from_name("ml") == Method::ml);
  CHECK(method_from_name("mean-br") == Method::mean_br);
  CHECK(method_from_name("median-br") == Method::median_br);
  CHECK_THROWS_AS(method_from_name("mode-br"), std::invalid_argument);
}

TEST_CASE("moment tensors vanish at the symmetric Bernoulli point") {
  const Dataset one = binary_counts(1, 0);  // the value of y is irrelevant here
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.0);
  const PQMoments pq = pq_moments(theta, one, Link::logit);
  REQUIRE(pq.P.size() == 1);
  REQUIRE(pq.Q.size() == 1);
  // E[U^3] = 0.5 * 0.5^3 + 0.5 * (-0.5)^3 and -E[j U] with j constant 0.25
  CHECK(std::fabs(pq.P[0](0, 0)) < 1e-15);
  CHECK(std::fabs(pq.Q[0](0, 0)) < 1e-15);
}

TEST_CASE("moment tensors match brute-force outcome enumeration") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 0.0;
  const Dataset design(X, {1, 2, 3}, 3);
  Eigen::VectorXd theta(3);
  theta << -0.4, 0.8, 0.6;
  for (Link link : {Link::logit, Link::probit, Link::cloglog}) {
    const PQMoments fast = pq_moments(theta, design, link);
    const PQMoments exact = enumerate_moments(theta, design, link);
    for (size_t r = 0; r < fast.P.size(); ++r) {
      CHECK(clmbr::test::max_abs_diff(fast.P[r], exact.P[r]) < 1e-10);
      CHECK(clmbr::test::max_abs_diff(fast.Q[r], exact.Q[r]) < 1e-10);
    }
  }
}

TEST_CASE("P matrices are symmetric") {
  TestRand rand(301);
  for (int rep = 0; rep < 10; ++rep) {
    const int c = rand.uniform_int(2, 4);
    const Dataset data = clmbr::test::random_dataset(rand, 15, 2, c);
    const Eigen::VectorXd theta = clmbr::test::random_theta(rand, c, 2);
    const PQMoments pq = pq_moments(theta, data, Link::logit);
    for (const Eigen::MatrixXd& P : pq.P)
      CHECK(clmbr::test::max_abs_diff(P, P.transpose()) < 1e-10);
  }
}

TEST_CASE("mean-BR adjusted score root matches the binomial closed form") {
  // intercept-only binary model: the root of U + A* is the shrunken
  // proportion (y + 1/2) / (n + 1)
  const Dataset none_of_two = binary_counts(0, 2);
  const double root = bisect_root(
      [&](double a) { return scalar_adjusted_score(none_of_two, Method::mean_br, a); },
      -8.0, 2.0);
  CHECK(std::fabs(root - (-std::log(5.0))) < 1e-9);
  CHECK(std::fabs(scalar_adjusted_score(none_of_two, Method::mean_br,
                                        -std::log(5.0))) < 1e-12);

  // balanced case: root at zero by symmetry
  const Dataset one_of_two = binary_counts(1, 1);
  CHECK(std::fabs(scalar_adjusted_score(one_of_two, Method::mean_br, 0.0)) < 1e-14);
}

TEST_CASE("median-BR adjusted score root matches the binomial closed form") {
  // root of U + A* - iF solves pi = (y + 1/6) / (n + 1/3); with n = 2, y = 0
  // that is logit(1/14) = -log 13
  const Dataset none_of_two = binary_counts(0, 2);
  const double root = bisect_root(
      [&](double a) {
        return scalar_adjusted_score(none_of_two, Method::median_br, a);
      },
      -8.0, 2.0);

  // independent scalar oracle: U + (1 - 2 pi)/6 for the binomial with a
  // logistic link (the canonical-link Q term vanishes)
  const auto analytic = [&](double a) {
    const double pi = link_cdf(Link::logit, a);
    return (0.0 - 2.0 * pi) + (1.0 - 2.0 * pi) / 6.0;
  };
  const double analytic_root = bisect_root(analytic, -8.0, 2.0);

  CHECK(std::fabs(root - analytic_root) < 1e-9);
  CHECK(std::fabs(root - (-std::log(13.0))) < 1e-9);
  CHECK(std::fabs(analytic_root - (-std::log(13.0))) < 1e-9);

  const Dataset one_of_two = binary_counts(1, 1);
  CHECK(std::fabs(scalar_adjusted_score(one_of_two, Method::median_br, 0.0)) <
        1e-14);
}

TEST_CASE("mean-BR adjustment agrees with an outer-product recomputation") {
  const Dataset wine = wine_dataset();
  const Eigen::VectorXd theta = starting_values(wine, Link::logit);
  const int d = wine.dim();

  for (Link link : {Link::logit, Link::probit, Link::cloglog}) {
    const Eigen::VectorXd astar = a_star(theta, wine, link);
    REQUIRE(astar.allFinite());

    // information from the score outer product instead of the Hessian form
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
    ObsWork work;
    for (int i = 0; i < wine.n(); ++i) {
      per_obs_quantities(theta, wine.X.row(i), wine.c, link, work);
      for (int j = 0; j < wine.c; ++j)
        outer += wine.w[i] * work.prob[j] * work.u.col(j) * work.u.col(j).transpose();
    }
    const Eigen::MatrixXd inv = outer.fullPivLu().inverse();
    const PQMoments pq = pq_moments(theta, wine, link);
    for (int r = 0; r < d; ++r) {
      const double redo = 0.5 * (inv * (pq.P[static_cast<size_t>(r)] +
                                        pq.Q[static_cast<size_t>(r)]))
                                    .trace();
      CHECK(std::fabs(astar[r] - redo) < 1e-8);
    }
  }
}

TEST_CASE("median modification vanishes at the symmetric binomial point") {
  const Dataset data = binary_counts(2, 2);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.0);
  const Eigen::VectorXd F = median_modification(theta, data, Link::logit);
  REQUIRE(F.size() == 1);
  CHECK(std::fabs(F[0]) < 1e-15);
}

TEST_CASE("median modification matches a literal transcription") {
  // d = 2 toy model: c = 2 with one binary covariate
  Eigen::MatrixXd X(5, 1);
  X << 0.0, 1.0, 0.0, 1.0, 1.0;
  const Dataset data(X, {1, 2, 1, 1, 2}, 2);
  TestRand rand(302);
  for (Link link : {Link::logit, Link::probit, Link::cloglog}) {
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::VectorXd theta(2);
      theta << rand.uniform(-1.0, 1.0), rand.uniform(-1.0, 1.0);

      const Eigen::MatrixXd info = exp_info(theta, data, link);
      const Eigen::MatrixXd inv = info.fullPivLu().inverse();
      const PQMoments pq = pq_moments(theta, data, link);
      const int d = 2;
      Eigen::VectorXd expected(d);
      for (int r = 0; r < d; ++r) {
        const Eigen::VectorXd col = inv.col(r);
        const Eigen::MatrixXd h_r = col * col.transpose() / inv(r, r);
        Eigen::VectorXd ftilde(d);
        for (int t = 0; t < d; ++t) {
          const Eigen::MatrixXd M = pq.P[static_cast<size_t>(t)] / 3.0 +
                                    pq.Q[static_cast<size_t>(t)] / 2.0;
          double trace = 0.0;
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) trace += h_r(a, b) * M(b, a);
          ftilde[t] = trace;
        }
        expected[r] = col.dot(ftilde);
      }
      const Eigen::VectorXd actual = median_modification(theta, data, link);
      CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("rank-one identity of the h matrices") {
  TestRand rand(303);
  for (int rep = 0; rep < 20; ++rep) {
    const int c = rand.uniform_int(2, 4);
    const Dataset data = clmbr::test::random_dataset(rand, 25, 2, c);
    const Eigen::VectorXd theta = clmbr::test::random_theta(rand, c, 2);
    const Eigen::MatrixXd inv = invert_info(exp_info(theta, data, Link::logit));
    for (int r = 0; r < inv.rows(); ++r) {
      const Eigen::VectorXd col = inv.col(r);
      const Eigen::MatrixXd h_r = col * col.transpose() / inv(r, r);
      CHECK(std::fabs(h_r.trace() * inv(r, r) - col.squaredNorm()) < 1e-10);
    }
  }
}

TEST_CASE("ML adjusted score is exactly the score") {
  TestRand rand(304);
  const Dataset data = clmbr::test::random_dataset(rand, 20, 2, 3);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd theta = clmbr::test::random_theta(rand, 3, 2);
    const Eigen::VectorXd adjusted =
        adjusted_score(theta, data, Link::logit, Method::ml);
    const Eigen::VectorXd plain = score(theta, data, Link::logit);
    for (int r = 0; r < plain.size(); ++r) CHECK(adjusted[r] == plain[r]);
  }
}

TEST_CASE("adjusted score assembly is consistent across methods") {
  const Dataset wine = wine_dataset();
  TestRand rand(305);
  for (Link link : {Link::logit, Link::probit, Link::cloglog}) {
    const Eigen::VectorXd theta = clmbr::test::random_theta(rand, wine.c, wine.p());
    const Eigen::VectorXd u = adjusted_score(theta, wine, link, Method::ml);
    const Eigen::VectorXd mean = adjusted_score(theta, wine, link, Method::mean_br);
    const Eigen::VectorXd median =
        adjusted_score(theta, wine, link, Method::median_br);
    const Eigen::VectorXd astar = a_star(theta, wine, link);
    const Eigen::VectorXd iF =
        exp_info(theta, wine, link) * median_modification(theta, wine, link);
    CHECK((mean - u - astar).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((median - mean + iF).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("adjustment stays order-one when the data double") {
  const Dataset wine = wine_dataset();
  Dataset doubled = wine;
  doubled.w = 2.0 * wine.w;
  const Eigen::VectorXd theta = starting_values(wine, Link::logit);

  for (Method method : {Method::mean_br, Method::median_br}) {
    const Eigen::VectorXd u1 = score(theta, wine, Link::logit);
    const Eigen::VectorXd u2 = score(theta, doubled, Link::logit);
    CHECK((u2 - 2.0 * u1).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd adj1 =
        adjusted_score(theta, wine, Link::logit, method) - u1;
    const Eigen::VectorXd adj2 =
        adjusted_score(theta, doubled, Link::logit, method) - u2;
    for (int r = 0; r < adj1.size(); ++r) {
      if (std::fabs(adj1[r]) < 1e-12) continue;
      const double ratio = adj2[r] / adj1[r];
      CHECK(ratio >= 0.5);
      CHECK(ratio <= 2.0);
    }
  }
}

TEST_CASE("singular information raises a descriptive error") {
  // duplicated covariate column makes the information exactly singular
  Eigen::MatrixXd X(8, 2);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = (i % 2 == 0) ? 1.0 : 0.0;
    X(i, 1) = X(i, 0);
  }
  const Dataset data(X, {1, 2, 1, 2, 1, 2, 1, 2}, 2);
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(3);

  const Eigen::MatrixXd info = exp_info(theta, data, Link::logit);
  double condition = 0.0;
  Eigen::MatrixXd inverse;
  CHECK_FALSE(try_invert_info(info, inverse, condition));
  CHECK_THROWS_AS(invert_info(info), SingularInformationError);
  try {
    invert_info(info);
  } catch (const SingularInformationError& e) {
    CHECK(!(e.condition() < 1e12));  // condition estimate at or beyond the cap
    CHECK(std::string(e.what()).find("singular") != std::string::npos);
  }
  CHECK_THROWS_AS(a_star(theta, data, Link::logit), SingularInformationError);
  CHECK_THROWS_AS(adjusted_score(theta, data, Link::logit, Method::median_br),
                  SingularInformationError);
}
