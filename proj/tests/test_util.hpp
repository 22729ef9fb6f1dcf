#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "clmbr/model.hpp"

namespace clmbr::test {

// Deterministic draws for fixtures; every test case seeds its own engine so
// cases stay independent of execution order.
class TestRand {
 public:
  explicit TestRand(unsigned seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(gen_);
  }

 private:
  std::mt19937_64 gen_;
};

// Random parameter vector with strictly increasing cutpoints.
inline Eigen::VectorXd random_theta(TestRand& rand, int c, int p,
                                    double beta_span = 1.0) {
  Eigen::VectorXd theta(c - 1 + p);
  double cut = rand.uniform(-2.0, -0.5);
  for (int j = 0; j < c - 1; ++j) {
    theta[j] = cut;
    cut += rand.uniform(0.4, 1.5);
  }
  for (int k = 0; k < p; ++k) theta[c - 1 + k] = rand.uniform(-beta_span, beta_span);
  return theta;
}

// Small dataset mixing a continuous and a binary covariate pattern; responses
// are drawn uniformly (derivative checks do not need model-consistent data).
inline Dataset random_dataset(TestRand& rand, int n, int p, int c) {
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < p; ++k)
      X(i, k) = (k % 2 == 0) ? rand.normal()
                             : static_cast<double>(rand.uniform_int(0, 1));
  std::vector<int> y(n);
  bool seen_first = false, seen_last = false;
  for (int i = 0; i < n; ++i) {
    y[i] = rand.uniform_int(1, c);
    if (y[i] == 1) seen_first = true;
    if (y[i] == c) seen_last = true;
  }
  // keep both extremes occupied so fits stay interior
  if (!seen_first) y[0] = 1;
  if (!seen_last) y[n - 1] = c;
  return Dataset(std::move(X), std::move(y), c);
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace clmbr::test
