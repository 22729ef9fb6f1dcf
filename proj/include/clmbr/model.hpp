#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "clmbr/links.hpp"

namespace clmbr {

// Ordinal regression data: responses in 1..c, an n x p covariate matrix
// (no intercept column; the cutpoints play that role), and positive integer
// multiplicities w.
struct Dataset {
  Eigen::MatrixXd X;   // n x p
  std::vector<int> y;  // n entries in 1..c
  int c = 0;           // number of response categories
  Eigen::VectorXd w;   // n multiplicities, default all ones

  Dataset() = default;
  Dataset(Eigen::MatrixXd X_, std::vector<int> y_, int c_);
  Dataset(Eigen::MatrixXd X_, std::vector<int> y_, int c_, Eigen::VectorXd w_);

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(X.cols()); }
  int dim() const { return c - 1 + p(); }

  // Throws std::invalid_argument on shape mismatches, categories outside
  // 1..c, non-finite covariates, or non-positive/non-integer multiplicities.
  void validate() const;

  // Weighted count per category, length c.
  std::vector<double> category_counts() const;
};

// Parameters are flattened as theta = (alpha_1..alpha_{c-1}, beta_1..beta_p)
// with alpha strictly increasing.
struct ParamVector {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;

  Eigen::VectorXd flatten() const;
  static ParamVector split(const Eigen::VectorXd& theta, int c);
  int dim() const { return static_cast<int>(alpha.size() + beta.size()); }
  bool ordered() const;  // alpha strictly increasing
};

// True when the cutpoint block of theta is strictly increasing.
bool cutpoints_ordered(const Eigen::VectorXd& theta, int c);

// Category probabilities (p_1..p_c) for one covariate row; throws
// std::invalid_argument when the cutpoints are not strictly increasing.
Eigen::VectorXd cell_probs(const ParamVector& theta, const Eigen::RowVectorXd& x,
                           Link link);

// Everything the score, information, and adjustment assembly need from a
// single observation: cell probabilities, per-category score contributions
// u_j = grad log p_j (columns of u), and per-category observed information
// contributions J_j = -hess log p_j.
struct ObsWork {
  Eigen::VectorXd prob;             // c
  Eigen::MatrixXd u;                // d x c, column j-1 is u_j
  std::vector<Eigen::MatrixXd> J;   // c matrices, d x d

  void resize(int d, int c);
};

// Fills `work` at (theta, x). Probabilities are floored at 1e-300 inside the
// logarithmic derivatives only; `work.prob` itself is the raw value.
void per_obs_quantities(const Eigen::VectorXd& theta,
                        const Eigen::RowVectorXd& x, int c, Link link,
                        ObsWork& work);

// Log-likelihood, score vector, observed information (-hessian of loglik),
// and expected (Fisher) information, all at flattened theta.
double loglik(const Eigen::VectorXd& theta, const Dataset& data, Link link);
Eigen::VectorXd score(const Eigen::VectorXd& theta, const Dataset& data,
                      Link link);
Eigen::MatrixXd obs_info(const Eigen::VectorXd& theta, const Dataset& data,
                         Link link);
Eigen::MatrixXd exp_info(const Eigen::VectorXd& theta, const Dataset& data,
                         Link link);

// Single-observation views used by tests and the enumeration oracle.
Eigen::VectorXd score_contrib(const Eigen::VectorXd& theta,
                              const Eigen::RowVectorXd& x, int j, int c,
                              Link link);
Eigen::MatrixXd obs_info_contrib(const Eigen::VectorXd& theta,
                                 const Eigen::RowVectorXd& x, int j, int c,
                                 Link link);

}  // namespace clmbr
