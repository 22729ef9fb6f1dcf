#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clmbr/errors.hpp"
#include "clmbr/model.hpp"

namespace clmbr {

// Estimation methods: maximum likelihood, mean bias reduction, and median
// bias reduction via adjusted score equations.
enum class Method { ml, mean_br, median_br };

Method method_from_name(std::string_view name);
std::string method_name(Method method);

// Third-moment tensors of the score, one d x d matrix per coordinate r:
//   P_r = E[U U' U_r],  Q_r = -E[J U_r]
// accumulated per observation (cross terms vanish by independence).
struct PQMoments {
  std::vector<Eigen::MatrixXd> P;
  std::vector<Eigen::MatrixXd> Q;
};

PQMoments pq_moments(const Eigen::VectorXd& theta, const Dataset& data,
                     Link link);

// Inverse of a symmetric positive definite information matrix; throws
// SingularInformationError when the eigenvalue-ratio condition estimate
// exceeds 1e12 (or the matrix is not positive definite). On success the
// condition estimate is written to *condition when non-null.
Eigen::MatrixXd invert_info(const Eigen::MatrixXd& info,
                            double* condition = nullptr);

// Non-throwing variant used by the solver near boundaries.
bool try_invert_info(const Eigen::MatrixXd& info, Eigen::MatrixXd& inverse,
                     double& condition);

// Mean bias-reducing adjustment A*, with A*_r = tr{inv(i) (P_r + Q_r)} / 2.
Eigen::VectorXd a_star(const Eigen::VectorXd& theta, const Dataset& data,
                       Link link);

// Median-centering correction F with
//   F_r = [inv(i)]_r' Ftilde_r,
//   Ftilde_{r,t} = tr[h_r {P_t / 3 + Q_t / 2}],
//   h_r = [inv(i)]_r [inv(i)]_r' / i^{rr},
// where [inv(i)]_r is the r-th column of inv(i).
Eigen::VectorXd median_modification(const Eigen::VectorXd& theta,
                                    const Dataset& data, Link link);

// U(theta) plus the method's adjustment: 0 for ML, A* for mean BR, and
// A* - i F for median BR.
Eigen::VectorXd adjusted_score(const Eigen::VectorXd& theta,
                               const Dataset& data, Link link, Method method);

// Adjusted score together with the expected information at theta; the Fisher
// step reuses the information matrix, so both come from one pass.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> adjusted_score_with_info(
    const Eigen::VectorXd& theta, const Dataset& data, Link link,
    Method method);

}  // namespace clmbr
