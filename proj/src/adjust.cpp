#include "clmbr/adjust.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace clmbr {

namespace {

constexpr double kConditionCap = 1e12;

// Eigendecomposition-based SPD inverse; returns false when not positive
// definite or the condition estimate exceeds the cap.
bool spd_inverse(const Eigen::MatrixXd& info, Eigen::MatrixXd& inverse,
                 double& condition) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  if (es.info() != Eigen::Success) {
    condition = std::numeric_limits<double>::infinity();
    return false;
  }
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lo = lam.minCoeff();
  const double hi = lam.maxCoeff();
  if (!(lo > 0.0) || !std::isfinite(hi)) {
    condition = std::numeric_limits<double>::infinity();
    return false;
  }
  condition = hi / lo;
  if (condition > kConditionCap) return false;
  inverse = es.eigenvectors() * lam.cwiseInverse().asDiagonal() *
            es.eigenvectors().transpose();
  return true;
}

struct Core {
  Eigen::MatrixXd info;
  Eigen::MatrixXd inv;
  PQMoments pq;
};

Core compute_core(const Eigen::VectorXd& theta, const Dataset& data,
                  Link link) {
  Core core;
  core.info = exp_info(theta, data, link);
  double condition = 0.0;
  if (!spd_inverse(core.info, core.inv, condition))
    throw SingularInformationError(condition);
  core.pq = pq_moments(theta, data, link);
  return core;
}

// tr(A B) for symmetric A, B.
double trace_prod(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return A.cwiseProduct(B).sum();
}

Eigen::VectorXd a_star_impl(const Core& core) {
  const int d = static_cast<int>(core.info.rows());
  Eigen::VectorXd A(d);
  for (int r = 0; r < d; ++r)
    A[r] = 0.5 * trace_prod(core.inv, core.pq.P[static_cast<size_t>(r)] +
                                          core.pq.Q[static_cast<size_t>(r)]);
  return A;
}

Eigen::VectorXd median_impl(const Core& core) {
  const int d = static_cast<int>(core.info.rows());
  std::vector<Eigen::MatrixXd> M(static_cast<size_t>(d));
  for (int t = 0; t < d; ++t)
    M[static_cast<size_t>(t)] = core.pq.P[static_cast<size_t>(t)] / 3.0 +
                                core.pq.Q[static_cast<size_t>(t)] / 2.0;
  Eigen::VectorXd F(d);
  for (int r = 0; r < d; ++r) {
    const Eigen::VectorXd col = core.inv.col(r);
    const Eigen::MatrixXd h = (col * col.transpose()) / core.inv(r, r);
    Eigen::VectorXd ftilde(d);
    for (int t = 0; t < d; ++t)
      ftilde[t] = trace_prod(h, M[static_cast<size_t>(t)]);
    F[r] = col.dot(ftilde);
  }
  return F;
}

}  // namespace

Method method_from_name(std::string_view name) {
  if (name == "ml") return Method::ml;
  if (name == "mean-br") return Method::mean_br;
  if (name == "median-br") return Method::median_br;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected ml, mean-br, or median-br)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::ml:
      return "ml";
    case Method::mean_br:
      return "mean-br";
    case Method::median_br:
      return "median-br";
  }
  throw std::logic_error("method_name: unreachable");
}

PQMoments pq_moments(const Eigen::VectorXd& theta, const Dataset& data,
                     Link link) {
  const int d = data.dim();
  PQMoments out;
  out.P.assign(static_cast<size_t>(d), Eigen::MatrixXd::Zero(d, d));
  out.Q.assign(static_cast<size_t>(d), Eigen::MatrixXd::Zero(d, d));
  ObsWork work;
  for (int i = 0; i < data.n(); ++i) {
    per_obs_quantities(theta, data.X.row(i), data.c, link, work);
    for (int j = 0; j < data.c; ++j) {
      const double wp = data.w[i] * work.prob[j];
      if (!(wp > 0.0)) continue;
      const Eigen::VectorXd& uj = work.u.col(j);
      const Eigen::MatrixXd outer = wp * (uj * uj.transpose());
      const Eigen::MatrixXd& Jj = work.J[static_cast<size_t>(j)];
      for (int r = 0; r < d; ++r) {
        out.P[static_cast<size_t>(r)] += outer * uj[r];
        out.Q[static_cast<size_t>(r)] -= (wp * uj[r]) * Jj;
      }
    }
  }
  return out;
}

Eigen::MatrixXd invert_info(const Eigen::MatrixXd& info, double* condition) {
  Eigen::MatrixXd inverse;
  double cond = 0.0;
  if (!spd_inverse(info, inverse, cond)) throw SingularInformationError(cond);
  if (condition != nullptr) *condition = cond;
  return inverse;
}

bool try_invert_info(const Eigen::MatrixXd& info, Eigen::MatrixXd& inverse,
                     double& condition) {
  return spd_inverse(info, inverse, condition);
}

Eigen::VectorXd a_star(const Eigen::VectorXd& theta, const Dataset& data,
                       Link link) {
  return a_star_impl(compute_core(theta, data, link));
}

Eigen::VectorXd median_modification(const Eigen::VectorXd& theta,
                                    const Dataset& data, Link link) {
  return median_impl(compute_core(theta, data, link));
}

Eigen::VectorXd adjusted_score(const Eigen::VectorXd& theta,
                               const Dataset& data, Link link, Method method) {
  return adjusted_score_with_info(theta, data, link, method).first;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> adjusted_score_with_info(
    const Eigen::VectorXd& theta, const Dataset& data, Link link,
    Method method) {
  Eigen::VectorXd U = score(theta, data, link);
  if (method == Method::ml) return {U, exp_info(theta, data, link)};
  Core core = compute_core(theta, data, link);
  U += a_star_impl(core);
  if (method == Method::median_br) U -= core.info * median_impl(core);
  return {U, std::move(core.info)};
}

}  // namespace clmbr
