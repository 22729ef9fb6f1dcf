#include "clmbr/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "clmbr/rng.hpp"

namespace clmbr {

namespace {

constexpr long kMaxOutcomes = 6561;  // 3^8; brute force stays tractable below this

long outcome_count(const Dataset& design) {
  long total = 1;
  for (int i = 0; i < design.n(); ++i) {
    total *= design.c;
    if (total > kMaxOutcomes)
      throw std::invalid_argument(
          "enumeration oracle: c^n exceeds 6561 outcomes");
  }
  return total;
}

bool advance(std::vector<int>& y, int c) {
  for (auto& yi : y) {
    if (yi < c) {
      ++yi;
      return true;
    }
    yi = 1;
  }
  return false;
}

}  // namespace

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& theta, double step) {
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd point = theta;
  for (int r = 0; r < theta.size(); ++r) {
    point[r] = theta[r] + step;
    const double hi = f(point);
    point[r] = theta[r] - step;
    const double lo = f(point);
    point[r] = theta[r];
    grad[r] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& theta, double step) {
  const int d = static_cast<int>(theta.size());
  Eigen::MatrixXd hess(d, d);
  Eigen::VectorXd point = theta;
  const double f0 = f(theta);
  for (int r = 0; r < d; ++r) {
    point[r] = theta[r] + step;
    const double hi = f(point);
    point[r] = theta[r] - step;
    const double lo = f(point);
    point[r] = theta[r];
    hess(r, r) = (hi - 2.0 * f0 + lo) / (step * step);
  }
  for (int r = 0; r < d; ++r) {
    for (int s = r + 1; s < d; ++s) {
      point[r] = theta[r] + step;
      point[s] = theta[s] + step;
      const double pp = f(point);
      point[s] = theta[s] - step;
      const double pm = f(point);
      point[r] = theta[r] - step;
      const double mm = f(point);
      point[s] = theta[s] + step;
      const double mp = f(point);
      point[r] = theta[r];
      point[s] = theta[s];
      hess(r, s) = hess(s, r) = (pp - pm - mp + mm) / (4.0 * step * step);
    }
  }
  return hess;
}

PQMoments enumerate_moments(const Eigen::VectorXd& theta, const Dataset& design,
                            Link link) {
  design.validate();
  for (int i = 0; i < design.n(); ++i)
    if (design.w[i] != 1.0)
      throw std::invalid_argument("enumeration oracle: weights must be 1");
  outcome_count(design);

  const int n = design.n();
  const int c = design.c;
  const int d = design.dim();

  std::vector<ObsWork> per_obs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    per_obs_quantities(theta, design.X.row(i), c, link, per_obs[static_cast<size_t>(i)]);

  PQMoments out;
  out.P.assign(static_cast<size_t>(d), Eigen::MatrixXd::Zero(d, d));
  out.Q.assign(static_cast<size_t>(d), Eigen::MatrixXd::Zero(d, d));

  std::vector<int> y(static_cast<size_t>(n), 1);
  do {
    double prob = 1.0;
    Eigen::VectorXd U = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      const ObsWork& w = per_obs[static_cast<size_t>(i)];
      const int j = y[static_cast<size_t>(i)];
      prob *= w.prob[j - 1];
      U += w.u.col(j - 1);
      J += w.J[static_cast<size_t>(j - 1)];
    }
    const Eigen::MatrixXd UU = prob * (U * U.transpose());
    for (int r = 0; r < d; ++r) {
      out.P[static_cast<size_t>(r)] += UU * U[r];
      out.Q[static_cast<size_t>(r)] -= (prob * U[r]) * J;
    }
  } while (advance(y, c));
  return out;
}

double EnumerationReport::prob_at_or_below(int r, double value) const {
  double mass = 0.0;
  double included = 0.0;
  for (const OutcomeFit& of : outcomes) {
    if (!of.ok) continue;
    included += of.prob;
    const BoundaryFlag flag = of.flags[static_cast<size_t>(r)];
    bool below;
    if (flag == BoundaryFlag::minus_infinity)
      below = true;
    else if (flag == BoundaryFlag::plus_infinity)
      below = false;
    else
      below = of.theta[r] <= value;
    if (below) mass += of.prob;
  }
  if (included <= 0.0)
    throw std::runtime_error("enumeration report: no successful fits");
  return mass / included;
}

EnumerationReport exact_estimator_distribution(const Dataset& design,
                                               const Eigen::VectorXd& theta0,
                                               Link link,
                                               const FitOptions& options) {
  design.validate();
  outcome_count(design);
  const int n = design.n();
  const int c = design.c;

  std::vector<Eigen::VectorXd> probs(static_cast<size_t>(n));
  const ParamVector pv = ParamVector::split(theta0, c);
  for (int i = 0; i < n; ++i)
    probs[static_cast<size_t>(i)] = cell_probs(pv, design.X.row(i), link);

  EnumerationReport report;
  std::vector<int> y(static_cast<size_t>(n), 1);
  do {
    OutcomeFit of;
    of.prob = 1.0;
    for (int i = 0; i < n; ++i)
      of.prob *= probs[static_cast<size_t>(i)][y[static_cast<size_t>(i)] - 1];
    report.total_prob += of.prob;

    Dataset data(design.X, y, c, design.w);
    try {
      const FitResult res = fit(data, options);
      of.ok = true;
      OriginalView view = original_view(res);
      of.theta = std::move(view.theta);
      of.flags = std::move(view.flags);
      bool any_boundary = false;
      for (BoundaryFlag f : of.flags)
        if (f != BoundaryFlag::interior) any_boundary = true;
      if (any_boundary) report.boundary_prob += of.prob;
    } catch (const std::exception&) {
      of.ok = false;
      report.excluded_prob += of.prob;
      ++report.failures;
    }
    report.outcomes.push_back(std::move(of));
  } while (advance(y, c));
  return report;
}

double latent_gamma_mc(Link link, double beta, long draws, std::uint64_t seed,
                       double* se_out) {
  if (draws < 1) throw std::invalid_argument("latent_gamma_mc: draws must be >= 1");
  Rng rng(seed);
  long hits = 0;
  for (long k = 0; k < draws; ++k) {
    const double e1 = link_quantile(link, rng.uniform());
    const double e2 = link_quantile(link, rng.uniform());
    if (e1 - e2 > beta) ++hits;
  }
  const double gamma = static_cast<double>(hits) / static_cast<double>(draws);
  if (se_out != nullptr)
    *se_out = std::sqrt(gamma * (1.0 - gamma) / static_cast<double>(draws));
  return gamma;
}

}  // namespace clmbr
