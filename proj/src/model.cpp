#include "clmbr/model.hpp"

#include <cmath>
#include <stdexcept>

namespace clmbr {

namespace {

// Floor applied inside logs and divisions only, so degenerate probabilities
// never produce NaN while untouched values stay exact.
constexpr double kProbFloor = 1e-300;

double floored(double p) { return p > kProbFloor ? p : kProbFloor; }

}  // namespace

Dataset::Dataset(Eigen::MatrixXd X_, std::vector<int> y_, int c_)
    : X(std::move(X_)), y(std::move(y_)), c(c_) {
  w = Eigen::VectorXd::Ones(static_cast<int>(y.size()));
}

Dataset::Dataset(Eigen::MatrixXd X_, std::vector<int> y_, int c_,
                 Eigen::VectorXd w_)
    : X(std::move(X_)), y(std::move(y_)), c(c_), w(std::move(w_)) {}

void Dataset::validate() const {
  if (c < 2) throw std::invalid_argument("dataset: need at least 2 categories");
  const int n_ = n();
  if (n_ == 0) throw std::invalid_argument("dataset: no observations");
  if (X.rows() != n_)
    throw std::invalid_argument("dataset: X has " + std::to_string(X.rows()) +
                                " rows but y has " + std::to_string(n_));
  if (w.size() != n_)
    throw std::invalid_argument("dataset: w has " + std::to_string(w.size()) +
                                " entries but y has " + std::to_string(n_));
  for (int i = 0; i < n_; ++i) {
    if (y[i] < 1 || y[i] > c)
      throw std::invalid_argument("dataset: y[" + std::to_string(i) + "] = " +
                                  std::to_string(y[i]) + " outside 1.." +
                                  std::to_string(c));
    if (!(w[i] > 0.0) || std::fabs(w[i] - std::round(w[i])) > 1e-9)
      throw std::invalid_argument("dataset: w[" + std::to_string(i) +
                                  "] must be a positive integer");
  }
  if (!X.allFinite())
    throw std::invalid_argument("dataset: covariates must be finite");
}

std::vector<double> Dataset::category_counts() const {
  std::vector<double> counts(static_cast<size_t>(c), 0.0);
  for (int i = 0; i < n(); ++i) counts[static_cast<size_t>(y[i] - 1)] += w[i];
  return counts;
}

Eigen::VectorXd ParamVector::flatten() const {
  Eigen::VectorXd theta(dim());
  theta << alpha, beta;
  return theta;
}

ParamVector ParamVector::split(const Eigen::VectorXd& theta, int c) {
  if (c < 2 || theta.size() < c - 1)
    throw std::invalid_argument("ParamVector::split: theta too short for c");
  ParamVector out;
  out.alpha = theta.head(c - 1);
  out.beta = theta.tail(theta.size() - (c - 1));
  return out;
}

bool ParamVector::ordered() const {
  for (int j = 1; j < alpha.size(); ++j)
    if (!(alpha[j] > alpha[j - 1])) return false;
  return true;
}

bool cutpoints_ordered(const Eigen::VectorXd& theta, int c) {
  for (int j = 1; j < c - 1; ++j)
    if (!(theta[j] > theta[j - 1])) return false;
  return true;
}

Eigen::VectorXd cell_probs(const ParamVector& theta, const Eigen::RowVectorXd& x,
                           Link link) {
  if (!theta.ordered())
    throw std::invalid_argument("cell_probs: cutpoints must be strictly increasing");
  const int c = static_cast<int>(theta.alpha.size()) + 1;
  const double xb = theta.beta.size() > 0 ? x * theta.beta : 0.0;
  Eigen::VectorXd probs(c);
  double prev = 0.0;
  for (int j = 1; j < c; ++j) {
    const double G = link_cdf(link, theta.alpha[j - 1] + xb);
    probs[j - 1] = G - prev;
    prev = G;
  }
  probs[c - 1] = 1.0 - prev;
  return probs;
}

void ObsWork::resize(int d, int c) {
  prob.resize(c);
  u.resize(d, c);
  J.assign(static_cast<size_t>(c), Eigen::MatrixXd(d, d));
}

void per_obs_quantities(const Eigen::VectorXd& theta,
                        const Eigen::RowVectorXd& x, int c, Link link,
                        ObsWork& work) {
  const int p = static_cast<int>(x.size());
  const int d = c - 1 + p;
  work.resize(d, c);

  const double xb = p > 0 ? x * theta.tail(p) : 0.0;

  // Boundary conventions: G_0 = 0, G_c = 1, with vanishing g and g'.
  Eigen::VectorXd G = Eigen::VectorXd::Zero(c + 1);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(c + 1);
  Eigen::VectorXd gp = Eigen::VectorXd::Zero(c + 1);
  G[c] = 1.0;
  for (int j = 1; j < c; ++j) {
    const double eta = theta[j - 1] + xb;
    G[j] = link_cdf(link, eta);
    g[j] = link_pdf(link, eta);
    gp[j] = link_pdf_prime(link, eta);
  }

  // z_j = d eta_j / d theta: unit in slot j of the cutpoint block plus x in
  // the slope block; z_0 = z_c = 0.
  std::vector<Eigen::VectorXd> z(static_cast<size_t>(c + 1),
                                 Eigen::VectorXd::Zero(d));
  for (int j = 1; j < c; ++j) {
    z[static_cast<size_t>(j)][j - 1] = 1.0;
    if (p > 0) z[static_cast<size_t>(j)].tail(p) = x.transpose();
  }

  for (int j = 1; j <= c; ++j) {
    const size_t sj = static_cast<size_t>(j);
    const double pj = G[j] - G[j - 1];
    work.prob[j - 1] = pj;
    const double denom = floored(pj);
    const Eigen::VectorXd grad = g[j] * z[sj] - g[j - 1] * z[sj - 1];
    const Eigen::VectorXd uj = grad / denom;
    work.u.col(j - 1) = uj;
    Eigen::MatrixXd hess = gp[j] * (z[sj] * z[sj].transpose()) -
                           gp[j - 1] * (z[sj - 1] * z[sj - 1].transpose());
    work.J[static_cast<size_t>(j - 1)] = uj * uj.transpose() - hess / denom;
  }
}

double loglik(const Eigen::VectorXd& theta, const Dataset& data, Link link) {
  const int c = data.c;
  double ll = 0.0;
  ParamVector pv = ParamVector::split(theta, c);
  for (int i = 0; i < data.n(); ++i) {
    const double xb = data.p() > 0 ? data.X.row(i) * pv.beta : 0.0;
    const int j = data.y[i];
    const double upper = j < c ? link_cdf(link, pv.alpha[j - 1] + xb) : 1.0;
    const double lower = j > 1 ? link_cdf(link, pv.alpha[j - 2] + xb) : 0.0;
    ll += data.w[i] * std::log(floored(upper - lower));
  }
  return ll;
}

Eigen::VectorXd score(const Eigen::VectorXd& theta, const Dataset& data,
                      Link link) {
  const int d = data.dim();
  Eigen::VectorXd U = Eigen::VectorXd::Zero(d);
  ObsWork work;
  for (int i = 0; i < data.n(); ++i) {
    per_obs_quantities(theta, data.X.row(i), data.c, link, work);
    U += data.w[i] * work.u.col(data.y[i] - 1);
  }
  return U;
}

Eigen::MatrixXd obs_info(const Eigen::VectorXd& theta, const Dataset& data,
                         Link link) {
  const int d = data.dim();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
  ObsWork work;
  for (int i = 0; i < data.n(); ++i) {
    per_obs_quantities(theta, data.X.row(i), data.c, link, work);
    info += data.w[i] * work.J[static_cast<size_t>(data.y[i] - 1)];
  }
  return info;
}

Eigen::MatrixXd exp_info(const Eigen::VectorXd& theta, const Dataset& data,
                         Link link) {
  const int d = data.dim();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
  ObsWork work;
  for (int i = 0; i < data.n(); ++i) {
    per_obs_quantities(theta, data.X.row(i), data.c, link, work);
    for (int j = 0; j < data.c; ++j) {
      // a zero-mass cell contributes nothing; skipping it avoids the
      // 0 * (1/0) overflow at collided cutpoints
      if (!(work.prob[j] > 0.0)) continue;
      info += data.w[i] * work.prob[j] * work.J[static_cast<size_t>(j)];
    }
  }
  return info;
}

Eigen::VectorXd score_contrib(const Eigen::VectorXd& theta,
                              const Eigen::RowVectorXd& x, int j, int c,
                              Link link) {
  if (j < 1 || j > c) throw std::invalid_argument("score_contrib: bad category");
  ObsWork work;
  per_obs_quantities(theta, x, c, link, work);
  return work.u.col(j - 1);
}

Eigen::MatrixXd obs_info_contrib(const Eigen::VectorXd& theta,
                                 const Eigen::RowVectorXd& x, int j, int c,
                                 Link link) {
  if (j < 1 || j > c)
    throw std::invalid_argument("obs_info_contrib: bad category");
  ObsWork work;
  per_obs_quantities(theta, x, c, link, work);
  return work.J[static_cast<size_t>(j - 1)];
}

}  // namespace clmbr
