#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "clmbr/solver.hpp"

namespace clmbr {

// Central finite differences, used to cross-check analytic derivatives.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& theta, double step = 1e-5);
Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& theta, double step = 1e-4);

// Exact P_r and Q_r by brute-force enumeration of all c^n outcomes of the
// design (weights must be 1); validates the per-observation accumulation.
// Throws std::invalid_argument when c^n exceeds 6561.
PQMoments enumerate_moments(const Eigen::VectorXd& theta, const Dataset& design,
                            Link link);

// One fitted outcome of the response space: its probability under theta0 and
// the estimate (per-parameter values with boundary flags) or a failure mark.
struct OutcomeFit {
  double prob = 0.0;
  bool ok = false;                  // false when fitting raised an error
  Eigen::VectorXd theta;            // mapped back to the original parameter space
  std::vector<BoundaryFlag> flags;  // per original parameter
};

// Exact finite-sample distribution of the estimator over all c^n outcomes.
struct EnumerationReport {
  std::vector<OutcomeFit> outcomes;
  double total_prob = 0.0;     // sums to 1 over all outcomes
  double excluded_prob = 0.0;  // mass of outcomes whose fit raised an error
  double boundary_prob = 0.0;  // mass of outcomes with any boundary flag
  int failures = 0;

  // Pr(estimate_r <= value | fit succeeded); -inf counts as below, +inf as
  // above, merged cutpoints compare by their numeric value.
  double prob_at_or_below(int r, double value) const;
};

// Fits every outcome of the design at its theta0-probability. Outcomes whose
// fit raises an error (e.g. a single observed category) are recorded as
// excluded mass. Throws std::invalid_argument when c^n exceeds 6561.
EnumerationReport exact_estimator_distribution(const Dataset& design,
                                               const Eigen::VectorXd& theta0,
                                               Link link,
                                               const FitOptions& options);

// Monte Carlo estimate of Pr(Y1 > Y2) + Pr(Y1 = Y2)/2 on the latent scale for
// a binary covariate contrast beta, with a standard error estimate; used to
// validate the closed-form gamma expressions.
double latent_gamma_mc(Link link, double beta, long draws, std::uint64_t seed,
                       double* se_out = nullptr);

}  // namespace clmbr
