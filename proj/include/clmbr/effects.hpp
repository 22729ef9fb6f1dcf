#pragma once

#include <utility>

#include "clmbr/links.hpp"

namespace clmbr {

// Ordinal superiority: gamma = Pr(Y1 > Y2) + Pr(Y1 = Y2)/2 for two
// observations that differ only in a binary covariate with slope beta,
// expressed on the latent scale. Exact for probit and cloglog; the logistic
// expression uses the common logistic/normal latent approximation.
double gamma_measure(Link link, double beta);

// True when gamma_measure is approximate for this link (logit only).
bool gamma_is_approximate(Link link);

// Delta-method standard error |d gamma / d beta| * se_beta.
double gamma_se(Link link, double beta, double se_beta);

// estimate -/+ z_{(1+level)/2} * se; throws std::domain_error unless
// level lies in (0,1).
std::pair<double, double> wald_interval(double estimate, double se,
                                        double level = 0.95);

struct EffectEstimate {
  double gamma = 0.5;
  double se = 0.0;
  double lower = 0.0;   // beta-scale Wald interval mapped through gamma
  double upper = 1.0;
  double level = 0.95;
  bool approximate = false;
};

// gamma, its delta-method SE, and a clamped Wald interval in one shot.
EffectEstimate gamma_effect(Link link, double beta, double se_beta,
                            double level = 0.95);

}  // namespace clmbr
