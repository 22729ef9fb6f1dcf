#include "clmbr/effects.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clmbr {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double expit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double gamma_measure(Link link, double beta) {
  switch (link) {
    case Link::logit:
      return expit(-beta / kSqrt2);
    case Link::probit:
      return normal_cdf(-beta / kSqrt2);
    case Link::cloglog:
      // latent extreme-value errors: the difference is logistic
      return expit(-beta);
  }
  throw std::logic_error("gamma_measure: unreachable");
}

bool gamma_is_approximate(Link link) { return link == Link::logit; }

double gamma_se(Link link, double beta, double se_beta) {
  double slope = 0.0;
  switch (link) {
    case Link::logit: {
      const double g = expit(-beta / kSqrt2);
      slope = g * (1.0 - g) / kSqrt2;
      break;
    }
    case Link::probit:
      slope = normal_pdf(-beta / kSqrt2) / kSqrt2;
      break;
    case Link::cloglog: {
      const double g = expit(-beta);
      slope = g * (1.0 - g);
      break;
    }
  }
  return slope * se_beta;
}

std::pair<double, double> wald_interval(double estimate, double se,
                                        double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("wald_interval: level must lie in (0,1)");
  const double z = normal_quantile(0.5 + level / 2.0);
  return {estimate - z * se, estimate + z * se};
}

EffectEstimate gamma_effect(Link link, double beta, double se_beta,
                            double level) {
  EffectEstimate out;
  out.gamma = gamma_measure(link, beta);
  out.se = gamma_se(link, beta, se_beta);
  // interval on the beta scale mapped through the decreasing gamma transform;
  // endpoints swap and land in [0,1] by construction
  auto [blo, bhi] = wald_interval(beta, se_beta, level);
  out.lower = std::clamp(gamma_measure(link, bhi), 0.0, 1.0);
  out.upper = std::clamp(gamma_measure(link, blo), 0.0, 1.0);
  out.level = level;
  out.approximate = gamma_is_approximate(link);
  return out;
}

}  // namespace clmbr
