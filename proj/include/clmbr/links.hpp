#pragma once

#include <string>
#include <string_view>

namespace clmbr {

// Link families for cumulative link models. Each supplies the latent-error
// CDF G, its density g = G', the derivative g' = G'', and the quantile G^{-1}.
enum class Link { logit, probit, cloglog };

// G(eta). Saturates to exactly 0 or 1 where the closed form underflows in
// double precision; never returns NaN for finite eta.
double link_cdf(Link link, double eta);

// g(eta) = dG/deta, nonnegative.
double link_pdf(Link link, double eta);

// g'(eta) = d2G/deta2.
double link_pdf_prime(Link link, double eta);

// G^{-1}(p) for p in (0,1); throws std::domain_error otherwise.
double link_quantile(Link link, double p);

// Name mapping used by the CLI and config files: "logit", "probit", "cloglog".
Link link_from_name(std::string_view name);
std::string link_name(Link link);

// Standard normal helpers shared by the probit link and Wald intervals.
double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);

}  // namespace clmbr
