#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clmbr/solver.hpp"

namespace clmbr {

// Covariate generator for simulated designs.
struct CovariateSpec {
  enum class Kind { normal, bernoulli, poisson };
  Kind kind = Kind::normal;
  double a = 0.0;  // normal mean / bernoulli probability / poisson mean
  double b = 1.0;  // normal standard deviation

  // Accepts "normal(m,s)", "bernoulli(p)", "poisson(m)".
  static CovariateSpec parse(const std::string& text);
  std::string to_string() const;
};

// A complete simulation study: one link, one design, all requested methods.
struct SimConfig {
  std::string name = "custom";
  Link link = Link::logit;
  int c = 3;
  int n = 50;
  int replications = 1000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  Eigen::VectorXd theta0;
  std::vector<CovariateSpec> covariates;     // ignored when fixed_design set
  std::optional<Eigen::MatrixXd> fixed_design;
  std::vector<Method> methods;
  std::vector<int> gamma_columns;  // 1-based slope indices tracked as gamma
  FitOptions base_options;         // method and link fields are overridden

  void validate() const;  // throws std::invalid_argument
};

// Per-parameter summary across replications.
struct ParamSummary {
  std::string name;     // alpha1.., beta1..
  double theta0 = 0.0;
  double pu = 0.0;      // % of estimates at or below theta0 (signed infinities count)
  double rb = 0.0;      // % relative bias over finite replications
  bool rb_absolute = false;  // theta0 == 0: rb holds the raw mean bias instead
  double wald = 0.0;    // % coverage of 95% Wald intervals over finite replications
};

struct MethodSummary {
  Method method = Method::ml;
  int r_total = 0;     // replications attempted
  int r_ok = 0;        // fits that returned a result
  int r_finite = 0;    // fits with no infinite component
  int boundary_count = 0;
  double boundary_pct = 0.0;  // % of ok fits with any boundary flag
  int failures = 0;           // fits that raised an error
  std::vector<ParamSummary> params;
  std::vector<double> gamma_true;  // per tracked column
  std::vector<double> gamma_rb;    // % relative bias of gamma over finite fits
};

struct SimSummary {
  SimConfig config;
  std::vector<MethodSummary> methods;
};

// Fixed design for a study: one column per covariate spec, drawn column by
// column from a dedicated stream so the matrix depends only on (specs, n,
// seed).
Eigen::MatrixXd generate_design(const std::vector<CovariateSpec>& specs, int n,
                                std::uint64_t seed);

// One simulated response vector under theta0 (categories 1..c).
std::vector<int> simulate_response(const Eigen::VectorXd& theta0,
                                   const Eigen::MatrixXd& X, int c, Link link,
                                   std::uint64_t seed);

// Summaries for a plain vector of estimates; the building block the study
// aggregation uses for finite replications.
struct ScalarMetrics {
  double pu = 0.0;
  double rb = 0.0;
  bool rb_absolute = false;
  double wald = 0.0;
};
ScalarMetrics scalar_metrics(const std::vector<double>& estimates,
                             const std::vector<double>& ses, double theta0);

// Runs the full study: replications split across threads, per-replication
// seeds derived from config.seed, identical output for any thread count.
SimSummary run_study(const SimConfig& config);

// Serialization: one CSV/JSON row per method x parameter plus per-method
// gamma and boundary rows.
std::string summary_to_csv(const SimSummary& summary);
std::string summary_to_json(const SimSummary& summary);
// Aligned text table for terminal output.
std::string summary_to_table(const SimSummary& summary);

}  // namespace clmbr
