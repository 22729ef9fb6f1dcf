#pragma once

#include <optional>
#include <vector>

#include "clmbr/adjust.hpp"
#include "clmbr/model.hpp"

namespace clmbr {

// Per-parameter classification of the fitted value.
enum class BoundaryFlag { interior, plus_infinity, minus_infinity, merged_cutpoint };

std::string boundary_flag_name(BoundaryFlag flag);

struct FitOptions {
  Method method = Method::ml;
  Link link = Link::logit;
  int max_iter = 200;
  double tol = 1e-10;            // sup-norm stopping threshold on the adjusted score
  int max_halvings = 20;         // step halvings per iteration
  double estimate_threshold = 20.0;   // |theta_r| above this marks a candidate boundary
  double se_threshold = 200.0;        // ...when the matching SE also exceeds this
  double merge_tolerance = 1e-6;      // adjacent cutpoints closer than this are merged
  bool group_zero_counts = true;      // diagnostic runs may disable the grouping pass
  std::optional<Eigen::VectorXd> start;  // warm start; must have ordered cutpoints

  void validate() const;  // throws std::invalid_argument
};

// Maps original categories onto the categories actually fitted after
// zero-count middle categories were merged into their right neighbours.
struct GroupingMap {
  int original_c = 0;
  int fitted_c = 0;
  std::vector<int> map;  // map[j-1] = fitted category of original category j

  bool identity() const { return original_c == fitted_c; }
};

struct FitResult {
  Method method = Method::ml;
  Link link = Link::logit;
  int c = 0;                       // fitted category count
  Eigen::VectorXd theta;           // (alpha, beta) in the fitted space
  Eigen::VectorXd se;              // sqrt(diag(vcov))
  Eigen::MatrixXd vcov;            // inverse expected information at theta
  bool converged = false;
  int iterations = 0;
  std::vector<BoundaryFlag> flags; // per parameter
  GroupingMap grouping;
  std::vector<double> trace;       // sup-norm of the adjusted score per iteration

  bool boundary() const;           // any non-interior flag
};

// Cutpoints that split the observed frequencies into c equal cells and zero
// slopes: alpha_j = quantile(j / c).
Eigen::VectorXd starting_values(const Dataset& data, Link link);

// Merges zero-count middle categories into their right neighbours; extreme
// zero-count categories are kept (they drive boundary estimates instead).
// Throws DegenerateDataError when fewer than 2 distinct categories remain
// observed.
std::pair<Dataset, GroupingMap> group_zero_categories(const Dataset& data);

// Classifies each parameter at termination: +/-infinity when |theta_r| and
// se_r both blow past the thresholds; merged_cutpoint for adjacent cutpoints
// within merge_tolerance of each other.
std::vector<BoundaryFlag> detect_boundary(const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& se, int c,
                                          const FitOptions& options);

// Fisher scoring on the adjusted score equation with step-halving on
// sup-norm increase or cutpoint-order violation. Nonconvergence with a
// diverging ML trace is reported through boundary flags, not as an error.
FitResult fit(const Dataset& data, const FitOptions& options);

// View of a (possibly grouped) fit in the original parameter space: a
// cutpoint whose neighbouring categories were merged inherits the value and
// SE of the boundary they collapsed onto and is flagged merged_cutpoint.
struct OriginalView {
  Eigen::VectorXd theta;
  Eigen::VectorXd se;
  std::vector<BoundaryFlag> flags;
};

OriginalView original_view(const FitResult& result);

}  // namespace clmbr
