#include "clmbr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace clmbr {

namespace {

// Clamped eigendecomposition inverse for the terminal variance matrix: the
// result is always finite, with enormous diagonals exactly where the
// information has collapsed (which is what boundary detection looks for).
Eigen::MatrixXd terminal_vcov(const Eigen::MatrixXd& info) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double floor = 1e-300 * std::max(lam.maxCoeff(), 1.0);
  Eigen::VectorXd inv_lam(lam.size());
  for (int i = 0; i < lam.size(); ++i) inv_lam[i] = 1.0 / std::max(lam[i], floor);
  return es.eigenvectors() * inv_lam.asDiagonal() * es.eigenvectors().transpose();
}

// True when the parameter sup-norm grew strictly over each of the last five
// accepted iterations: the signature of estimates marching to infinity.
bool diverging(const std::vector<double>& norm_history) {
  const size_t k = norm_history.size();
  if (k < 6) return false;
  for (size_t i = k - 5; i < k; ++i)
    if (!(norm_history[i] > norm_history[i - 1])) return false;
  return true;
}

int count_observed(const Dataset& data) {
  std::set<int> seen(data.y.begin(), data.y.end());
  return static_cast<int>(seen.size());
}

}  // namespace

std::string boundary_flag_name(BoundaryFlag flag) {
  switch (flag) {
    case BoundaryFlag::interior:
      return "interior";
    case BoundaryFlag::plus_infinity:
      return "+inf";
    case BoundaryFlag::minus_infinity:
      return "-inf";
    case BoundaryFlag::merged_cutpoint:
      return "merged";
  }
  throw std::logic_error("boundary_flag_name: unreachable");
}

void FitOptions::validate() const {
  if (max_iter < 1) throw std::invalid_argument("fit options: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("fit options: tol must be > 0");
  if (max_halvings < 0)
    throw std::invalid_argument("fit options: max_halvings must be >= 0");
  if (!(estimate_threshold > 0.0) || !(se_threshold > 0.0))
    throw std::invalid_argument("fit options: boundary thresholds must be > 0");
  if (!(merge_tolerance > 0.0))
    throw std::invalid_argument("fit options: merge_tolerance must be > 0");
}

bool FitResult::boundary() const {
  return std::any_of(flags.begin(), flags.end(),
                     [](BoundaryFlag f) { return f != BoundaryFlag::interior; });
}

Eigen::VectorXd starting_values(const Dataset& data, Link link) {
  const int c = data.c;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(data.dim());
  for (int j = 1; j < c; ++j)
    theta[j - 1] = link_quantile(link, static_cast<double>(j) / c);
  return theta;
}

std::pair<Dataset, GroupingMap> group_zero_categories(const Dataset& data) {
  data.validate();
  const int c = data.c;
  const std::vector<double> counts = data.category_counts();

  // Keep both extremes and every observed middle category; an unobserved
  // middle category is absorbed by its nearest kept neighbour to the right.
  std::vector<bool> kept(static_cast<size_t>(c), false);
  for (int j = 1; j <= c; ++j)
    kept[static_cast<size_t>(j - 1)] =
        (j == 1 || j == c || counts[static_cast<size_t>(j - 1)] > 0.0);

  GroupingMap gmap;
  gmap.original_c = c;
  gmap.map.resize(static_cast<size_t>(c));
  int next_index = 0;
  // Assign fitted indices left to right; an unkept category inherits the
  // index of the next kept one, so scan from the right.
  std::vector<int> fitted(static_cast<size_t>(c), 0);
  for (int j = 1; j <= c; ++j)
    if (kept[static_cast<size_t>(j - 1)]) fitted[static_cast<size_t>(j - 1)] = ++next_index;
  gmap.fitted_c = next_index;
  for (int j = c - 1; j >= 1; --j)
    if (!kept[static_cast<size_t>(j - 1)])
      fitted[static_cast<size_t>(j - 1)] = fitted[static_cast<size_t>(j)];
  for (int j = 1; j <= c; ++j) gmap.map[static_cast<size_t>(j - 1)] = fitted[static_cast<size_t>(j - 1)];

  Dataset grouped = data;
  grouped.c = gmap.fitted_c;
  for (auto& yi : grouped.y) yi = gmap.map[static_cast<size_t>(yi - 1)];

  if (count_observed(grouped) < 2)
    throw DegenerateDataError(
        "fewer than 2 distinct observed categories after grouping");
  return {std::move(grouped), std::move(gmap)};
}

std::vector<BoundaryFlag> detect_boundary(const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& se, int c,
                                          const FitOptions& options) {
  const int d = static_cast<int>(theta.size());
  std::vector<BoundaryFlag> flags(static_cast<size_t>(d), BoundaryFlag::interior);
  for (int r = 0; r < d; ++r) {
    if (std::fabs(theta[r]) > options.estimate_threshold &&
        se[r] > options.se_threshold)
      flags[static_cast<size_t>(r)] = theta[r] > 0.0 ? BoundaryFlag::plus_infinity
                                                     : BoundaryFlag::minus_infinity;
  }
  for (int j = 0; j + 1 < c - 1; ++j) {
    // a collision pins the gap itself (its variance vanishes) while the two
    // estimates keep the finite uncertainty of the shared cutpoint, so the
    // gap alone is the signature
    if (theta[j + 1] - theta[j] < options.merge_tolerance) {
      for (int r : {j, j + 1})
        if (flags[static_cast<size_t>(r)] == BoundaryFlag::interior)
          flags[static_cast<size_t>(r)] = BoundaryFlag::merged_cutpoint;
    }
  }
  return flags;
}

FitResult fit(const Dataset& data, const FitOptions& options) {
  options.validate();
  data.validate();

  Dataset work_data;
  GroupingMap gmap;
  if (options.group_zero_counts) {
    std::tie(work_data, gmap) = group_zero_categories(data);
  } else {
    work_data = data;
    gmap.original_c = gmap.fitted_c = data.c;
    gmap.map.resize(static_cast<size_t>(data.c));
    for (int j = 1; j <= data.c; ++j) gmap.map[static_cast<size_t>(j - 1)] = j;
    if (count_observed(work_data) < 2)
      throw DegenerateDataError("fewer than 2 distinct observed categories");
  }
  const int c = work_data.c;
  const int d = work_data.dim();

  Eigen::VectorXd theta;
  if (options.start.has_value()) {
    theta = *options.start;
    if (theta.size() != d)
      throw std::invalid_argument("fit: starting value has dimension " +
                                  std::to_string(theta.size()) + ", expected " +
                                  std::to_string(d));
    if (!cutpoints_ordered(theta, c))
      throw std::invalid_argument("fit: starting cutpoints must be strictly increasing");
  } else {
    theta = starting_values(work_data, options.link);
  }

  FitResult result;
  result.method = options.method;
  result.link = options.link;
  result.c = c;
  result.grouping = gmap;

  auto evaluate = [&](const Eigen::VectorXd& point) {
    return adjusted_score_with_info(point, work_data, options.link,
                                    options.method);
  };

  std::pair<Eigen::VectorXd, Eigen::MatrixXd> cur = evaluate(theta);
  std::vector<double> theta_norms{theta.lpNorm<Eigen::Infinity>()};

  for (int it = 1; it <= options.max_iter; ++it) {
    const double cur_norm = cur.first.lpNorm<Eigen::Infinity>();
    result.trace.push_back(cur_norm);
    result.iterations = it;
    if (cur_norm < options.tol) {
      result.converged = true;
      break;
    }

    Eigen::MatrixXd inv;
    double condition = 0.0;
    if (!try_invert_info(cur.second, inv, condition)) {
      bool collided = false;
      for (int j = 0; j + 1 < c - 1; ++j)
        if (theta[j + 1] - theta[j] < options.merge_tolerance) collided = true;
      // diverging or collided iterates sit on the boundary; the flags below
      // classify them, so only an interior singularity is a hard failure
      if (diverging(theta_norms) || collided) break;
      throw NumericalFailureError(
          "singular expected information (condition estimate " +
          std::to_string(condition) + ") at iteration " + std::to_string(it));
    }
    const Eigen::VectorXd step = inv * cur.first;

    bool accepted = false;
    double scale = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      Eigen::VectorXd cand = theta + scale * step;
      if (!cutpoints_ordered(cand, c)) continue;
      std::pair<Eigen::VectorXd, Eigen::MatrixXd> cand_eval;
      try {
        cand_eval = evaluate(cand);
      } catch (const SingularInformationError&) {
        continue;  // treat like an inadmissible step and halve again
      }
      if (cand_eval.first.lpNorm<Eigen::Infinity>() <= cur_norm) {
        theta = std::move(cand);
        cur = std::move(cand_eval);
        theta_norms.push_back(theta.lpNorm<Eigen::Infinity>());
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stalled; boundary flags classify the outcome
  }

  result.theta = theta;
  result.vcov = terminal_vcov(cur.second);
  result.se = result.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
  result.flags = detect_boundary(result.theta, result.se, c, options);
  return result;
}

OriginalView original_view(const FitResult& result) {
  const GroupingMap& gm = result.grouping;
  const int c0 = gm.original_c;
  const int p = static_cast<int>(result.theta.size()) - (result.c - 1);
  const int d0 = c0 - 1 + p;

  OriginalView view;
  view.theta.resize(d0);
  view.se.resize(d0);
  view.flags.assign(static_cast<size_t>(d0), BoundaryFlag::interior);

  for (int j = 1; j <= c0 - 1; ++j) {
    // Original cutpoint j separates original categories j and j+1. When both
    // sit in the same fitted category the boundary collapsed onto the left
    // edge of that fitted category.
    const int left = gm.map[static_cast<size_t>(j - 1)];
    const int right = gm.map[static_cast<size_t>(j)];
    const int fitted_cut = (left < right) ? left : left - 1;
    view.theta[j - 1] = result.theta[fitted_cut - 1];
    view.se[j - 1] = result.se[fitted_cut - 1];
    view.flags[static_cast<size_t>(j - 1)] =
        (left < right) ? result.flags[static_cast<size_t>(fitted_cut - 1)]
                       : BoundaryFlag::merged_cutpoint;
  }
  for (int k = 0; k < p; ++k) {
    view.theta[c0 - 1 + k] = result.theta[result.c - 1 + k];
    view.se[c0 - 1 + k] = result.se[result.c - 1 + k];
    view.flags[static_cast<size_t>(c0 - 1 + k)] =
        result.flags[static_cast<size_t>(result.c - 1 + k)];
  }
  return view;
}

}  // namespace clmbr
