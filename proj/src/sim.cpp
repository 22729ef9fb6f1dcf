#include "clmbr/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "clmbr/effects.hpp"
#include "clmbr/rng.hpp"

namespace clmbr {

namespace {

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Cumulative probabilities G(alpha_j + x_i beta), one row per observation.
Eigen::MatrixXd cumulative_probs(const Eigen::VectorXd& theta0,
                                 const Eigen::MatrixXd& X, int c, Link link) {
  const int n = static_cast<int>(X.rows());
  const ParamVector pv = ParamVector::split(theta0, c);
  if (!pv.ordered())
    throw std::invalid_argument("simulate: theta0 cutpoints must be strictly increasing");
  Eigen::MatrixXd cum(n, c - 1);
  for (int i = 0; i < n; ++i) {
    const double xb = X.cols() > 0 ? X.row(i) * pv.beta : 0.0;
    for (int j = 0; j < c - 1; ++j)
      cum(i, j) = link_cdf(link, pv.alpha[j] + xb);
  }
  return cum;
}

std::vector<int> draw_response(const Eigen::MatrixXd& cum, int c, Rng& rng) {
  const int n = static_cast<int>(cum.rows());
  std::vector<int> y(static_cast<size_t>(n), c);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    for (int j = 0; j < c - 1; ++j) {
      if (u <= cum(i, j)) {
        y[static_cast<size_t>(i)] = j + 1;
        break;
      }
    }
  }
  return y;
}

struct Rep {
  bool ok = false;
  bool finite = false;
  bool bound = false;
  Eigen::VectorXd est;
  Eigen::VectorXd se;
  std::vector<BoundaryFlag> flags;
};

}  // namespace

CovariateSpec CovariateSpec::parse(const std::string& text) {
  const size_t open = text.find('(');
  const size_t close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("covariate spec '" + text +
                                "' must look like name(args)");
  const std::string name = text.substr(0, open);
  const std::string args = text.substr(open + 1, close - open - 1);
  std::vector<double> vals;
  std::stringstream ss(args);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument("covariate spec '" + text +
                                  "': cannot parse number '" + tok + "'");
    }
  }
  CovariateSpec spec;
  if (name == "normal") {
    if (vals.size() != 2)
      throw std::invalid_argument("normal(mean,sd) takes 2 arguments");
    if (!(vals[1] > 0.0))
      throw std::invalid_argument("normal(mean,sd): sd must be > 0");
    spec.kind = Kind::normal;
    spec.a = vals[0];
    spec.b = vals[1];
  } else if (name == "bernoulli") {
    if (vals.size() != 1)
      throw std::invalid_argument("bernoulli(p) takes 1 argument");
    if (!(vals[0] > 0.0 && vals[0] < 1.0))
      throw std::invalid_argument("bernoulli(p): p must lie in (0,1)");
    spec.kind = Kind::bernoulli;
    spec.a = vals[0];
  } else if (name == "poisson") {
    if (vals.size() != 1)
      throw std::invalid_argument("poisson(mean) takes 1 argument");
    if (!(vals[0] > 0.0))
      throw std::invalid_argument("poisson(mean): mean must be > 0");
    spec.kind = Kind::poisson;
    spec.a = vals[0];
  } else {
    throw std::invalid_argument("unknown covariate kind '" + name +
                                "' (expected normal, bernoulli, or poisson)");
  }
  return spec;
}

std::string CovariateSpec::to_string() const {
  switch (kind) {
    case Kind::normal:
      return "normal(" + format_num(a) + "," + format_num(b) + ")";
    case Kind::bernoulli:
      return "bernoulli(" + format_num(a) + ")";
    case Kind::poisson:
      return "poisson(" + format_num(a) + ")";
  }
  throw std::logic_error("CovariateSpec::to_string: unreachable");
}

void SimConfig::validate() const {
  if (c < 2) throw std::invalid_argument("sim config: c must be >= 2");
  if (n < 1) throw std::invalid_argument("sim config: n must be >= 1");
  if (replications < 1)
    throw std::invalid_argument("sim config: replications must be >= 1");
  if (methods.empty())
    throw std::invalid_argument("sim config: at least one method required");
  int p;
  if (fixed_design.has_value()) {
    if (static_cast<int>(fixed_design->rows()) != n)
      throw std::invalid_argument("sim config: fixed design must have n rows");
    p = static_cast<int>(fixed_design->cols());
  } else {
    p = static_cast<int>(covariates.size());
  }
  if (static_cast<int>(theta0.size()) != c - 1 + p)
    throw std::invalid_argument("sim config: theta0 must have length " +
                                std::to_string(c - 1 + p));
  if (!cutpoints_ordered(theta0, c))
    throw std::invalid_argument("sim config: theta0 cutpoints must be strictly increasing");
  for (int col : gamma_columns)
    if (col < 1 || col > p)
      throw std::invalid_argument("sim config: gamma column " +
                                  std::to_string(col) + " outside 1.." +
                                  std::to_string(p));
}

Eigen::MatrixXd generate_design(const std::vector<CovariateSpec>& specs, int n,
                                std::uint64_t seed) {
  Eigen::MatrixXd X(n, static_cast<int>(specs.size()));
  Rng rng(mix_seed(seed, 0));
  for (int k = 0; k < static_cast<int>(specs.size()); ++k) {
    const CovariateSpec& s = specs[static_cast<size_t>(k)];
    for (int i = 0; i < n; ++i) {
      switch (s.kind) {
        case CovariateSpec::Kind::normal:
          X(i, k) = s.a + s.b * rng.normal();
          break;
        case CovariateSpec::Kind::bernoulli:
          X(i, k) = rng.bernoulli(s.a);
          break;
        case CovariateSpec::Kind::poisson:
          X(i, k) = rng.poisson(s.a);
          break;
      }
    }
  }
  return X;
}

std::vector<int> simulate_response(const Eigen::VectorXd& theta0,
                                   const Eigen::MatrixXd& X, int c, Link link,
                                   std::uint64_t seed) {
  const Eigen::MatrixXd cum = cumulative_probs(theta0, X, c, link);
  Rng rng(seed);
  return draw_response(cum, c, rng);
}

ScalarMetrics scalar_metrics(const std::vector<double>& estimates,
                             const std::vector<double>& ses, double theta0) {
  if (estimates.empty())
    throw std::invalid_argument("scalar_metrics: no estimates");
  if (!ses.empty() && ses.size() != estimates.size())
    throw std::invalid_argument("scalar_metrics: ses length mismatch");
  ScalarMetrics m;
  const double count = static_cast<double>(estimates.size());
  double below = 0.0, mean = 0.0;
  for (double est : estimates) {
    if (est <= theta0) below += 1.0;
    mean += est;
  }
  mean /= count;
  m.pu = 100.0 * below / count;
  if (theta0 != 0.0) {
    m.rb = 100.0 * (mean - theta0) / theta0;
  } else {
    m.rb = mean - theta0;
    m.rb_absolute = true;
  }
  if (!ses.empty()) {
    const double z = normal_quantile(0.975);
    double covered = 0.0;
    for (size_t i = 0; i < estimates.size(); ++i)
      if (std::fabs(estimates[i] - theta0) <= z * ses[i]) covered += 1.0;
    m.wald = 100.0 * covered / count;
  }
  return m;
}

SimSummary run_study(const SimConfig& config) {
  config.validate();
  const Eigen::MatrixXd X =
      config.fixed_design.has_value()
          ? *config.fixed_design
          : generate_design(config.covariates, config.n, config.seed);
  const int c = config.c;
  const int p = static_cast<int>(X.cols());
  const int d = c - 1 + p;
  const long R = config.replications;
  const Eigen::MatrixXd cum = cumulative_probs(config.theta0, X, c, config.link);

  const size_t n_methods = config.methods.size();
  std::vector<std::vector<Rep>> recs(n_methods,
                                     std::vector<Rep>(static_cast<size_t>(R)));

  auto run_rep = [&](long r) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(r) + 1));
    const std::vector<int> y = draw_response(cum, c, rng);
    const Dataset data(X, y, c);
    for (size_t m = 0; m < n_methods; ++m) {
      FitOptions opt = config.base_options;
      opt.method = config.methods[m];
      opt.link = config.link;
      Rep& rep = recs[m][static_cast<size_t>(r)];
      try {
        const FitResult res = fit(data, opt);
        OriginalView view = original_view(res);
        rep.ok = true;
        rep.est = std::move(view.theta);
        rep.se = std::move(view.se);
        rep.flags = std::move(view.flags);
        rep.finite = true;
        for (BoundaryFlag f : rep.flags) {
          if (f != BoundaryFlag::interior) rep.bound = true;
          if (f == BoundaryFlag::plus_infinity || f == BoundaryFlag::minus_infinity)
            rep.finite = false;
        }
      } catch (const std::exception&) {
        rep.ok = false;
      }
    }
  };

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads > R) threads = static_cast<int>(R);
  if (threads == 1) {
    for (long r = 0; r < R; ++r) run_rep(r);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (long r = next.fetch_add(1); r < R; r = next.fetch_add(1)) run_rep(r);
      });
    }
    for (auto& th : pool) th.join();
  }

  SimSummary summary;
  summary.config = config;
  for (size_t m = 0; m < n_methods; ++m) {
    MethodSummary ms;
    ms.method = config.methods[m];
    ms.r_total = static_cast<int>(R);
    const std::vector<Rep>& rv = recs[m];
    for (const Rep& rep : rv) {
      if (!rep.ok) {
        ++ms.failures;
        continue;
      }
      ++ms.r_ok;
      if (rep.finite) ++ms.r_finite;
      if (rep.bound) ++ms.boundary_count;
    }
    ms.boundary_pct = ms.r_ok > 0 ? 100.0 * ms.boundary_count / ms.r_ok : 0.0;

    for (int r = 0; r < d; ++r) {
      ParamSummary ps;
      ps.name = r < c - 1 ? "alpha" + std::to_string(r + 1)
                          : "beta" + std::to_string(r - (c - 1) + 1);
      ps.theta0 = config.theta0[r];

      long below = 0;
      std::vector<double> finite_est, finite_se;
      finite_est.reserve(static_cast<size_t>(ms.r_finite));
      finite_se.reserve(static_cast<size_t>(ms.r_finite));
      for (const Rep& rep : rv) {
        if (!rep.ok) continue;
        const BoundaryFlag f = rep.flags[static_cast<size_t>(r)];
        const bool is_below = f == BoundaryFlag::minus_infinity ||
                              (f != BoundaryFlag::plus_infinity &&
                               rep.est[r] <= ps.theta0);
        if (is_below) ++below;
        if (rep.finite) {
          finite_est.push_back(rep.est[r]);
          finite_se.push_back(rep.se[r]);
        }
      }
      ps.pu = ms.r_ok > 0 ? 100.0 * static_cast<double>(below) / ms.r_ok : 0.0;
      if (!finite_est.empty()) {
        const ScalarMetrics sm = scalar_metrics(finite_est, finite_se, ps.theta0);
        ps.rb = sm.rb;
        ps.rb_absolute = sm.rb_absolute;
        ps.wald = sm.wald;
      }
      ms.params.push_back(std::move(ps));
    }

    for (int col : config.gamma_columns) {
      const int idx = c - 1 + col - 1;
      const double g0 = gamma_measure(config.link, config.theta0[idx]);
      double mean_g = 0.0;
      long cnt = 0;
      for (const Rep& rep : rv) {
        if (!rep.ok || !rep.finite) continue;
        mean_g += gamma_measure(config.link, rep.est[idx]);
        ++cnt;
      }
      ms.gamma_true.push_back(g0);
      ms.gamma_rb.push_back(cnt > 0 ? 100.0 * (mean_g / cnt - g0) / g0 : 0.0);
    }
    summary.methods.push_back(std::move(ms));
  }
  return summary;
}

std::string summary_to_csv(const SimSummary& summary) {
  const SimConfig& cfg = summary.config;
  std::ostringstream out;
  out << "name,link,n,c,replications,seed,method,parameter,theta0,pu_pct,"
         "rb_pct,rb_is_absolute,wald_pct,boundary_pct,r_ok,r_finite,failures\n";
  const std::string prefix = cfg.name + "," + link_name(cfg.link) + "," +
                             std::to_string(cfg.n) + "," + std::to_string(cfg.c) +
                             "," + std::to_string(cfg.replications) + "," +
                             std::to_string(cfg.seed) + ",";
  for (const MethodSummary& ms : summary.methods) {
    const std::string tail = "," + format_num(ms.boundary_pct) + "," +
                             std::to_string(ms.r_ok) + "," +
                             std::to_string(ms.r_finite) + "," +
                             std::to_string(ms.failures) + "\n";
    for (const ParamSummary& ps : ms.params) {
      out << prefix << method_name(ms.method) << "," << ps.name << ","
          << format_num(ps.theta0) << "," << format_num(ps.pu) << ","
          << format_num(ps.rb) << "," << (ps.rb_absolute ? 1 : 0) << ","
          << format_num(ps.wald) << tail;
    }
    for (size_t k = 0; k < ms.gamma_rb.size(); ++k) {
      out << prefix << method_name(ms.method) << ",gamma_beta"
          << cfg.gamma_columns[k] << "," << format_num(ms.gamma_true[k]) << ",,"
          << format_num(ms.gamma_rb[k]) << ",0," << tail;
    }
  }
  return out.str();
}

std::string summary_to_json(const SimSummary& summary) {
  const SimConfig& cfg = summary.config;
  nlohmann::json root;
  root["schema_version"] = 1;
  root["name"] = cfg.name;
  root["link"] = link_name(cfg.link);
  root["n"] = cfg.n;
  root["c"] = cfg.c;
  root["replications"] = cfg.replications;
  root["seed"] = cfg.seed;
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodSummary& ms : summary.methods) {
    nlohmann::json jm;
    jm["method"] = method_name(ms.method);
    jm["r_total"] = ms.r_total;
    jm["r_ok"] = ms.r_ok;
    jm["r_finite"] = ms.r_finite;
    jm["boundary_count"] = ms.boundary_count;
    jm["boundary_pct"] = ms.boundary_pct;
    jm["failures"] = ms.failures;
    nlohmann::json params = nlohmann::json::array();
    for (const ParamSummary& ps : ms.params) {
      params.push_back({{"parameter", ps.name},
                        {"theta0", ps.theta0},
                        {"pu_pct", ps.pu},
                        {"rb_pct", ps.rb},
                        {"rb_is_absolute", ps.rb_absolute},
                        {"wald_pct", ps.wald}});
    }
    jm["params"] = std::move(params);
    nlohmann::json gammas = nlohmann::json::array();
    for (size_t k = 0; k < ms.gamma_rb.size(); ++k) {
      gammas.push_back({{"column", cfg.gamma_columns[k]},
                        {"gamma_true", ms.gamma_true[k]},
                        {"rb_pct", ms.gamma_rb[k]}});
    }
    jm["gamma"] = std::move(gammas);
    methods.push_back(std::move(jm));
  }
  root["methods"] = std::move(methods);
  return root.dump(2) + "\n";
}

std::string summary_to_table(const SimSummary& summary) {
  const SimConfig& cfg = summary.config;
  std::ostringstream out;
  out << "study " << cfg.name << ": link=" << link_name(cfg.link)
      << " n=" << cfg.n << " c=" << cfg.c << " R=" << cfg.replications
      << " seed=" << cfg.seed << "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %-10s %10s %10s %10s\n", "method",
                "parameter", "PU%", "RB%", "WALD%");
  out << line;
  for (const MethodSummary& ms : summary.methods) {
    for (const ParamSummary& ps : ms.params) {
      std::snprintf(line, sizeof(line), "%-10s %-10s %10.2f %10.2f %10.2f\n",
                    method_name(ms.method).c_str(), ps.name.c_str(), ps.pu,
                    ps.rb, ps.wald);
      out << line;
    }
    for (size_t k = 0; k < ms.gamma_rb.size(); ++k) {
      std::snprintf(line, sizeof(line), "%-10s gamma_b%-3d %10s %10.2f %10s\n",
                    method_name(ms.method).c_str(), cfg.gamma_columns[k], "",
                    ms.gamma_rb[k], "");
      out << line;
    }
    std::snprintf(line, sizeof(line),
                  "%-10s boundary %.2f%% (%d of %d ok fits; %d finite; %d failures)\n",
                  method_name(ms.method).c_str(), ms.boundary_pct, ms.boundary_count,
                  ms.r_ok, ms.r_finite, ms.failures);
    out << line;
  }
  return out.str();
}

}  // namespace clmbr
