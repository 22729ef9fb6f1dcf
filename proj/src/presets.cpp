#include "clmbr/presets.hpp"

#include <stdexcept>

namespace clmbr {

namespace {

// Cell counts per (temperature, contact) block: ratings 1..3.
struct WineBlock {
  double temp;
  double contact;
  int count[3];
};

constexpr WineBlock kWineBlocks[4] = {
    {0.0, 0.0, {4, 14, 0}},
    {0.0, 1.0, {1, 17, 0}},
    {1.0, 0.0, {0, 16, 2}},
    {1.0, 1.0, {0, 13, 5}},
};

SimConfig table1_config(Link link, int n) {
  SimConfig cfg;
  cfg.link = link;
  cfg.c = 3;
  cfg.n = n;
  cfg.replications = 10000;
  cfg.covariates = {CovariateSpec::parse("normal(0,1)"),
                    CovariateSpec::parse("bernoulli(0.5)"),
                    CovariateSpec::parse("bernoulli(0.8)"),
                    CovariateSpec::parse("poisson(2.5)")};
  cfg.theta0.resize(6);
  switch (link) {
    case Link::logit:
      cfg.theta0 << -1.0, 2.0, 1.0, -1.0, 1.0, -1.0;
      break;
    case Link::probit:
      cfg.theta0 << -0.6, 1.2, 0.6, -0.6, 0.6, -0.6;
      break;
    case Link::cloglog:
      cfg.theta0 << -1.1, 1.0, 0.7, -0.7, 0.7, -0.7;
      break;
  }
  cfg.methods = {Method::ml, Method::mean_br, Method::median_br};
  cfg.gamma_columns = {2, 3};  // the two binary covariates
  return cfg;
}

}  // namespace

Dataset wine_dataset() {
  Eigen::MatrixXd X(72, 2);
  std::vector<int> y;
  y.reserve(72);
  int row = 0;
  for (const WineBlock& block : kWineBlocks) {
    for (int rating = 1; rating <= 3; ++rating) {
      for (int k = 0; k < block.count[rating - 1]; ++k) {
        X(row, 0) = block.temp;
        X(row, 1) = block.contact;
        y.push_back(rating);
        ++row;
      }
    }
  }
  return Dataset(std::move(X), std::move(y), 3);
}

std::vector<std::string> preset_names() {
  return {"table1-logit-n50",   "table1-logit-n100",   "table1-logit-n200",
          "table1-probit-n50",  "table1-probit-n100",  "table1-probit-n200",
          "table1-cloglog-n50", "table1-cloglog-n100", "table1-cloglog-n200",
          "table2",             "table4-wine"};
}

std::vector<SimConfig> preset_configs(const std::string& name) {
  const Link links[3] = {Link::logit, Link::probit, Link::cloglog};
  const int sizes[3] = {50, 100, 200};
  for (int li = 0; li < 3; ++li) {
    for (int si = 0; si < 3; ++si) {
      const std::string candidate = "table1-" + link_name(links[li]) + "-n" +
                                    std::to_string(sizes[si]);
      if (name == candidate) {
        SimConfig cfg = table1_config(links[li], sizes[si]);
        cfg.name = candidate;
        cfg.seed = 7101 + static_cast<std::uint64_t>(3 * li + si);
        return {cfg};
      }
    }
  }
  if (name == "table2") {
    // one study per link at n = 50; the gamma summaries carry the comparison
    std::vector<SimConfig> cfgs;
    for (int li = 0; li < 3; ++li) {
      SimConfig cfg = table1_config(links[li], 50);
      cfg.name = "table2-" + link_name(links[li]);
      cfg.seed = 7201 + static_cast<std::uint64_t>(li);
      cfgs.push_back(std::move(cfg));
    }
    return cfgs;
  }
  if (name == "table4-wine") {
    const Dataset wine = wine_dataset();
    SimConfig cfg;
    cfg.name = "table4-wine";
    cfg.link = Link::logit;
    cfg.c = 3;
    cfg.n = wine.n();
    cfg.replications = 10000;
    cfg.seed = 7401;
    cfg.fixed_design = wine.X;
    cfg.theta0.resize(4);
    cfg.theta0 << -1.0, 4.0, -2.0, -1.0;
    cfg.methods = {Method::ml, Method::mean_br, Method::median_br};
    cfg.gamma_columns = {1, 2};
    return {cfg};
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace clmbr
