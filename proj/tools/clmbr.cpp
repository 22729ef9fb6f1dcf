#include <CLI11.hpp>
#include <iostream>

#include "clmbr/cli.hpp"
#include "clmbr/presets.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cumulative link models for ordinal responses with maximum "
               "likelihood, mean bias reduction, and median bias reduction"};
  app.require_subcommand(1);

  const std::vector<std::string> link_names = {"logit", "probit", "cloglog"};
  const std::vector<std::string> method_names = {"ml", "mean-br", "median-br"};
  const std::vector<std::string> format_names = {"json", "csv", "table"};

  clmbr::FitRequest fit_request;
  std::string fit_link = "logit", fit_method = "ml";
  CLI::App* fit = app.add_subcommand("fit", "fit a cumulative link model to CSV data");
  fit->add_option("--input", fit_request.input, "CSV file with header row")->required();
  fit->add_option("--response", fit_request.response,
                  "response column (integer categories 1..c)")->required();
  fit->add_option("--covariates", fit_request.covariates,
                  "comma-separated covariate columns")
      ->required()->delimiter(',');
  fit->add_option("--link", fit_link, "link function")
      ->check(CLI::IsMember(link_names))->capture_default_str();
  fit->add_option("--method", fit_method, "estimation method")
      ->check(CLI::IsMember(method_names))->capture_default_str();
  fit->add_option("--tol", fit_request.tol,
                  "sup-norm tolerance on the adjusted score")->capture_default_str();
  fit->add_option("--max-iter", fit_request.max_iter, "iteration cap")
      ->capture_default_str();
  fit->add_option("--out", fit_request.out, "write the report here instead of stdout");
  fit->add_option("--format", fit_request.format, "output format")
      ->check(CLI::IsMember(format_names))->capture_default_str();

  clmbr::EffectsRequest effects_request;
  std::string eff_link = "logit", eff_method = "ml";
  CLI::App* effects = app.add_subcommand(
      "effects", "ordinal superiority (gamma) for binary covariates");
  effects->add_option("--fit", effects_request.fit_json,
                      "fit JSON produced by the fit subcommand");
  effects->add_option("--input", effects_request.fit.input,
                      "CSV file (fits in process when --fit is absent)");
  effects->add_option("--response", effects_request.fit.response, "response column");
  effects->add_option("--covariates", effects_request.fit.covariates,
                      "comma-separated covariate columns")->delimiter(',');
  effects->add_option("--link", eff_link, "link function")
      ->check(CLI::IsMember(link_names))->capture_default_str();
  effects->add_option("--method", eff_method, "estimation method")
      ->check(CLI::IsMember(method_names))->capture_default_str();
  effects->add_option("--columns", effects_request.columns,
                      "covariates to report gamma for")->required()->delimiter(',');
  effects->add_option("--level", effects_request.level, "Wald interval level")
      ->capture_default_str();
  effects->add_option("--out", effects_request.out,
                      "write the report here instead of stdout");
  effects->add_option("--format", effects_request.format, "output format")
      ->check(CLI::IsMember(format_names))->capture_default_str();

  clmbr::SimulateRequest sim_request;
  long sim_reps = -1;
  long long sim_seed = -1;
  int sim_threads = -1;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "replicate studies of the three estimation methods");
  simulate->add_option("--preset", sim_request.preset,
                       "built-in study name")
      ->check(CLI::IsMember(clmbr::preset_names()));
  simulate->add_option("--config", sim_request.config_path,
                       "study description file (key = value lines)");
  simulate->add_option("--replications", sim_reps, "override replication count");
  simulate->add_option("--seed", sim_seed, "override master seed");
  simulate->add_option("--threads", sim_threads, "worker thread cap (0 = all cores)");
  simulate->add_option("--out", sim_request.out_prefix,
                       "prefix for per-study CSV/JSON summaries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return clmbr::kExitInput;
  }

  if (fit->parsed()) {
    fit_request.link = clmbr::link_from_name(fit_link);
    fit_request.method = clmbr::method_from_name(fit_method);
    return clmbr::cmd_fit(fit_request, std::cout, std::cerr);
  }
  if (effects->parsed()) {
    effects_request.fit.link = clmbr::link_from_name(eff_link);
    effects_request.fit.method = clmbr::method_from_name(eff_method);
    if (effects_request.fit_json.empty() && effects_request.fit.input.empty()) {
      std::cerr << "error: provide --fit or --input/--response/--covariates\n";
      return clmbr::kExitInput;
    }
    return clmbr::cmd_effects(effects_request, std::cout, std::cerr);
  }
  if (sim_reps >= 0) sim_request.replications = sim_reps;
  if (sim_seed >= 0) sim_request.seed = static_cast<std::uint64_t>(sim_seed);
  if (sim_threads >= 0) sim_request.threads = sim_threads;
  return clmbr::cmd_simulate(sim_request, std::cout, std::cerr);
}
