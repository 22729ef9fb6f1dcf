#include "clmbr/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "clmbr/csv.hpp"
#include "clmbr/effects.hpp"
#include "clmbr/presets.hpp"

namespace clmbr {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Splits on commas that sit outside parentheses, so "normal(0,1), poisson(2)"
// yields two entries.
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty()) out.push_back(last);
  return out;
}

std::vector<std::string> param_names(int fitted_c,
                                     const std::vector<std::string>& covariates) {
  std::vector<std::string> names;
  for (int j = 1; j < fitted_c; ++j) names.push_back("alpha" + std::to_string(j));
  names.insert(names.end(), covariates.begin(), covariates.end());
  return names;
}

void emit(const std::string& payload, const std::string& path,
          std::ostream& out) {
  if (path.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ParseError("cannot write '" + path + "'");
  file << payload;
}

int exit_code_for(const FitResult& result) {
  if (result.boundary() || !result.grouping.identity()) return kExitBoundary;
  if (!result.converged) return kExitNumerical;
  return kExitOk;
}

FitResult run_fit_request(const FitRequest& request, Dataset* data_out) {
  const CsvTable table = read_csv(request.input);
  Dataset data = make_dataset(table, request.response, request.covariates);
  FitOptions options;
  options.method = request.method;
  options.link = request.link;
  options.tol = request.tol;
  options.max_iter = request.max_iter;
  FitResult result = fit(data, options);
  if (data_out != nullptr) *data_out = std::move(data);
  return result;
}

std::string fit_to_csv(const FitResult& result,
                       const std::vector<std::string>& covariates) {
  const std::vector<std::string> names = param_names(result.c, covariates);
  std::ostringstream out;
  out << "parameter,estimate,se,flag\n";
  char buf[96];
  for (size_t r = 0; r < names.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", result.theta[static_cast<int>(r)],
                  result.se[static_cast<int>(r)]);
    out << names[r] << "," << buf << "," << boundary_flag_name(result.flags[r])
        << "\n";
  }
  return out.str();
}

struct EffectInput {
  Link link = Link::logit;
  Method method = Method::ml;
  bool boundary = false;
  std::vector<std::string> names;  // slope parameter names
  std::vector<double> beta;
  std::vector<double> se;
  std::vector<std::string> flags;
  const Dataset* data = nullptr;  // present only for in-process fits
};

json effects_payload(const EffectInput& in,
                     const std::vector<std::string>& columns, double level,
                     std::ostream& err) {
  json effects = json::array();
  for (const std::string& column : columns) {
    int idx = -1;
    for (size_t k = 0; k < in.names.size(); ++k)
      if (in.names[k] == column) idx = static_cast<int>(k);
    if (idx < 0)
      throw ParseError("column '" + column + "' is not a slope parameter of the fit");
    const EffectEstimate eff =
        gamma_effect(in.link, in.beta[static_cast<size_t>(idx)],
                     in.se[static_cast<size_t>(idx)], level);
    json je;
    je["column"] = column;
    je["beta"] = in.beta[static_cast<size_t>(idx)];
    je["se_beta"] = in.se[static_cast<size_t>(idx)];
    je["gamma"] = eff.gamma;
    je["se_gamma"] = eff.se;
    je["lower"] = eff.lower;
    je["upper"] = eff.upper;
    je["approximate"] = eff.approximate;
    je["flag"] = in.flags[static_cast<size_t>(idx)];

    bool checked = false, binary = true;
    if (in.data != nullptr) {
      checked = true;
      // column order matches the slope block of the design
      for (int i = 0; i < in.data->n(); ++i) {
        const double v = in.data->X(i, idx);
        if (v != 0.0 && v != 1.0) binary = false;
      }
    }
    je["binary_checked"] = checked;
    if (checked && !binary) {
      je["warning"] = "column '" + column +
                      "' is not 0/1; gamma compares values one unit apart";
      err << "warning: " << je["warning"].get<std::string>() << "\n";
    }
    effects.push_back(std::move(je));
  }
  json root;
  root["schema_version"] = 1;
  root["link"] = link_name(in.link);
  root["method"] = method_name(in.method);
  root["level"] = level;
  root["effects"] = std::move(effects);
  return root;
}

std::string effects_to_csv(const json& root) {
  std::ostringstream out;
  out << "column,beta,se_beta,gamma,se_gamma,lower,upper,approximate,flag\n";
  char buf[256];
  for (const json& je : root.at("effects")) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%s\n",
                  je.at("column").get<std::string>().c_str(),
                  je.at("beta").get<double>(), je.at("se_beta").get<double>(),
                  je.at("gamma").get<double>(), je.at("se_gamma").get<double>(),
                  je.at("lower").get<double>(), je.at("upper").get<double>(),
                  je.at("approximate").get<bool>() ? 1 : 0,
                  je.at("flag").get<std::string>().c_str());
    out << buf;
  }
  return out.str();
}

std::string effects_to_table(const json& root) {
  std::ostringstream out;
  out << "link=" << root.at("link").get<std::string>()
      << " method=" << root.at("method").get<std::string>()
      << " level=" << root.at("level").get<double>() << "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %10s %10s %10s %10s %10s %10s %s\n",
                "column", "beta", "se_beta", "gamma", "se_gamma", "lower",
                "upper", "flag");
  out << buf;
  for (const json& je : root.at("effects")) {
    std::snprintf(buf, sizeof(buf),
                  "%-12s %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f %s%s\n",
                  je.at("column").get<std::string>().c_str(),
                  je.at("beta").get<double>(), je.at("se_beta").get<double>(),
                  je.at("gamma").get<double>(), je.at("se_gamma").get<double>(),
                  je.at("lower").get<double>(), je.at("upper").get<double>(),
                  je.at("flag").get<std::string>().c_str(),
                  je.at("approximate").get<bool>() ? " (approx.)" : "");
    out << buf;
  }
  return out.str();
}

int input_error(std::ostream& err, const std::string& what) {
  err << "error: " << what << "\n";
  return kExitInput;
}

}  // namespace

std::string fit_to_json(const FitResult& result,
                        const std::vector<std::string>& covariates) {
  const std::vector<std::string> names = param_names(result.c, covariates);
  json root;
  root["schema_version"] = 1;
  root["link"] = link_name(result.link);
  root["method"] = method_name(result.method);
  root["converged"] = result.converged;
  root["iterations"] = result.iterations;
  root["boundary"] = result.boundary() || !result.grouping.identity();
  root["c_fitted"] = result.c;
  root["grouping"] = {{"original_c", result.grouping.original_c},
                      {"fitted_c", result.grouping.fitted_c},
                      {"map", result.grouping.map}};
  json params = json::array();
  for (size_t r = 0; r < names.size(); ++r) {
    params.push_back({{"name", names[r]},
                      {"estimate", result.theta[static_cast<int>(r)]},
                      {"se", result.se[static_cast<int>(r)]},
                      {"flag", boundary_flag_name(result.flags[r])}});
  }
  root["parameters"] = std::move(params);
  json vcov = json::array();
  for (int r = 0; r < result.vcov.rows(); ++r) {
    json row = json::array();
    for (int s = 0; s < result.vcov.cols(); ++s) row.push_back(result.vcov(r, s));
    vcov.push_back(std::move(row));
  }
  root["vcov"] = std::move(vcov);
  root["trace"] = result.trace;
  return root.dump(2) + "\n";
}

std::string fit_to_table(const FitResult& result,
                         const std::vector<std::string>& covariates) {
  const std::vector<std::string> names = param_names(result.c, covariates);
  std::ostringstream out;
  out << "link=" << link_name(result.link) << " method=" << method_name(result.method)
      << " converged=" << (result.converged ? "yes" : "no")
      << " iterations=" << result.iterations << "\n";
  if (!result.grouping.identity()) {
    out << "note: " << result.grouping.original_c - result.grouping.fitted_c
        << " empty middle categories merged into their right neighbours\n";
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12s %12s %12s %s\n", "parameter",
                "estimate", "se", "flag");
  out << buf;
  for (size_t r = 0; r < names.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%-12s %12.4f %12.4f %s\n", names[r].c_str(),
                  result.theta[static_cast<int>(r)], result.se[static_cast<int>(r)],
                  boundary_flag_name(result.flags[r]).c_str());
    out << buf;
  }
  return out.str();
}

int cmd_fit(const FitRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const FitResult result = run_fit_request(request, nullptr);
    std::string payload;
    if (request.format == "json")
      payload = fit_to_json(result, request.covariates);
    else if (request.format == "csv")
      payload = fit_to_csv(result, request.covariates);
    else if (request.format == "table")
      payload = fit_to_table(result, request.covariates);
    else
      return input_error(err, "unknown format '" + request.format +
                                  "' (expected json, csv, or table)");
    emit(payload, request.out, out);
    const int code = exit_code_for(result);
    if (code == kExitBoundary)
      err << "note: boundary estimate detected; flagged components diverge\n";
    if (code == kExitNumerical)
      err << "error: iteration did not converge within " +
                 std::to_string(request.max_iter) + " iterations\n";
    return code;
  } catch (const NumericalFailureError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const SingularInformationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    return input_error(err, e.what());
  }
}

int cmd_effects(const EffectsRequest& request, std::ostream& out,
                std::ostream& err) {
  try {
    if (!(request.level > 0.0 && request.level < 1.0))
      return input_error(err, "level must lie strictly in (0,1)");
    EffectInput in;
    Dataset data;
    FitResult result;
    bool have_fit = false;
    if (!request.fit_json.empty()) {
      std::ifstream file(request.fit_json, std::ios::binary);
      if (!file) return input_error(err, "cannot open '" + request.fit_json + "'");
      json root = json::parse(file, nullptr, true, true);
      in.link = link_from_name(root.at("link").get<std::string>());
      in.method = method_from_name(root.at("method").get<std::string>());
      in.boundary = root.at("boundary").get<bool>();
      for (const json& jp : root.at("parameters")) {
        const std::string name = jp.at("name").get<std::string>();
        if (name.rfind("alpha", 0) == 0) continue;
        in.names.push_back(name);
        in.beta.push_back(jp.at("estimate").get<double>());
        in.se.push_back(jp.at("se").get<double>());
        in.flags.push_back(jp.at("flag").get<std::string>());
      }
    } else {
      result = run_fit_request(request.fit, &data);
      have_fit = true;
      in.link = result.link;
      in.method = result.method;
      in.boundary = result.boundary() || !result.grouping.identity();
      in.data = &data;
      const int c = result.c;
      for (size_t k = 0; k < request.fit.covariates.size(); ++k) {
        in.names.push_back(request.fit.covariates[k]);
        in.beta.push_back(result.theta[c - 1 + static_cast<int>(k)]);
        in.se.push_back(result.se[c - 1 + static_cast<int>(k)]);
        in.flags.push_back(
            boundary_flag_name(result.flags[static_cast<size_t>(c - 1) + k]));
      }
    }
    const json root = effects_payload(in, request.columns, request.level, err);
    std::string payload;
    if (request.format == "json")
      payload = root.dump(2) + "\n";
    else if (request.format == "csv")
      payload = effects_to_csv(root);
    else if (request.format == "table")
      payload = effects_to_table(root);
    else
      return input_error(err, "unknown format '" + request.format +
                                  "' (expected json, csv, or table)");
    emit(payload, request.out, out);
    if (have_fit && !result.converged && !in.boundary) return kExitNumerical;
    return in.boundary ? kExitBoundary : kExitOk;
  } catch (const NumericalFailureError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const SingularInformationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    return input_error(err, std::string("fit JSON: ") + e.what());
  } catch (const std::exception& e) {
    return input_error(err, e.what());
  }
}

SimConfig parse_sim_config(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  long lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ": line " + std::to_string(lineno) +
                           ": expected key = value",
                       lineno);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError(origin + ": line " + std::to_string(lineno) +
                           ": empty key or value",
                       lineno);
    if (!kv.emplace(key, value).second)
      throw ParseError(origin + ": duplicate key '" + key + "'");
  }

  const std::set<std::string> known = {
      "name", "link",   "c",          "n",       "replications", "seed",
      "threads", "theta0", "covariates", "design-csv", "methods",
      "gamma-columns", "tol", "max-iter"};
  for (const auto& [key, value] : kv) {
    (void)value;
    if (known.count(key) == 0)
      throw ParseError(origin + ": unknown key '" + key + "'");
  }

  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    const std::string* v = get(key);
    if (v == nullptr) throw ParseError(origin + ": missing required key '" + key + "'");
    return *v;
  };
  auto to_long = [&](const std::string& key, const std::string& value) {
    try {
      size_t used = 0;
      const long v = std::stol(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ParseError(origin + ": key '" + key + "': cannot parse integer '" +
                       value + "'");
    }
  };
  auto to_double = [&](const std::string& key, const std::string& value) {
    try {
      size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ParseError(origin + ": key '" + key + "': cannot parse number '" +
                       value + "'");
    }
  };

  SimConfig cfg;
  if (const std::string* v = get("name")) cfg.name = *v;
  try {
    cfg.link = link_from_name(require("link"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(origin + ": key 'link': " + e.what());
  }
  cfg.c = static_cast<int>(to_long("c", require("c")));
  if (const std::string* v = get("replications"))
    cfg.replications = static_cast<int>(to_long("replications", *v));
  if (const std::string* v = get("seed"))
    cfg.seed = static_cast<std::uint64_t>(to_long("seed", *v));
  if (const std::string* v = get("threads"))
    cfg.threads = static_cast<int>(to_long("threads", *v));
  if (const std::string* v = get("tol")) cfg.base_options.tol = to_double("tol", *v);
  if (const std::string* v = get("max-iter"))
    cfg.base_options.max_iter = static_cast<int>(to_long("max-iter", *v));

  const bool has_cov = get("covariates") != nullptr;
  const bool has_design = get("design-csv") != nullptr;
  if (has_cov == has_design)
    throw ParseError(origin + ": exactly one of 'covariates' or 'design-csv' required");
  if (has_cov) {
    cfg.n = static_cast<int>(to_long("n", require("n")));
    for (const std::string& spec : split_top_level(*get("covariates"))) {
      try {
        cfg.covariates.push_back(CovariateSpec::parse(spec));
      } catch (const std::invalid_argument& e) {
        throw ParseError(origin + ": key 'covariates': " + e.what());
      }
    }
    if (cfg.covariates.empty())
      throw ParseError(origin + ": key 'covariates': no entries");
  } else {
    const CsvTable table = read_csv(*get("design-csv"));
    Eigen::MatrixXd X(static_cast<int>(table.rows.size()),
                      static_cast<int>(table.columns.size()));
    for (size_t i = 0; i < table.rows.size(); ++i)
      for (size_t k = 0; k < table.columns.size(); ++k)
        X(static_cast<int>(i), static_cast<int>(k)) = table.rows[i][k];
    cfg.fixed_design = std::move(X);
    cfg.n = static_cast<int>(table.rows.size());
    if (const std::string* v = get("n")) {
      if (static_cast<int>(to_long("n", *v)) != cfg.n)
        throw ParseError(origin + ": key 'n': does not match design-csv rows");
    }
  }

  const std::vector<std::string> theta_items = split_top_level(require("theta0"));
  cfg.theta0.resize(static_cast<int>(theta_items.size()));
  for (size_t k = 0; k < theta_items.size(); ++k)
    cfg.theta0[static_cast<int>(k)] = to_double("theta0", theta_items[k]);

  if (const std::string* v = get("methods")) {
    for (const std::string& m : split_top_level(*v)) {
      try {
        cfg.methods.push_back(method_from_name(m));
      } catch (const std::invalid_argument& e) {
        throw ParseError(origin + ": key 'methods': " + e.what());
      }
    }
  } else {
    cfg.methods = {Method::ml, Method::mean_br, Method::median_br};
  }
  if (const std::string* v = get("gamma-columns")) {
    for (const std::string& col : split_top_level(*v))
      cfg.gamma_columns.push_back(static_cast<int>(to_long("gamma-columns", col)));
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return cfg;
}

SimConfig read_sim_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sim_config(buf.str(), path);
}

int cmd_simulate(const SimulateRequest& request, std::ostream& out,
                 std::ostream& err) {
  try {
    std::vector<SimConfig> configs;
    if (!request.preset.empty() && !request.config_path.empty())
      return input_error(err, "--preset and --config are mutually exclusive");
    if (!request.preset.empty())
      configs = preset_configs(request.preset);
    else if (!request.config_path.empty())
      configs = {read_sim_config(request.config_path)};
    else
      return input_error(err, "one of --preset or --config is required");

    for (SimConfig& cfg : configs) {
      if (request.replications.has_value())
        cfg.replications = static_cast<int>(*request.replications);
      if (request.seed.has_value()) cfg.seed = *request.seed;
      if (request.threads.has_value()) cfg.threads = *request.threads;
      cfg.validate();
    }
    for (const SimConfig& cfg : configs) {
      const SimSummary summary = run_study(cfg);
      out << summary_to_table(summary);
      if (!request.out_prefix.empty()) {
        const std::string base = request.out_prefix + "-" + cfg.name;
        emit(summary_to_csv(summary), base + ".csv", out);
        emit(summary_to_json(summary), base + ".json", out);
        err << "wrote " << base << ".csv and " << base << ".json\n";
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return input_error(err, e.what());
  }
}

}  // namespace clmbr
