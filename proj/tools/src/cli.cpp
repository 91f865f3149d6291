#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "smoothqr/smoothqr.hpp"

namespace smoothqr::cli {

namespace {

using nlohmann::json;

// Shared by every subcommand.
struct CommonOptions {
  double tau = 0.5;
  std::string kernel = "gaussian";
  std::optional<double> bandwidth;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output;
  std::string format = "json";
};

struct PenaltyOptions {
  std::string penalty;  // empty: lasso, or group-lasso for grouped designs
  double alpha = 1.0;
  std::string groups;
  std::string sparse_group_prox = "exact";
};

struct PathOptions {
  int nlambda = 50;
  double lambda_min_ratio = 0.01;
  int folds = 10;
};

struct DataOptions {
  std::string input;
  std::string response = "y";
};

struct SimOptions {
  std::string design = "sparse";
  std::string noise = "normal";
  Eigen::Index n = 500;
  Eigen::Index p = 250;
  int reps = 20;
  std::string emit_data;
  std::string p_list = "50,100,200";
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<Eigen::Index> parse_sizes(const std::string& text) {
  std::vector<Eigen::Index> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      sizes.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("expected a comma-separated list of positive integers, got '" + text +
                        "'");
    }
  }
  if (sizes.empty()) throw ConfigError("empty size list");
  return sizes;
}

SparseGroupProx parse_prox(const std::string& name) {
  if (name == "exact") return SparseGroupProx::exact;
  if (name == "printed") return SparseGroupProx::printed;
  throw ConfigError("unknown sparse-group prox '" + name + "' (expected exact or printed)");
}

PenaltySpec unit_from_options(const PenaltyOptions& o, Eigen::Index dim) {
  const PenaltyKind kind = parse_penalty_kind(o.penalty.empty() ? "lasso" : o.penalty);
  std::optional<GroupStructure> groups;
  if (!o.groups.empty()) groups = GroupStructure::from_sizes(parse_sizes(o.groups));
  const bool grouped = kind == PenaltyKind::group_lasso || kind == PenaltyKind::sparse_group_lasso;
  if (grouped && !groups) {
    throw ConfigError("penalty '" + std::string(to_string(kind)) + "' needs --groups");
  }
  if (!grouped && groups) throw ConfigError("--groups only applies to group penalties");
  if (groups && groups->dim() != dim) {
    throw ConfigError("--groups covers " + std::to_string(groups->dim() - 1) +
                      " coefficients, data has " + std::to_string(dim - 1) + " covariates");
  }
  return unit_penalty(kind, dim, o.alpha, groups, parse_prox(o.sparse_group_prox));
}

SmoothingSpec smoothing(const CommonOptions& c, Eigen::Index n, Eigen::Index p) {
  const double h = c.bandwidth ? *c.bandwidth
                               : default_bandwidth(static_cast<long>(n), std::max<long>(p, 1), c.tau);
  return SmoothingSpec(c.tau, h, parse_kernel(c.kernel));
}

json smoothing_json(const SmoothingSpec& spec) {
  return {{"tau", spec.tau()}, {"h", spec.bandwidth()}, {"kernel", to_string(spec.kernel())}};
}

std::vector<std::string> coefficient_names(const IngestedData& ing) {
  std::vector<std::string> names{"(intercept)"};
  names.insert(names.end(), ing.covariates.begin(), ing.covariates.end());
  return names;
}

json coefficients_json(const Vector& beta) {
  json arr = json::array();
  for (double b : beta) arr.push_back(number(b));
  return arr;
}

void write_coefficients_csv(std::ostream& out, const std::vector<std::string>& names,
                            const Vector& beta) {
  out << "name,value\n";
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    out << names[static_cast<std::size_t>(j)] << ',' << format_double(beta(j)) << '\n';
  }
}

json metrics_json(const Metrics& m) {
  json j{{"l2_error", m.l2_error}};
  if (m.tpr) j["tpr"] = *m.tpr;
  if (m.fpr) j["fpr"] = *m.fpr;
  if (m.group_tpr) j["group_tpr"] = *m.group_tpr;
  if (m.group_fpr) j["group_fpr"] = *m.group_fpr;
  return j;
}

json summary_json(const Summary& s) {
  json j{{"mean", s.mean}, {"count", s.count}};
  j["standard_error"] = s.standard_error ? json(*s.standard_error) : json(nullptr);
  return j;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw Error("cannot write '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

void require_format(const CommonOptions& c) {
  if (c.format != "json" && c.format != "csv") {
    throw ConfigError("--format must be json or csv, got '" + c.format + "'");
  }
}

void run_fit(const CommonOptions& c, const DataOptions& d, const PenaltyOptions& po,
             double lambda, std::ostream& out) {
  const IngestedData ing = ingest_csv_file(d.input, d.response);
  const Dataset& data = ing.data;
  const SmoothingSpec spec = smoothing(c, data.n(), data.dim() - 1);
  const PenaltySpec unit = unit_from_options(po, data.dim());
  const FitResult fit = lamm_fit(data, spec, unit.scaled(lambda), {}, intercept_only_fit(data, spec));
  Sink sink(c.output, out);
  if (c.format == "csv") {
    write_coefficients_csv(sink.stream(), coefficient_names(ing), fit.beta);
    return;
  }
  json j = smoothing_json(spec);
  j["coefficients"] = coefficients_json(fit.beta);
  j["names"] = coefficient_names(ing);
  j["lambda"] = lambda;
  j["lambda_max"] = lambda_max(data, spec, unit);
  j["penalty"] = po.penalty.empty() ? "lasso" : po.penalty;
  j["iterations"] = fit.iterations;
  j["objective"] = number(fit.objective_trace.back());
  j["converged"] = fit.converged;
  j["kkt_residual"] = kkt_residual(data, fit.beta, spec, unit.scaled(lambda));
  sink.stream() << j.dump(2) << '\n';
}

void run_cv(const CommonOptions& c, const DataOptions& d, const PenaltyOptions& po,
            const PathOptions& path_opts, std::ostream& out) {
  const IngestedData ing = ingest_csv_file(d.input, d.response);
  const Dataset& data = ing.data;
  const SmoothingSpec spec = smoothing(c, data.n(), data.dim() - 1);
  const PenaltySpec unit = unit_from_options(po, data.dim());
  const double lmax = lambda_max(data, spec, unit);
  const auto path = LambdaPath::geometric(lmax, path_opts.lambda_min_ratio, path_opts.nlambda);
  const CvResult cv = cross_validate(data, spec, unit, path, path_opts.folds, c.seed, {}, c.threads);
  Sink sink(c.output, out);
  if (c.format == "csv") {
    std::vector<PlotRow> rows;
    for (std::size_t l = 0; l < cv.lambdas.size(); ++l) {
      rows.push_back({cv.lambdas[l], "cv", "mean_loss", cv.mean_loss[l]});
      rows.push_back({cv.lambdas[l], "cv", "standard_error", cv.standard_error[l]});
    }
    emit_plot_data(sink.stream(), rows);
    return;
  }
  json j = smoothing_json(spec);
  j["coefficients"] = coefficients_json(cv.refit.beta);
  j["names"] = coefficient_names(ing);
  j["lambda"] = cv.selected_lambda;
  j["lambda_max"] = lmax;
  j["penalty"] = po.penalty.empty() ? "lasso" : po.penalty;
  j["iterations"] = cv.refit.iterations;
  j["objective"] = number(cv.refit.objective_trace.back());
  j["converged"] = cv.refit.converged;
  j["cv"] = {{"folds", cv.folds},
             {"seed", cv.seed},
             {"selected_index", cv.selected_index},
             {"lambdas", cv.lambdas},
             {"mean_loss", cv.mean_loss},
             {"standard_error", cv.standard_error}};
  sink.stream() << j.dump(2) << '\n';
}

void run_flam(const CommonOptions& c, const DataOptions& d, double lambda, const FlamConfig& cfg,
              std::ostream& out) {
  const IngestedData ing = ingest_csv_file(d.input, d.response);
  const auto& dense = dynamic_cast<const DenseDesign&>(ing.data.design()).matrix();
  const RowMajorMatrix x = dense.rightCols(dense.cols() - 1);
  if (x.cols() == 0) throw ConfigError("flam needs at least one covariate");
  const SmoothingSpec spec = smoothing(c, ing.data.n(), x.cols());
  const FlamFit fit = fit_flam(ing.data.y(), x, lambda, spec, cfg);
  Sink sink(c.output, out);
  if (c.format == "csv") {
    std::vector<PlotRow> rows;
    for (std::size_t j = 0; j < fit.sorted_x.size(); ++j) {
      for (Eigen::Index i = 0; i < fit.sorted_x[j].size(); ++i) {
        rows.push_back({fit.sorted_x[j](i), ing.covariates[j], "theta", fit.sorted_theta[j](i)});
      }
    }
    emit_plot_data(sink.stream(), rows);
    return;
  }
  json j = smoothing_json(spec);
  j["lambda"] = lambda;
  j["theta0"] = fit.theta0;
  j["cycles"] = fit.cycles;
  j["iterations"] = fit.cycles;
  j["objective"] = number(flam_objective(ing.data.y(), fit));
  j["converged"] = fit.converged;
  json comps = json::array();
  for (std::size_t k = 0; k < fit.sorted_x.size(); ++k) {
    comps.push_back({{"name", ing.covariates[k]},
                     {"x", std::vector<double>(fit.sorted_x[k].begin(), fit.sorted_x[k].end())},
                     {"theta", std::vector<double>(fit.sorted_theta[k].begin(),
                                                   fit.sorted_theta[k].end())}});
  }
  j["components"] = comps;
  sink.stream() << j.dump(2) << '\n';
}

MethodSpec method_from_options(const CommonOptions& c, const PenaltyOptions& po,
                               const PathOptions& path_opts, CoefficientPattern pattern) {
  MethodSpec m;
  std::string name = po.penalty;
  if (name.empty()) name = pattern == CoefficientPattern::grouped ? "group-lasso" : "lasso";
  m.penalty = parse_penalty_kind(name);
  m.alpha = po.alpha;
  m.kernel = parse_kernel(c.kernel);
  m.bandwidth = c.bandwidth;
  m.folds = path_opts.folds;
  m.nlambda = path_opts.nlambda;
  m.lambda_min_ratio = path_opts.lambda_min_ratio;
  m.sparse_group_prox = parse_prox(po.sparse_group_prox);
  if (!po.groups.empty()) throw ConfigError("simulated designs carry their own groups");
  const bool grouped = m.penalty == PenaltyKind::group_lasso ||
                       m.penalty == PenaltyKind::sparse_group_lasso;
  if (grouped && pattern != CoefficientPattern::grouped) {
    throw ConfigError("group penalties need --design grouped");
  }
  return m;
}

// Wall time is left out unless asked for, so simulate output is reproducible.
json report_json(const ReplicationReport& rep, bool with_seconds) {
  json metrics{{"l2_error", summary_json(rep.l2_error)}};
  if (rep.tpr) metrics["tpr"] = summary_json(*rep.tpr);
  if (rep.fpr) metrics["fpr"] = summary_json(*rep.fpr);
  if (rep.group_tpr) metrics["group_tpr"] = summary_json(*rep.group_tpr);
  if (rep.group_fpr) metrics["group_fpr"] = summary_json(*rep.group_fpr);
  if (with_seconds) metrics["seconds"] = summary_json(rep.seconds);
  return metrics;
}

void run_simulate(const CommonOptions& c, const PenaltyOptions& po, const PathOptions& path_opts,
                  const SimOptions& so, std::ostream& out) {
  const CoefficientPattern pattern = parse_pattern(so.design);
  const SimDesign design =
      SimDesign::standard(pattern, parse_noise(so.noise), so.n, so.p, c.tau, c.seed);
  const MethodSpec method = method_from_options(c, po, path_opts, pattern);
  if (so.reps < 1) throw ConfigError("--reps must be at least 1");

  if (!so.emit_data.empty()) {
    // Replication 0 draws from substream 0 of the master seed.
    SimDesign first = design;
    first.seed = CounterRng(c.seed).substream(0).key();
    const SimulatedData sim = generate(first);
    const auto& x = dynamic_cast<const DenseDesign&>(sim.data.design()).matrix();
    std::vector<std::string> names;
    for (Eigen::Index j = 1; j <= so.p; ++j) names.push_back("x" + std::to_string(j));
    std::ofstream f(so.emit_data);
    if (!f) throw Error("cannot write '" + so.emit_data + "'");
    write_dataset_csv(f, sim.data.y(), x.rightCols(so.p), "y", names);
  }

  const ReplicationReport rep = run_replications(design, method, so.reps, c.seed, c.threads);
  Sink sink(c.output, out);
  if (c.format == "csv") {
    std::vector<PlotRow> rows;
    const std::string series(to_string(method.penalty));
    for (std::size_t r = 0; r < rep.outcomes.size(); ++r) {
      const auto& m = rep.outcomes[r].metrics;
      const double x = static_cast<double>(r);
      rows.push_back({x, series, "l2_error", m.l2_error});
      if (m.tpr) rows.push_back({x, series, "tpr", *m.tpr});
      if (m.fpr) rows.push_back({x, series, "fpr", *m.fpr});
      if (m.group_tpr) rows.push_back({x, series, "group_tpr", *m.group_tpr});
      if (m.group_fpr) rows.push_back({x, series, "group_fpr", *m.group_fpr});
      rows.push_back({x, series, "lambda", rep.outcomes[r].selected_lambda});
    }
    emit_plot_data(sink.stream(), rows);
    return;
  }
  json j{{"design", so.design},  {"noise", so.noise},       {"n", so.n},
         {"p", so.p},            {"tau", c.tau},            {"reps", so.reps},
         {"seed", c.seed},       {"penalty", to_string(method.penalty)},
         {"kernel", c.kernel},   {"folds", method.folds},   {"nlambda", method.nlambda}};
  j["metrics"] = report_json(rep, false);
  json reps = json::array();
  for (const auto& o : rep.outcomes) {
    reps.push_back({{"metrics", metrics_json(o.metrics)},
                    {"lambda", o.selected_lambda},
                    {"h", o.bandwidth}});
  }
  j["replications"] = reps;
  sink.stream() << j.dump(2) << '\n';
}

void run_bench(const CommonOptions& c, const PenaltyOptions& po, const PathOptions& path_opts,
               const SimOptions& so, std::ostream& out) {
  const CoefficientPattern pattern = parse_pattern(so.design);
  const MethodSpec method = method_from_options(c, po, path_opts, pattern);
  const std::string series(to_string(method.penalty));
  std::vector<PlotRow> rows;
  json points = json::array();
  for (Eigen::Index p : parse_sizes(so.p_list)) {
    const SimDesign design =
        SimDesign::standard(pattern, parse_noise(so.noise), 2 * p, p, c.tau, c.seed);
    const ReplicationReport rep = run_replications(design, method, so.reps, c.seed, c.threads);
    const double x = static_cast<double>(p);
    rows.push_back({x, series, "l2_error", rep.l2_error.mean});
    rows.push_back({x, series, "seconds", rep.seconds.mean});
    points.push_back({{"p", p}, {"n", 2 * p}, {"metrics", report_json(rep, true)}});
  }
  Sink sink(c.output, out);
  if (c.format == "csv") {
    emit_plot_data(sink.stream(), rows);
    return;
  }
  json j{{"design", so.design}, {"noise", so.noise}, {"tau", c.tau},        {"reps", so.reps},
         {"seed", c.seed},      {"penalty", series}, {"kernel", c.kernel}, {"points", points}};
  sink.stream() << j.dump(2) << '\n';
}

void add_common(CLI::App* app, CommonOptions& c) {
  app->add_option("--tau", c.tau, "Quantile level in (0, 1)")->capture_default_str();
  app->add_option("--kernel", c.kernel,
                  "uniform, gaussian, logistic, epanechnikov or triangular")
      ->capture_default_str();
  app->add_option("--bandwidth", c.bandwidth, "Smoothing bandwidth (default: rate rule)");
  app->add_option("--seed", c.seed, "Master seed for folds and simulations")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker cap for folds and replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--output", c.output, "Output file (default: stdout)");
  app->add_option("--format", c.format, "json or csv")->capture_default_str();
}

void add_penalty(CLI::App* app, PenaltyOptions& p) {
  app->add_option("--penalty", p.penalty,
                  "lasso, elastic-net, group-lasso or sparse-group-lasso");
  app->add_option("--alpha", p.alpha, "Elastic-net mixing weight in [0, 1]")->capture_default_str();
  app->add_option("--groups", p.groups, "Comma-separated group sizes, in covariate order");
  app->add_option("--sgl-prox", p.sparse_group_prox, "Sparse-group update: exact or printed")
      ->capture_default_str();
}

void add_path(CLI::App* app, PathOptions& p) {
  app->add_option("--nlambda", p.nlambda, "Path length")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--lambda-min-ratio", p.lambda_min_ratio, "Smallest level over the largest")
      ->capture_default_str();
  app->add_option("--folds", p.folds, "Cross-validation folds")->capture_default_str();
}

void add_data(CLI::App* app, DataOptions& d) {
  app->add_option("--input", d.input, "CSV file with a header row")->required();
  app->add_option("--response", d.response, "Response column")->capture_default_str();
}

void add_sim(CLI::App* app, SimOptions& s) {
  app->add_option("--design", s.design, "sparse, dense or grouped")->capture_default_str();
  app->add_option("--noise", s.noise, "normal or t")->capture_default_str();
  app->add_option("--reps", s.reps, "Replications")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized smoothed quantile regression"};
  app.require_subcommand(1);

  CommonOptions common;
  DataOptions data;
  PenaltyOptions pen;
  PathOptions path;
  SimOptions sim;
  double lambda = 0.0;

  auto* fit = app.add_subcommand("fit", "Fit at one regularization level");
  add_common(fit, common);
  add_data(fit, data);
  add_penalty(fit, pen);
  fit->add_option("--lambda", lambda, "Regularization level")->required();

  auto* cv = app.add_subcommand("cv", "Cross-validate a regularization path and refit");
  add_common(cv, common);
  add_data(cv, data);
  add_penalty(cv, pen);
  add_path(cv, path);

  auto* flam = app.add_subcommand("flam", "Fused-lasso additive quantile model");
  add_common(flam, common);
  add_data(flam, data);
  flam->add_option("--lambda", lambda, "Fusion level")->required();
  FlamConfig flam_cfg;
  flam->add_option("--epsilon", flam_cfg.epsilon, "Stop when a cycle moves the fit less than this")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  flam->add_option("--max-cycles", flam_cfg.max_cycles, "Cycle cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Simulation study replications");
  add_common(simulate, common);
  add_penalty(simulate, pen);
  add_path(simulate, path);
  add_sim(simulate, sim);
  simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
  simulate->add_option("--p", sim.p, "Covariates")->capture_default_str();
  simulate->add_option("--emit-data", sim.emit_data, "Also write replication 0's data as CSV");

  auto* bench = app.add_subcommand("bench", "Error and time against p, with n = 2p");
  add_common(bench, common);
  add_penalty(bench, pen);
  add_path(bench, path);
  add_sim(bench, sim);
  bench->add_option("--p-list", sim.p_list, "Comma-separated p values")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    require_format(common);
    if (fit->parsed()) run_fit(common, data, pen, lambda, out);
    else if (cv->parsed()) run_cv(common, data, pen, path, out);
    else if (flam->parsed()) run_flam(common, data, lambda, flam_cfg, out);
    else if (simulate->parsed()) run_simulate(common, pen, path, sim, out);
    else if (bench->parsed()) run_bench(common, pen, path, sim, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"smoothqr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace smoothqr::cli
