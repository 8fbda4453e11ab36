// eccx: batch front end for the elastic co-clustering library.
//
// Subcommands: simulate, fit-aux, transfer, tune, evaluate, pipeline.
// Every run writes its artifacts plus a run manifest (parameters, seeds,
// file digests, tool version) into --out-dir. Exit codes: 0 success,
// 1 usage error, 2 data/model error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecc/io.hpp"
#include "ecc/simgen.hpp"
#include "ecc/transfer.hpp"
#include "ecc/tuning.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Ordered key=value store so reruns produce byte-identical manifests.
class Manifest {
 public:
  void add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
  }
  // Inputs keep the path as given; outputs record only the file name so a
  // rerun into a different --out-dir still yields an identical manifest.
  void add_file(const std::string& role, const std::string& path,
                bool output = false) {
    add("file." + role + ".path",
        output ? std::filesystem::path(path).filename().string() : path);
    add("file." + role + ".digest", ecc::file_digest(path));
  }
  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ecc::ParseError(path + ": cannot open file for writing");
    for (const auto& [k, v] : entries_) out << k << "=" << v << "\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string out_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_trace(const std::string& path, const std::vector<double>& trace) {
  std::ofstream out(path);
  if (!out) throw ecc::ParseError(path + ": cannot open file for writing");
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << i << "\t" << fmt(trace[i]) << "\n";
}

void write_metrics(const std::string& path, const ecc::MetricsReport& m) {
  std::ofstream out(path);
  if (!out) throw ecc::ParseError(path + ": cannot open file for writing");
  out << "ari=" << fmt(m.ari) << "\n"
      << "nmi_sqrt=" << fmt(m.nmi) << "\n"
      << "purity=" << fmt(m.purity) << "\n"
      << "ri=" << fmt(m.ri) << "\n";
}

ecc::MatrixFormat parse_format_or_throw(const std::string& s) {
  const auto f = ecc::parse_matrix_format(s);
  if (!f)
    throw CLI::ValidationError("--format", "unknown matrix format '" + s +
                                               "' (coord or dense)");
  return *f;
}

struct MatrixArg {
  std::string path;
  std::string format = "coord";

  ecc::BinaryMatrix load() const {
    return ecc::load_matrix(path, parse_format_or_throw(format));
  }
};

void add_matrix_options(CLI::App* cmd, const std::string& name,
                        MatrixArg& arg, const std::string& what) {
  cmd->add_option("--" + name, arg.path, what + " matrix file")->required();
  cmd->add_option("--" + name + "-format", arg.format,
                  what + " matrix format: coord or dense");
}

struct FitArgs {
  ecc::TransferConfig config;
  std::size_t select_features = 0;
  std::string out_dir;
};

void add_fit_options(CLI::App* cmd, FitArgs& args, bool with_penalties) {
  if (with_penalties) {
    cmd->add_option("--alpha", args.config.alpha,
                    "row-marginal transfer weight");
    cmd->add_option("--beta", args.config.beta,
                    "feature-marginal transfer weight");
  }
  cmd->add_option("--col-clusters,-K", args.config.n_col_clusters,
                  "feature cluster count (shared across stages)");
  cmd->add_option("--aux-row-clusters", args.config.n_aux_row_clusters,
                  "auxiliary cell cluster count");
  cmd->add_option("--target-row-clusters", args.config.n_target_row_clusters,
                  "target cell cluster count");
  cmd->add_option("--aux-iterations", args.config.aux_iterations,
                  "auxiliary-stage iteration budget");
  cmd->add_option("--iterations", args.config.target_iterations,
                  "target-stage iteration budget");
  cmd->add_option("--seed", args.config.seed, "random seed");
  cmd->add_option("--restarts", args.config.restarts,
                  "independent restarts per fit");
  cmd->add_option("--select-features", args.select_features,
                  "keep this many top-variance features (0 = all)");
  cmd->add_option("--out-dir", args.out_dir, "output directory")->required();
}

ecc::BinaryMatrix maybe_select(const ecc::BinaryMatrix& m, std::size_t count,
                               const std::string& role,
                               const std::string& out_dir,
                               Manifest& manifest) {
  if (count == 0) return m;
  auto [reduced, kept] = ecc::select_top_variance(m, count);
  const auto path = out_path(out_dir, role + "_kept_features.txt");
  ecc::write_labels(path, kept);
  manifest.add_file(role + "_kept_features", path, true);
  return reduced;
}

void write_fit(const std::string& prefix, const ecc::FitReport& fit,
               const std::string& out_dir, Manifest& manifest) {
  const auto rows = out_path(out_dir, prefix + "_row_assign.txt");
  const auto cols = out_path(out_dir, prefix + "_col_assign.txt");
  const auto trace = out_path(out_dir, prefix + "_trace.tsv");
  ecc::write_labels(rows, fit.state.row_assign);
  ecc::write_labels(cols, fit.state.col_assign);
  write_trace(trace, fit.objective_trace);
  manifest.add(prefix + ".objective", fit.state.objective);
  manifest.add(prefix + ".iterations_run",
               static_cast<std::uint64_t>(fit.iterations_run));
  manifest.add(prefix + ".converged", fit.converged ? "true" : "false");
  manifest.add_file(prefix + "_row_assign", rows, true);
  manifest.add_file(prefix + "_col_assign", cols, true);
  manifest.add_file(prefix + "_trace", trace, true);
}

void add_config_params(Manifest& manifest, const ecc::TransferConfig& c) {
  manifest.add("param.alpha", c.alpha);
  manifest.add("param.beta", c.beta);
  manifest.add("param.col_clusters",
               static_cast<std::uint64_t>(c.n_col_clusters));
  manifest.add("param.aux_row_clusters",
               static_cast<std::uint64_t>(c.n_aux_row_clusters));
  manifest.add("param.target_row_clusters",
               static_cast<std::uint64_t>(c.n_target_row_clusters));
  manifest.add("param.aux_iterations",
               static_cast<std::uint64_t>(c.aux_iterations));
  manifest.add("param.iterations",
               static_cast<std::uint64_t>(c.target_iterations));
  manifest.add("param.seed", c.seed);
  manifest.add("param.restarts", static_cast<std::uint64_t>(c.restarts));
}

Manifest new_manifest(const std::string& subcommand) {
  Manifest m;
  m.add("tool", "eccx");
  m.add("version", kVersion);
  m.add("subcommand", subcommand);
  return m;
}

void run_simulate(const ecc::SimulationParams& params,
                  const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto pair = ecc::generate(params);
  Manifest manifest = new_manifest("simulate");
  manifest.add("param.n_aux", static_cast<std::uint64_t>(params.n_aux));
  manifest.add("param.n_target", static_cast<std::uint64_t>(params.n_target));
  manifest.add("param.n_features",
               static_cast<std::uint64_t>(params.n_features));
  manifest.add("param.percentage", params.percentage);
  manifest.add("param.sigma", params.sigma);
  manifest.add("param.seed", params.seed);
  manifest.add("param.alternate_reading",
               params.alternate_reading ? "true" : "false");
  manifest.add("generator", "ecc-sim-v1");

  const auto aux = out_path(out_dir, "aux.mtx");
  const auto target = out_path(out_dir, "target.mtx");
  const auto aux_labels = out_path(out_dir, "aux_labels.txt");
  const auto target_labels = out_path(out_dir, "target_labels.txt");
  ecc::write_matrix_coordinate(aux, pair.aux, "generator ecc-sim-v1");
  ecc::write_matrix_coordinate(target, pair.target, "generator ecc-sim-v1");
  ecc::write_labels(aux_labels, pair.aux_labels);
  ecc::write_labels(target_labels, pair.target_labels);
  manifest.add_file("aux", aux, true);
  manifest.add_file("target", target, true);
  manifest.add_file("aux_labels", aux_labels, true);
  manifest.add_file("target_labels", target_labels, true);
  manifest.write(out_path(out_dir, "manifest.txt"));
}

void run_fit_aux(const MatrixArg& matrix, const FitArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  Manifest manifest = new_manifest("fit-aux");
  add_config_params(manifest, args.config);
  manifest.add("param.select_features",
               static_cast<std::uint64_t>(args.select_features));
  manifest.add_file("input_matrix", matrix.path);
  const auto m = maybe_select(matrix.load(), args.select_features, "aux",
                              args.out_dir, manifest);
  const auto fit = ecc::itcc_fit(
      m, args.config.n_aux_row_clusters, args.config.n_col_clusters,
      args.config.aux_iterations, args.config.seed, args.config.restarts);
  write_fit("aux", fit, args.out_dir, manifest);
  manifest.write(out_path(args.out_dir, "manifest.txt"));
}

void run_transfer(const MatrixArg& aux, const MatrixArg& target,
                  const FitArgs& args, const std::string& labels_path) {
  std::filesystem::create_directories(args.out_dir);
  Manifest manifest = new_manifest("transfer");
  add_config_params(manifest, args.config);
  manifest.add("param.select_features",
               static_cast<std::uint64_t>(args.select_features));
  manifest.add_file("input_aux", aux.path);
  manifest.add_file("input_target", target.path);
  if (!labels_path.empty()) manifest.add_file("input_labels", labels_path);

  const auto aux_m = maybe_select(aux.load(), args.select_features, "aux",
                                  args.out_dir, manifest);
  const auto target_m = maybe_select(target.load(), args.select_features,
                                     "target", args.out_dir, manifest);
  const auto result = ecc::two_stage_fit(aux_m, target_m, args.config);
  write_fit("aux", result.aux, args.out_dir, manifest);
  write_fit("target", result.target, args.out_dir, manifest);
  if (!labels_path.empty()) {
    const auto labels = ecc::load_labels(labels_path);
    const auto metrics =
        ecc::evaluate_clustering(result.target.state.row_assign, labels);
    const auto path = out_path(args.out_dir, "metrics.txt");
    write_metrics(path, metrics);
    manifest.add_file("metrics", path, true);
  }
  manifest.write(out_path(args.out_dir, "manifest.txt"));
}

struct TuneArgs {
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
  std::vector<std::size_t> k_grid;
  std::string criterion = "unsupervised:target_loss";
  std::size_t aux_row_clusters = 2;
  std::size_t target_row_clusters = 2;
  std::size_t iterations = 10;
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
  std::size_t workers = 0;
  std::string labels_path;
  std::string out_dir;
};

void run_tune(const MatrixArg& aux, const MatrixArg& target,
              const TuneArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  ecc::GridSpec grid;
  if (!args.alpha_grid.empty()) grid.alpha_values = args.alpha_grid;
  if (!args.beta_grid.empty()) grid.beta_values = args.beta_grid;
  if (!args.k_grid.empty()) grid.k_values = args.k_grid;
  const auto criterion = ecc::parse_criterion(args.criterion);
  if (!criterion)
    throw CLI::ValidationError("--criterion",
                               "unknown criterion '" + args.criterion + "'");
  grid.criterion = *criterion;

  Manifest manifest = new_manifest("tune");
  manifest.add("param.criterion", args.criterion);
  manifest.add("param.aux_row_clusters",
               static_cast<std::uint64_t>(args.aux_row_clusters));
  manifest.add("param.target_row_clusters",
               static_cast<std::uint64_t>(args.target_row_clusters));
  manifest.add("param.iterations",
               static_cast<std::uint64_t>(args.iterations));
  manifest.add("param.seed", args.seed);
  manifest.add("param.restarts", static_cast<std::uint64_t>(args.restarts));
  for (std::size_t i = 0; i < grid.alpha_values.size(); ++i)
    manifest.add("param.alpha_grid." + std::to_string(i),
                 grid.alpha_values[i]);
  for (std::size_t i = 0; i < grid.beta_values.size(); ++i)
    manifest.add("param.beta_grid." + std::to_string(i),
                 grid.beta_values[i]);
  for (std::size_t i = 0; i < grid.k_values.size(); ++i)
    manifest.add("param.k_grid." + std::to_string(i),
                 static_cast<std::uint64_t>(grid.k_values[i]));
  manifest.add_file("input_aux", aux.path);
  manifest.add_file("input_target", target.path);
  if (!args.labels_path.empty())
    manifest.add_file("input_labels", args.labels_path);

  const auto aux_m = aux.load();
  const auto target_m = target.load();
  ecc::LabelVector labels;
  if (!args.labels_path.empty()) labels = ecc::load_labels(args.labels_path);
  const auto result = ecc::grid_search(
      aux_m, target_m, args.aux_row_clusters, args.target_row_clusters, grid,
      args.seed, args.restarts, labels.empty() ? nullptr : &labels,
      args.iterations, args.workers);

  const auto grid_path = out_path(args.out_dir, "grid.tsv");
  {
    std::ofstream out(grid_path);
    out << "alpha\tbeta\tk\tcriterion_value\ttarget_loss\tfinal_objective"
           "\titerations\tconverged\tnmi_sqrt\tari\tri\tpurity\n";
    for (const auto& rec : result.records) {
      out << fmt(rec.alpha) << "\t" << fmt(rec.beta) << "\t" << rec.k << "\t"
          << fmt(rec.criterion_value) << "\t" << fmt(rec.target_loss) << "\t"
          << fmt(rec.final_objective) << "\t" << rec.iterations_run << "\t"
          << (rec.converged ? "true" : "false") << "\t"
          << fmt(rec.metrics.nmi) << "\t" << fmt(rec.metrics.ari) << "\t"
          << fmt(rec.metrics.ri) << "\t" << fmt(rec.metrics.purity) << "\n";
    }
  }
  manifest.add_file("grid", grid_path, true);
  const auto& best = result.best();
  manifest.add("best.alpha", best.alpha);
  manifest.add("best.beta", best.beta);
  manifest.add("best.k", static_cast<std::uint64_t>(best.k));
  manifest.add("best.criterion_value", best.criterion_value);
  manifest.write(out_path(args.out_dir, "manifest.txt"));
}

void run_evaluate(const std::string& pred_path, const std::string& truth_path,
                  const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto pred = ecc::load_labels(pred_path);
  const auto truth = ecc::load_labels(truth_path);
  const auto metrics = ecc::evaluate_clustering(pred, truth);
  Manifest manifest = new_manifest("evaluate");
  manifest.add_file("input_pred", pred_path);
  manifest.add_file("input_truth", truth_path);
  const auto path = out_path(out_dir, "metrics.txt");
  write_metrics(path, metrics);
  manifest.add_file("metrics", path, true);
  manifest.write(out_path(out_dir, "manifest.txt"));
}

void run_pipeline(const ecc::SimulationParams& sim, const FitArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  const auto pair = ecc::generate(sim);
  Manifest manifest = new_manifest("pipeline");
  manifest.add("param.n_aux", static_cast<std::uint64_t>(sim.n_aux));
  manifest.add("param.n_target", static_cast<std::uint64_t>(sim.n_target));
  manifest.add("param.n_features",
               static_cast<std::uint64_t>(sim.n_features));
  manifest.add("param.percentage", sim.percentage);
  manifest.add("param.sigma", sim.sigma);
  manifest.add("param.sim_seed", sim.seed);
  manifest.add("param.alternate_reading",
               sim.alternate_reading ? "true" : "false");
  manifest.add("generator", "ecc-sim-v1");
  add_config_params(manifest, args.config);

  const auto aux = out_path(args.out_dir, "aux.mtx");
  const auto target = out_path(args.out_dir, "target.mtx");
  const auto truth = out_path(args.out_dir, "target_labels.txt");
  ecc::write_matrix_coordinate(aux, pair.aux, "generator ecc-sim-v1");
  ecc::write_matrix_coordinate(target, pair.target, "generator ecc-sim-v1");
  ecc::write_labels(truth, pair.target_labels);
  manifest.add_file("aux", aux, true);
  manifest.add_file("target", target, true);
  manifest.add_file("target_labels", truth, true);

  const auto result = ecc::two_stage_fit(pair.aux, pair.target, args.config);
  write_fit("aux", result.aux, args.out_dir, manifest);
  write_fit("target", result.target, args.out_dir, manifest);
  const auto metrics = ecc::evaluate_clustering(result.target.state.row_assign,
                                                pair.target_labels);
  const auto metrics_path = out_path(args.out_dir, "metrics.txt");
  write_metrics(metrics_path, metrics);
  manifest.add_file("metrics", metrics_path, true);
  manifest.write(out_path(args.out_dir, "manifest.txt"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic coupled co-clustering of binary matrices"};
  app.set_version_flag("--version", kVersion);
  // Given before the subcommand; keys are "subcommand.option=value" (or an
  // INI [subcommand] section). Command-line flags override config values.
  app.set_config("--config", "", "flat key=value config file");
  app.require_subcommand(1);

  ecc::SimulationParams sim;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "generate a coupled pair");
  simulate->add_option("--n-aux", sim.n_aux, "auxiliary cell count");
  simulate->add_option("--n-target", sim.n_target, "target cell count");
  simulate->add_option("--n-features", sim.n_features, "feature count");
  simulate->add_option("--percentage", sim.percentage,
                       "correlated-feature percentage, in (0, 1)");
  simulate->add_option("--sigma", sim.sigma, "target noise scale");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_flag("--alternate-reading", sim.alternate_reading,
                     "map percentage to the differential block instead");
  simulate->add_option("--out-dir", sim_out, "output directory")->required();

  MatrixArg fit_matrix;
  FitArgs fit_args;
  auto* fit_aux = app.add_subcommand("fit-aux", "co-cluster one matrix");
  add_matrix_options(fit_aux, "matrix", fit_matrix, "input");
  add_fit_options(fit_aux, fit_args, /*with_penalties=*/false);

  MatrixArg tr_aux, tr_target;
  FitArgs tr_args;
  std::string tr_labels;
  auto* transfer =
      app.add_subcommand("transfer", "two-stage fit with marginal transfer");
  add_matrix_options(transfer, "aux", tr_aux, "auxiliary");
  add_matrix_options(transfer, "target", tr_target, "target");
  add_fit_options(transfer, tr_args, /*with_penalties=*/true);
  transfer->add_option("--labels", tr_labels,
                       "reference target labels for a metrics report");

  MatrixArg tune_aux, tune_target;
  TuneArgs tune_args;
  auto* tune = app.add_subcommand("tune", "grid search over alpha, beta, K");
  add_matrix_options(tune, "aux", tune_aux, "auxiliary");
  add_matrix_options(tune, "target", tune_target, "target");
  tune->add_option("--alpha-grid", tune_args.alpha_grid,
                   "alpha values (comma separated)")
      ->delimiter(',');
  tune->add_option("--beta-grid", tune_args.beta_grid,
                   "beta values (comma separated)")
      ->delimiter(',');
  tune->add_option("--k-grid", tune_args.k_grid,
                   "K values (comma separated)")
      ->delimiter(',');
  tune->add_option("--criterion", tune_args.criterion,
                   "labeled:{purity,nmi,ari,ri} or unsupervised:target_loss");
  tune->add_option("--aux-row-clusters", tune_args.aux_row_clusters,
                   "auxiliary cell cluster count");
  tune->add_option("--target-row-clusters", tune_args.target_row_clusters,
                   "target cell cluster count");
  tune->add_option("--iterations", tune_args.iterations, "iteration budget");
  tune->add_option("--seed", tune_args.seed, "random seed");
  tune->add_option("--restarts", tune_args.restarts, "restarts per fit");
  tune->add_option("--workers", tune_args.workers,
                   "worker threads (0 = ECC_WORKERS or hardware)");
  tune->add_option("--labels", tune_args.labels_path,
                   "reference target labels (required for labeled criteria)");
  tune->add_option("--out-dir", tune_args.out_dir, "output directory")
      ->required();

  std::string eval_pred, eval_truth, eval_out;
  auto* evaluate =
      app.add_subcommand("evaluate", "score predicted against true labels");
  evaluate->add_option("--pred", eval_pred, "predicted labels")->required();
  evaluate->add_option("--truth", eval_truth, "reference labels")->required();
  evaluate->add_option("--out-dir", eval_out, "output directory")->required();

  ecc::SimulationParams pipe_sim;
  FitArgs pipe_args;
  auto* pipeline = app.add_subcommand(
      "pipeline", "simulate, fit both stages, and score in one run");
  pipeline->add_option("--n-aux", pipe_sim.n_aux, "auxiliary cell count");
  pipeline->add_option("--n-target", pipe_sim.n_target, "target cell count");
  pipeline->add_option("--n-features", pipe_sim.n_features, "feature count");
  pipeline->add_option("--percentage", pipe_sim.percentage,
                       "correlated-feature percentage, in (0, 1)");
  pipeline->add_option("--sigma", pipe_sim.sigma, "target noise scale");
  pipeline->add_option("--sim-seed", pipe_sim.seed, "generator seed");
  pipeline->add_flag("--alternate-reading", pipe_sim.alternate_reading,
                     "map percentage to the differential block instead");
  add_fit_options(pipeline, pipe_args, /*with_penalties=*/true);

  try {
    app.parse(argc, argv);
    if (*simulate) run_simulate(sim, sim_out);
    if (*fit_aux) run_fit_aux(fit_matrix, fit_args);
    if (*transfer) run_transfer(tr_aux, tr_target, tr_args, tr_labels);
    if (*tune) run_tune(tune_aux, tune_target, tune_args);
    if (*evaluate) run_evaluate(eval_pred, eval_truth, eval_out);
    if (*pipeline) run_pipeline(pipe_sim, pipe_args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ecc::Error& e) {
    std::fprintf(stderr, "eccx: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "eccx: %s\n", e.what());
    return 2;
  }
  return 0;
}
