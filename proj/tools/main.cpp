// Command-line surface for dominant-balance regime discovery:
//
//   regimes gen synthetic|munk   dataset generators
//   regimes sim-angio            tumor-angiogenesis simulation + term export
//   regimes fit                  hyperparameter sweep (cluster x select x score)
//   regimes score                score user-supplied masks or labels
//   regimes bench                wall-clock scaling of single framework passes
//
// Exit codes: 0 success, 2 validation/parse error, 3 numerical failure,
// 4 configuration error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cli_io.hpp"
#include "regimes/angiogenesis.hpp"
#include "regimes/errors.hpp"
#include "regimes/framework.hpp"
#include "regimes/generators.hpp"
#include "regimes/score.hpp"
#include "regimes/term_dataset.hpp"

namespace fs = std::filesystem;
using regimes::cli::json;

namespace {

struct CommonFlags {
  std::string out = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_format = true) {
  cmd->add_option("--out", flags.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Seed for all stochastic components")
      ->capture_default_str();
  cmd->add_option("--threads", flags.threads,
                  "Worker threads (0 = auto); results are identical regardless")
      ->capture_default_str();
  if (with_format) {
    cmd->add_option("--format", flags.format, "Dataset format: csv or binary")
        ->check(CLI::IsMember({"csv", "binary"}))
        ->capture_default_str();
  }
}

regimes::DatasetFormat format_of(const CommonFlags& flags) {
  return flags.format == "binary" ? regimes::DatasetFormat::binary_grid
                                  : regimes::DatasetFormat::delimited_text;
}

std::string dataset_name(const std::string& stem, const CommonFlags& flags) {
  return stem + (flags.format == "binary" ? ".rgsc" : ".csv");
}

regimes::ClustererKind parse_clusterer(const std::string& s) {
  if (s == "kmeans") return regimes::ClustererKind::kmeans;
  if (s == "gmm") return regimes::ClustererKind::gmm;
  throw regimes::config_error("unknown clusterer '" + s + "'");
}

regimes::SelectorKind parse_selector(const std::string& s) {
  if (s == "chs") return regimes::SelectorKind::chs;
  if (s == "spca" || s == "sparse-pca") return regimes::SelectorKind::sparse_pca;
  throw regimes::config_error("unknown selector '" + s + "'");
}

regimes::DegeneratePolicy parse_degenerate(const std::string& s) {
  if (s == "penalize") return regimes::DegeneratePolicy::penalize;
  if (s == "exclude") return regimes::DegeneratePolicy::exclude;
  throw regimes::config_error("unknown degenerate policy '" + s + "'");
}

std::vector<std::string> collect_argv(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 0; i < argc; ++i) out.emplace_back(argv[i]);
  return out;
}

// Writes a dataset through a temp file so output stays atomic.
void write_dataset_atomic(const regimes::TermDataset& ds, const fs::path& path,
                          regimes::DatasetFormat format) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  regimes::write_dataset(ds, tmp.string(), format);
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------- gen ----

int cmd_gen_synthetic(const CommonFlags& flags, const regimes::SyntheticConfig& config,
                      const std::vector<std::string>& argv) {
  if (!regimes::synthetic_closure_exact(config)) {
    std::cerr << "warning: d = " << config.d
              << " is not a multiple of 4; rows close only approximately\n";
  }
  const regimes::TermDataset ds = regimes::gen_synthetic(config, flags.seed);
  const fs::path out_dir(flags.out);
  write_dataset_atomic(ds, out_dir / dataset_name("synthetic_terms", flags), format_of(flags));

  regimes::cli::ManifestInfo info;
  info.command = "gen synthetic";
  info.argv = argv;
  info.seed = flags.seed;
  info.config = {{"d", config.d},     {"nx", config.nx},     {"ny", config.ny},
                 {"lambda", config.lambda}, {"beta", config.beta}, {"eta0", config.eta0},
                 {"omega", config.omega_coef}, {"format", flags.format}};
  regimes::cli::write_manifest(out_dir, info);
  std::cout << "wrote " << (out_dir / dataset_name("synthetic_terms", flags)).string() << " ("
            << ds.n_samples() << " rows, " << ds.n_terms() << " terms)\n";
  return 0;
}

int cmd_gen_munk(const CommonFlags& flags, const regimes::MunkConfig& config,
                 const std::vector<std::string>& argv) {
  const regimes::MunkResult result = regimes::gen_munk(config);
  const fs::path out_dir(flags.out);
  write_dataset_atomic(result.dataset, out_dir / dataset_name("munk_terms", flags),
                       format_of(flags));

  std::string curves = "x,western_boundary_score,sverdrup_score,residual\n";
  for (std::size_t i = 0; i < result.curves.x.size(); ++i) {
    curves += regimes::cli::format_double(result.curves.x[i]);
    curves += ',';
    curves += regimes::cli::format_double(result.curves.western_boundary[i]);
    curves += ',';
    curves += regimes::cli::format_double(result.curves.sverdrup[i]);
    curves += ',';
    curves += regimes::cli::format_double(result.curves.residual[i]);
    curves += '\n';
  }
  regimes::cli::atomic_write(out_dir / "munk_score_curves.csv", curves);

  regimes::cli::ManifestInfo info;
  info.command = "gen munk";
  info.argv = argv;
  info.seed = flags.seed;
  info.config = {{"epsilon", config.epsilon},
                 {"nx", config.nx},
                 {"ny", config.ny},
                 {"y_slice", config.y_slice},
                 {"format", flags.format}};
  regimes::cli::write_manifest(out_dir, info);
  std::cout << "wrote " << (out_dir / dataset_name("munk_terms", flags)).string()
            << " and munk_score_curves.csv\n";
  return 0;
}

// ----------------------------------------------------------- sim-angio ----

int cmd_sim_angio(const CommonFlags& flags, double t_end, double noise, int resolution,
                  const std::string& snapshot_spec, const std::vector<std::string>& argv) {
  std::vector<double> snapshot_times;
  if (!snapshot_spec.empty()) {
    for (const auto& v : regimes::cli::parse_log_range(snapshot_spec, 1)) {
      snapshot_times.push_back(v);
    }
  }
  const regimes::AngioRun run =
      regimes::simulate_angiogenesis(t_end, noise, flags.seed, resolution, snapshot_times);
  const regimes::TermDataset ds = regimes::extract_angio_terms(run.final_state);

  const fs::path out_dir(flags.out);
  write_dataset_atomic(ds, out_dir / dataset_name("angio_terms", flags), format_of(flags));
  for (const auto& snap : run.snapshots) {
    char name[64];
    std::snprintf(name, sizeof(name), "angio_fields_t%.6g.rgsc", snap.t);
    write_dataset_atomic(regimes::angio_fields_dataset(snap), out_dir / name,
                         regimes::DatasetFormat::binary_grid);
  }

  regimes::cli::ManifestInfo info;
  info.command = "sim-angio";
  info.argv = argv;
  info.seed = flags.seed;
  info.config = {{"t_end", t_end},
                 {"noise", noise},
                 {"resolution", resolution},
                 {"snapshots", snapshot_times},
                 {"format", flags.format},
                 {"accepted_steps", run.accepted_steps},
                 {"rejected_steps", run.rejected_steps},
                 {"clamped_cells", run.clamped_cells},
                 {"mass_initial", run.mass_initial},
                 {"mass_final", run.mass_final}};
  regimes::cli::write_manifest(out_dir, info);
  std::cout << "simulated to t = " << t_end << " in " << run.accepted_steps << " steps; wrote "
            << (out_dir / dataset_name("angio_terms", flags)).string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- fit ----

int cmd_fit(const CommonFlags& flags, const std::string& data_path,
            const std::string& clusterer, const std::string& selector, const std::string& k_spec,
            const std::string& alpha_spec, const std::string& degenerate,
            const std::string& representative, bool spca_normalize, bool no_standardize,
            bool cluster_signed, int n_init, int max_iter, double tol, const std::string& covariance,
            int n_components, int chs_ceiling, const std::vector<std::string>& argv) {
  const regimes::TermDataset ds = regimes::load_dataset(data_path);

  regimes::SweepGrid grid;
  grid.clusterer = parse_clusterer(clusterer);
  grid.selector = parse_selector(selector);
  grid.k_values = regimes::cli::parse_int_range(k_spec);
  if (grid.selector == regimes::SelectorKind::sparse_pca) {
    grid.alpha_values = regimes::cli::parse_log_range(alpha_spec);
  }
  grid.seed = flags.seed;
  grid.degenerate_policy = parse_degenerate(degenerate);
  grid.n_init = n_init;
  grid.max_iter = max_iter;
  grid.tol = tol;
  grid.covariance = covariance == "diagonal" ? regimes::CovarianceKind::diagonal
                                             : regimes::CovarianceKind::full;
  grid.representative = representative == "mean-abs-vector"
                            ? regimes::ChsRepresentative::mean_abs_vector
                            : regimes::ChsRepresentative::mean_score;
  grid.spca_normalize = spca_normalize;
  grid.n_components = n_components;
  grid.chs_ceiling = chs_ceiling;
  grid.standardize_input = !no_standardize;
  grid.cluster_on_magnitude = !cluster_signed;
  grid.threads = flags.threads;

  const regimes::SweepResult result = regimes::run_sweep(ds, grid);
  const regimes::ScoreReport report =
      regimes::global_score(ds, result.best_masks, grid.degenerate_policy);

  const fs::path out_dir(flags.out);
  regimes::cli::atomic_write(
      out_dir / "grid.csv",
      regimes::cli::grid_csv(result, grid.selector == regimes::SelectorKind::sparse_pca));
  regimes::cli::atomic_write(out_dir / "labels.csv",
                             regimes::cli::labels_csv(ds, result.best_assignment.labels,
                                                      result.best_masks, report));
  regimes::cli::atomic_write(out_dir / "summary.json",
                             regimes::cli::summary_json(result, ds).dump(2) + "\n");

  regimes::cli::ManifestInfo info;
  info.command = "fit";
  info.argv = argv;
  info.seed = flags.seed;
  info.config = {{"data", data_path},
                 {"clusterer", clusterer},
                 {"selector", selector},
                 {"k", k_spec},
                 {"alpha", alpha_spec},
                 {"degenerate", degenerate},
                 {"representative", representative},
                 {"spca_normalize", spca_normalize},
                 {"standardize", !no_standardize},
                 {"cluster_features", cluster_signed ? "signed" : "magnitude"},
                 {"n_init", n_init},
                 {"max_iter", max_iter},
                 {"tol", tol},
                 {"covariance", covariance},
                 {"n_components", n_components},
                 {"chs_ceiling", chs_ceiling},
                 {"threads", flags.threads}};
  info.input_paths = {data_path};
  regimes::cli::write_manifest(out_dir, info);

  std::cout << "best global score " << result.reported_score() << " at k = " << result.best_k;
  if (grid.selector == regimes::SelectorKind::sparse_pca) {
    std::cout << ", alpha = " << result.best_alpha;
  }
  if (result.fell_back_to_full_set) std::cout << " (fell back to the full-set hypothesis)";
  std::cout << "\n";
  return 0;
}

// --------------------------------------------------------------- score ----

regimes::Hypothesis parse_balance_spec(const std::string& spec, Eigen::Index d) {
  regimes::Hypothesis h;
  for (const char ch : spec) {
    if (ch == '0') h.mask.push_back(0);
    else if (ch == '1') h.mask.push_back(1);
    else if (ch == ',' || ch == ' ') continue;
    else throw regimes::validation_error("balance spec must be 0/1 entries, got '" + spec + "'");
  }
  if (static_cast<Eigen::Index>(h.mask.size()) != d) {
    throw regimes::validation_error("balance spec length " + std::to_string(h.mask.size()) +
                                    " does not match term count " + std::to_string(d));
  }
  return h;
}

regimes::HypothesisArray load_masks_file(const std::string& path, Eigen::Index n,
                                         Eigen::Index d) {
  std::ifstream in(path);
  if (!in) throw regimes::validation_error("cannot open masks file: " + path);
  std::vector<regimes::Hypothesis> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    regimes::Hypothesis h = parse_balance_spec(line, d);
    if (!h.is_legal()) {
      throw regimes::validation_error("masks file row " + std::to_string(line_no) +
                                      " selects fewer than 2 terms");
    }
    rows.push_back(std::move(h));
  }
  if (rows.size() == 1) return regimes::HypothesisArray(static_cast<std::size_t>(n), rows[0]);
  if (static_cast<Eigen::Index>(rows.size()) != n) {
    throw regimes::validation_error("masks file has " + std::to_string(rows.size()) +
                                    " rows; expected 1 or " + std::to_string(n));
  }
  return rows;
}

std::vector<int> load_labels_file(const std::string& path, Eigen::Index n) {
  std::ifstream in(path);
  if (!in) throw regimes::validation_error("cannot open labels file: " + path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      labels.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw regimes::validation_error("labels file line is not an integer: '" + line + "'");
    }
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw regimes::validation_error("labels file has " + std::to_string(labels.size()) +
                                    " entries; expected " + std::to_string(n));
  }
  return labels;
}

int cmd_score(const CommonFlags& flags, const std::string& data_path,
              const std::string& masks_path, const std::string& balance_spec,
              const std::string& labels_path, const std::string& selector,
              double alpha, const std::string& degenerate,
              const std::vector<std::string>& argv) {
  const regimes::TermDataset ds = regimes::load_dataset(data_path);
  const regimes::DegeneratePolicy policy = parse_degenerate(degenerate);

  const int sources = (!masks_path.empty() ? 1 : 0) + (!balance_spec.empty() ? 1 : 0) +
                      (!labels_path.empty() ? 1 : 0);
  if (sources != 1) {
    throw regimes::config_error("score needs exactly one of --masks, --balance, --labels");
  }

  regimes::HypothesisArray masks;
  if (!labels_path.empty()) {
    const std::vector<int> labels = load_labels_file(labels_path, ds.n_samples());
    regimes::SelectorConfig sc;
    sc.kind = parse_selector(selector);
    sc.alpha = alpha;
    const regimes::LabelingEvaluation eval = regimes::evaluate_labeling(ds, labels, sc, policy);
    masks = eval.masks;
  } else if (!balance_spec.empty()) {
    masks.assign(static_cast<std::size_t>(ds.n_samples()),
                 parse_balance_spec(balance_spec, ds.n_terms()));
    masks.front().validate();
  } else {
    masks = load_masks_file(masks_path, ds.n_samples(), ds.n_terms());
  }

  const regimes::ScoreReport report = regimes::global_score(ds, masks, policy);

  const fs::path out_dir(flags.out);
  regimes::cli::atomic_write(out_dir / "score_report.csv",
                             regimes::cli::score_report_csv(ds, masks, report));
  json summary;
  summary["global_score"] = report.global_score;
  summary["full_set_score"] = report.full_set_score;
  summary["n_observations"] = ds.n_samples();
  int n_degenerate = 0;
  for (const auto b : ds.degenerate_mask) n_degenerate += b;
  summary["n_degenerate"] = n_degenerate;
  summary["degenerate_policy"] = degenerate;
  regimes::cli::atomic_write(out_dir / "score_summary.json", summary.dump(2) + "\n");

  regimes::cli::ManifestInfo info;
  info.command = "score";
  info.argv = argv;
  info.seed = flags.seed;
  info.config = {{"data", data_path},       {"masks", masks_path}, {"balance", balance_spec},
                 {"labels", labels_path},   {"selector", selector}, {"alpha", alpha},
                 {"degenerate", degenerate}};
  info.input_paths = {data_path};
  if (!masks_path.empty()) info.input_paths.push_back(masks_path);
  if (!labels_path.empty()) info.input_paths.push_back(labels_path);
  regimes::cli::write_manifest(out_dir, info);

  std::cout << "global score " << report.global_score << " (full-set score "
            << report.full_set_score << ")\n";
  return 0;
}

// --------------------------------------------------------------- bench ----

int cmd_bench(const CommonFlags& flags, const std::string& family, const std::string& sides_spec,
              const std::string& d_spec, int fixed_side, int fixed_d, int repeats,
              const std::string& clusterer, const std::string& selector, int k, double alpha,
              const std::vector<std::string>& argv) {
  regimes::BenchConfig config;
  if (family == "n") {
    config.family = regimes::BenchFamily::sample_size;
    config.grid_sides = regimes::cli::parse_int_range(sides_spec);
  } else if (family == "d") {
    config.family = regimes::BenchFamily::term_count;
    config.d_values = regimes::cli::parse_int_range(d_spec);
  } else {
    throw regimes::config_error("bench family must be 'n' or 'd'");
  }
  config.fixed_side = fixed_side;
  config.fixed_d = fixed_d;
  config.repeats = repeats;
  config.k = k;
  config.alpha = alpha;
  config.clusterer = parse_clusterer(clusterer);
  config.selector = parse_selector(selector);
  config.seed = flags.seed;

  const std::vector<regimes::BenchRow> rows = regimes::run_benchmark(config);
  const fs::path out_dir(flags.out);
  regimes::cli::atomic_write(out_dir / "timing.csv",
                             regimes::cli::timing_csv(rows, clusterer, selector));

  regimes::cli::ManifestInfo info;
  info.command = "bench";
  info.argv = argv;
  info.seed = flags.seed;
  info.config = {{"family", family},     {"sides", sides_spec}, {"d_values", d_spec},
                 {"fixed_side", fixed_side}, {"fixed_d", fixed_d}, {"repeats", repeats},
                 {"clusterer", clusterer},   {"selector", selector}, {"k", k},
                 {"alpha", alpha}};
  regimes::cli::write_manifest(out_dir, info);

  for (const auto& row : rows) {
    std::cout << row.axis << " = " << row.axis_value << ": " << row.seconds << " s (t/t0 = "
              << row.t_over_t0 << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dominant-balance regime discovery over equation-term data"};
  app.require_subcommand(1);
  const std::vector<std::string> full_argv = collect_argv(argc, argv);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate example datasets");
  gen->require_subcommand(1);

  CommonFlags synth_flags;
  regimes::SyntheticConfig synth_config;
  auto* gen_synth = gen->add_subcommand("synthetic", "Two-regime synthetic term field");
  add_common(gen_synth, synth_flags);
  gen_synth->add_option("--d", synth_config.d, "Term count (multiple of 4 closes exactly)")
      ->capture_default_str();
  gen_synth->add_option("--nx", synth_config.nx, "Grid cells in x")->capture_default_str();
  gen_synth->add_option("--ny", synth_config.ny, "Grid cells in y")->capture_default_str();

  CommonFlags munk_flags;
  regimes::MunkConfig munk_config;
  auto* gen_munk_cmd = gen->add_subcommand("munk", "Wind-driven circulation balance terms");
  add_common(gen_munk_cmd, munk_flags);
  gen_munk_cmd->add_option("--epsilon", munk_config.epsilon, "Boundary-layer parameter")
      ->capture_default_str();
  gen_munk_cmd->add_option("--nx", munk_config.nx, "Grid cells in x")->capture_default_str();
  gen_munk_cmd->add_option("--ny", munk_config.ny, "Grid cells in y")->capture_default_str();
  gen_munk_cmd->add_option("--y-slice", munk_config.y_slice, "Latitude of the score curves")
      ->capture_default_str();

  // sim-angio
  CommonFlags angio_flags;
  double t_end = 0.91;
  double noise = 0.01;
  int resolution = 256;
  std::string snapshot_spec;
  auto* sim = app.add_subcommand("sim-angio", "Tumor-angiogenesis simulation and term export");
  add_common(sim, angio_flags);
  sim->add_option("--t-end", t_end, "Integration end time")->capture_default_str();
  sim->add_option("--noise", noise, "Red-noise amplitude on initial c and f")
      ->capture_default_str();
  sim->add_option("--resolution", resolution, "Grid cells per side")->capture_default_str();
  sim->add_option("--snapshots", snapshot_spec, "Comma list of snapshot times (field dumps)");

  // fit
  CommonFlags fit_flags;
  std::string fit_data, fit_clusterer = "kmeans", fit_selector = "chs", fit_k = "2:10";
  std::string fit_alpha = "1e-2:1e2:20", fit_degenerate = "penalize";
  std::string fit_representative = "mean-score", fit_covariance = "full";
  bool fit_spca_normalize = false, fit_no_standardize = false, fit_cluster_signed = false;
  int fit_n_init = 10, fit_max_iter = 300, fit_n_components = 1, fit_chs_ceiling = 16;
  double fit_tol = 1e-6;
  auto* fit = app.add_subcommand("fit", "Sweep clusterer x selector grids for the best regimes");
  add_common(fit, fit_flags, /*with_format=*/false);
  fit->add_option("--data", fit_data, "Input dataset (csv or binary-grid)")->required();
  fit->add_option("--clusterer", fit_clusterer, "kmeans or gmm")
      ->check(CLI::IsMember({"kmeans", "gmm"}))
      ->capture_default_str();
  fit->add_option("--selector", fit_selector, "chs or spca")
      ->check(CLI::IsMember({"chs", "spca"}))
      ->capture_default_str();
  fit->add_option("--k", fit_k, "Cluster counts, lo:hi[:step] or comma list")
      ->capture_default_str();
  fit->add_option("--alpha", fit_alpha, "spca sparsity levels, lo:hi[:count] log-spaced")
      ->capture_default_str();
  fit->add_option("--degenerate", fit_degenerate, "Degenerate-row policy: penalize or exclude")
      ->check(CLI::IsMember({"penalize", "exclude"}))
      ->capture_default_str();
  fit->add_option("--representative", fit_representative,
                  "CHS objective: mean-score or mean-abs-vector")
      ->check(CLI::IsMember({"mean-score", "mean-abs-vector"}))
      ->capture_default_str();
  fit->add_flag("--spca-normalize", fit_spca_normalize,
                "Scale cluster columns to unit variance before sparse PCA");
  fit->add_flag("--no-standardize", fit_no_standardize,
                "Cluster on raw terms instead of the standardized view");
  fit->add_flag("--cluster-signed", fit_cluster_signed,
                "Cluster on signed term values instead of absolute magnitudes");
  fit->add_option("--n-init", fit_n_init, "Clustering restarts")->capture_default_str();
  fit->add_option("--max-iter", fit_max_iter, "Clustering iteration cap")->capture_default_str();
  fit->add_option("--tol", fit_tol, "Clustering convergence tolerance")->capture_default_str();
  fit->add_option("--covariance", fit_covariance, "GMM covariance: full or diagonal")
      ->check(CLI::IsMember({"full", "diagonal"}))
      ->capture_default_str();
  fit->add_option("--n-components", fit_n_components, "Sparse-PCA components")
      ->capture_default_str();
  fit->add_option("--chs-ceiling", fit_chs_ceiling, "Max term count for exhaustive search")
      ->capture_default_str();

  // score
  CommonFlags score_flags;
  std::string score_data, score_masks, score_balance, score_labels;
  std::string score_selector = "chs", score_degenerate = "penalize";
  double score_alpha = 1.0;
  auto* score = app.add_subcommand("score", "Score user-supplied masks or labels");
  add_common(score, score_flags, /*with_format=*/false);
  score->add_option("--data", score_data, "Input dataset (csv or binary-grid)")->required();
  score->add_option("--masks", score_masks, "Masks file: 0/1 rows (1 row broadcasts)");
  score->add_option("--balance", score_balance, "Named balance, e.g. 1,1,0,0 (broadcasts)");
  score->add_option("--labels", score_labels, "Labels file: one integer per observation");
  score->add_option("--selector", score_selector, "Selector for --labels mode: chs or spca")
      ->check(CLI::IsMember({"chs", "spca"}))
      ->capture_default_str();
  score->add_option("--alpha", score_alpha, "spca sparsity for --labels mode")
      ->capture_default_str();
  score->add_option("--degenerate", score_degenerate, "penalize or exclude")
      ->check(CLI::IsMember({"penalize", "exclude"}))
      ->capture_default_str();

  // bench
  CommonFlags bench_flags;
  std::string bench_family = "n", bench_sides = "32,64,128", bench_d = "4,6,8,10";
  std::string bench_clusterer = "kmeans", bench_selector = "chs";
  int bench_fixed_side = 64, bench_fixed_d = 8, bench_repeats = 3, bench_k = 2;
  double bench_alpha = 1.0;
  auto* bench = app.add_subcommand("bench", "Time single framework passes while N or D varies");
  add_common(bench, bench_flags, /*with_format=*/false);
  bench->add_option("--family", bench_family, "Scaling axis: n (sample size) or d (term count)")
      ->check(CLI::IsMember({"n", "d"}))
      ->capture_default_str();
  bench->add_option("--sides", bench_sides, "Grid sides for the n family (N = side^2)")
      ->capture_default_str();
  bench->add_option("--d-values", bench_d, "Term counts for the d family")
      ->capture_default_str();
  bench->add_option("--fixed-side", bench_fixed_side, "Grid side for the d family")
      ->capture_default_str();
  bench->add_option("--fixed-d", bench_fixed_d, "Term count for the n family")
      ->capture_default_str();
  bench->add_option("--repeats", bench_repeats, "Passes averaged per point")
      ->capture_default_str();
  bench->add_option("--clusterer", bench_clusterer, "kmeans or gmm")->capture_default_str();
  bench->add_option("--selector", bench_selector, "chs or spca")->capture_default_str();
  bench->add_option("--k", bench_k, "Cluster count per pass")->capture_default_str();
  bench->add_option("--alpha", bench_alpha, "spca sparsity per pass")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_synth->parsed()) return cmd_gen_synthetic(synth_flags, synth_config, full_argv);
    if (gen_munk_cmd->parsed()) return cmd_gen_munk(munk_flags, munk_config, full_argv);
    if (sim->parsed()) {
      return cmd_sim_angio(angio_flags, t_end, noise, resolution, snapshot_spec, full_argv);
    }
    if (fit->parsed()) {
      return cmd_fit(fit_flags, fit_data, fit_clusterer, fit_selector, fit_k, fit_alpha,
                     fit_degenerate, fit_representative, fit_spca_normalize, fit_no_standardize,
                     fit_cluster_signed, fit_n_init, fit_max_iter, fit_tol, fit_covariance, fit_n_components,
                     fit_chs_ceiling, full_argv);
    }
    if (score->parsed()) {
      return cmd_score(score_flags, score_data, score_masks, score_balance, score_labels,
                       score_selector, score_alpha, score_degenerate, full_argv);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_flags, bench_family, bench_sides, bench_d, bench_fixed_side,
                       bench_fixed_d, bench_repeats, bench_clusterer, bench_selector, bench_k,
                       bench_alpha, full_argv);
    }
  } catch (const regimes::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const regimes::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const regimes::numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
