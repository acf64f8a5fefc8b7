#include "regimes/framework.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "regimes/errors.hpp"
#include "regimes/generators.hpp"
#include "regimes/rng.hpp"

namespace regimes {

namespace {

std::vector<std::vector<Eigen::Index>> group_members(std::span<const int> labels) {
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) groups[labels[i]].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<std::vector<Eigen::Index>> out;
  out.reserve(groups.size());
  for (auto& [id, members] : groups) {
    (void)id;
    out.push_back(std::move(members));
  }
  return out;
}

std::vector<int> group_ids(std::span<const int> labels) {
  std::map<int, int> seen;
  for (const int l : labels) {
    if (l >= 0) seen.emplace(l, 0);
  }
  std::vector<int> ids;
  ids.reserve(seen.size());
  for (const auto& [id, unused] : seen) {
    (void)unused;
    ids.push_back(id);
  }
  return ids;
}

struct PointOutcome {
  bool ok = false;
  double score = std::numeric_limits<double>::quiet_NaN();
  ClusterAssignment assignment;
  std::vector<ClusterHypothesis> hypotheses;
  HypothesisArray masks;
  std::string error;
};

}  // namespace

LabelingEvaluation evaluate_labeling(const TermDataset& ds, std::span<const int> labels,
                                     const SelectorConfig& selector, DegeneratePolicy policy) {
  if (static_cast<Eigen::Index>(labels.size()) != ds.n_samples()) {
    throw validation_error("labels length does not match observation count");
  }

  LabelingEvaluation eval;
  const std::vector<int> ids = group_ids(labels);
  const auto groups = group_members(labels);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& members = groups[g];
    ClusterHypothesis ch =
        (selector.kind == SelectorKind::chs)
            ? chs_select(ds, members, selector, policy, ids[g])
            : sparse_pca_select(ds, members, selector, policy, ids[g]);
    eval.cluster_hypotheses.push_back(std::move(ch));
  }
  eval.masks = broadcast(eval.cluster_hypotheses, labels, ds.n_terms());
  eval.report = global_score(ds, eval.masks, policy);
  return eval;
}

SweepResult run_sweep(const TermDataset& ds, const SweepGrid& grid) {
  if (grid.k_values.empty()) throw config_error("sweep needs at least one k value");
  if (grid.selector == SelectorKind::sparse_pca && grid.alpha_values.empty()) {
    throw config_error("sparse-pca sweeps need at least one alpha value");
  }
  if (grid.selector == SelectorKind::chs &&
      ds.n_terms() > static_cast<Eigen::Index>(grid.chs_ceiling)) {
    throw config_error("combinatorial selection over " + std::to_string(ds.n_terms()) +
                       " terms exceeds the ceiling of " + std::to_string(grid.chs_ceiling));
  }

  // Selector-without-alpha sweeps still have one (dummy) alpha column so the
  // emitted grid stays rectangular.
  const std::vector<double> alphas =
      (grid.selector == SelectorKind::sparse_pca) ? grid.alpha_values : std::vector<double>{0.0};
  const std::size_t n_k = grid.k_values.size();
  const std::size_t n_alpha = alphas.size();
  const std::size_t n_points = n_k * n_alpha;

  // Clustering input: absolute magnitudes (default) or signed values,
  // standardized per column unless disabled. Selection and scoring always
  // read the raw terms.
  Eigen::MatrixXd feats = grid.cluster_on_magnitude ? ds.terms.cwiseAbs().eval() : ds.terms;
  Eigen::MatrixXd z = grid.standardize_input ? standardize_matrix(feats).z : std::move(feats);

  std::vector<PointOutcome> outcomes(n_points);
  auto eval_point = [&](std::size_t point) {
    const std::size_t ki = point / n_alpha;
    const std::size_t ai = point % n_alpha;
    PointOutcome& out = outcomes[point];
    try {
      ClustererConfig cc;
      cc.kind = grid.clusterer;
      cc.k = grid.k_values[ki];
      cc.seed = mix_seed(grid.seed, static_cast<std::uint64_t>(grid.k_values[ki]),
                         static_cast<std::uint64_t>(ai));
      cc.n_init = grid.n_init;
      cc.max_iter = grid.max_iter;
      cc.tol = grid.tol;
      cc.covariance = grid.covariance;
      out.assignment = (grid.clusterer == ClustererKind::kmeans) ? kmeans_fit(z, cc)
                                                                 : gmm_fit(z, cc);

      SelectorConfig sc;
      sc.kind = grid.selector;
      sc.representative = grid.representative;
      sc.alpha = (grid.selector == SelectorKind::sparse_pca) ? alphas[ai] : 1.0;
      sc.n_components = grid.n_components;
      sc.spca_normalize = grid.spca_normalize;
      sc.chs_ceiling = grid.chs_ceiling;

      LabelingEvaluation eval =
          evaluate_labeling(ds, out.assignment.labels, sc, grid.degenerate_policy);
      out.score = eval.report.global_score;
      out.hypotheses = std::move(eval.cluster_hypotheses);
      out.masks = std::move(eval.masks);
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
      out.score = std::numeric_limits<double>::quiet_NaN();
    }
  };

  int threads = grid.threads;
  if (threads == 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = std::min<int>(threads, static_cast<int>(n_points));
  if (threads <= 1) {
    for (std::size_t p = 0; p < n_points; ++p) eval_point(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t p = next.fetch_add(1);
          if (p >= n_points) break;
          eval_point(p);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  result.k_values = grid.k_values;
  result.alpha_values = alphas;
  result.grid_scores.resize(static_cast<Eigen::Index>(n_k), static_cast<Eigen::Index>(n_alpha));

  // Deterministic argmax scan: k ascending, then alpha ascending, strict
  // improvement only, so ties report the smallest k then smallest alpha.
  std::size_t best_point = n_points;
  double best_score = -std::numeric_limits<double>::infinity();
  bool any_ok = false;
  for (std::size_t ki = 0; ki < n_k; ++ki) {
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
      const std::size_t p = ki * n_alpha + ai;
      result.grid_scores(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(ai)) =
          outcomes[p].score;
      if (!outcomes[p].ok) continue;
      any_ok = true;
      if (outcomes[p].score > best_score) {
        best_score = outcomes[p].score;
        best_point = p;
      }
    }
  }
  if (!any_ok) {
    std::string detail;
    for (std::size_t p = 0; p < n_points; ++p) {
      if (!outcomes[p].error.empty()) {
        detail = outcomes[p].error;
        break;
      }
    }
    throw numerical_error("every grid point failed; first error: " + detail);
  }
  for (std::size_t p = 0; p < n_points; ++p) {
    if (!outcomes[p].ok) {
      result.warnings.push_back("grid point " + std::to_string(p) +
                                " failed: " + outcomes[p].error);
    }
  }

  const std::size_t best_ki = best_point / n_alpha;
  const std::size_t best_ai = best_point % n_alpha;
  result.best_k = grid.k_values[best_ki];
  result.best_alpha = alphas[best_ai];
  result.best_seed = mix_seed(grid.seed, static_cast<std::uint64_t>(result.best_k),
                              static_cast<std::uint64_t>(best_ai));
  result.best_assignment = std::move(outcomes[best_point].assignment);
  result.best_hypotheses = std::move(outcomes[best_point].hypotheses);
  result.best_global_score = best_score;

  // Eq.-1 style fallback: when no grid point beats retaining every term,
  // report the all-ones hypothesis array.
  const HypothesisArray all_ones(static_cast<std::size_t>(ds.n_samples()),
                                 Hypothesis::all_true(ds.n_terms()));
  result.full_set_score =
      global_score(ds, all_ones, grid.degenerate_policy).global_score;
  result.fell_back_to_full_set = !(result.best_global_score > result.full_set_score);
  result.best_masks =
      result.fell_back_to_full_set ? all_ones : std::move(outcomes[best_point].masks);
  for (const auto& w : result.best_assignment.warnings) result.warnings.push_back(w);
  return result;
}

std::vector<BenchRow> run_benchmark(const BenchConfig& config) {
  if (config.repeats < 1) throw config_error("benchmark repeats must be positive");

  struct Case {
    std::string axis;
    double axis_value;
    SyntheticConfig synth;
  };
  std::vector<Case> cases;
  if (config.family == BenchFamily::sample_size) {
    if (config.grid_sides.empty()) throw config_error("sample-size benchmark needs grid sides");
    for (const int side : config.grid_sides) {
      SyntheticConfig sc;
      sc.d = config.fixed_d;
      sc.nx = side;
      sc.ny = side;
      cases.push_back({"N", static_cast<double>(side) * side, sc});
    }
  } else {
    if (config.d_values.empty()) throw config_error("term-count benchmark needs d values");
    for (const int d : config.d_values) {
      SyntheticConfig sc;
      sc.d = d;
      sc.nx = config.fixed_side;
      sc.ny = config.fixed_side;
      cases.push_back({"D", static_cast<double>(d), sc});
    }
  }

  std::vector<BenchRow> rows;
  for (const auto& test_case : cases) {
    const TermDataset ds = gen_synthetic(test_case.synth);
    SweepGrid grid;
    grid.clusterer = config.clusterer;
    grid.selector = config.selector;
    grid.k_values = {config.k};
    if (config.selector == SelectorKind::sparse_pca) grid.alpha_values = {config.alpha};
    grid.seed = config.seed;
    grid.threads = 1;

    double total = 0.0;
    for (int rep = 0; rep < config.repeats; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const SweepResult res = run_sweep(ds, grid);
      const auto stop = std::chrono::steady_clock::now();
      (void)res;
      total += std::chrono::duration<double>(stop - start).count();
    }
    BenchRow row;
    row.axis = test_case.axis;
    row.axis_value = test_case.axis_value;
    row.seconds = total / config.repeats;
    rows.push_back(row);
  }

  // Normalize by the time at the smallest axis value.
  double t0 = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (row.axis_value < smallest) {
      smallest = row.axis_value;
      t0 = row.seconds;
    }
  }
  for (auto& row : rows) row.t_over_t0 = (t0 > 0.0) ? row.seconds / t0 : 0.0;
  return rows;
}

}  // namespace regimes
