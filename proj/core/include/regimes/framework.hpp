#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regimes/clustering.hpp"
#include "regimes/score.hpp"
#include "regimes/selectors.hpp"
#include "regimes/term_dataset.hpp"

namespace regimes {

// Hyperparameter grid for the cluster-then-select loop. Clustering runs on
// the standardized view; hypothesis selection and scoring always use the raw
// term magnitudes (the local score is scale-invariant, standardization is a
// clustering concern only).
struct SweepGrid {
  ClustererKind clusterer = ClustererKind::kmeans;
  std::vector<int> k_values;
  std::vector<double> alpha_values;  // used (and required) only by sparse-pca
  SelectorKind selector = SelectorKind::chs;
  std::uint64_t seed = 0;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::penalize;

  // Pass-through knobs.
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-6;
  CovarianceKind covariance = CovarianceKind::full;
  ChsRepresentative representative = ChsRepresentative::mean_score;
  bool spca_normalize = false;
  int n_components = 1;
  int chs_ceiling = 16;
  bool standardize_input = true;  // off only for sensitivity checks
  // Cluster on absolute term magnitudes (default). Regimes are defined by
  // magnitude structure and the local score is sign-invariant, so the sign
  // pattern carries no balance information; clustering signed values can
  // split sign-symmetric data by sign instead of by regime.
  bool cluster_on_magnitude = true;
  int threads = 1;                // 0 = hardware concurrency; results identical regardless
};

struct SweepResult {
  std::vector<int> k_values;
  std::vector<double> alpha_values;  // single entry 0 for selectors without alpha
  // One row per k, one column per alpha; NaN marks a failed grid point.
  Eigen::MatrixXd grid_scores;

  int best_k = 0;
  double best_alpha = 0.0;
  std::uint64_t best_seed = 0;  // derived seed of the winning grid point
  ClusterAssignment best_assignment;
  std::vector<ClusterHypothesis> best_hypotheses;
  HypothesisArray best_masks;  // all-true everywhere when fell_back_to_full_set
  double best_global_score = 0.0;
  double full_set_score = 0.0;
  bool fell_back_to_full_set = false;
  std::vector<std::string> warnings;

  // The objective value of the returned hypothesis array: the best grid
  // score, or the full-set score when no grid point beats retaining all
  // terms.
  double reported_score() const {
    return fell_back_to_full_set ? full_set_score : best_global_score;
  }
};

// Sweeps every (k, alpha) grid point: standardize, cluster, select one
// hypothesis per cluster on the raw terms, broadcast, and score. Grid points
// get independent seeds derived from (seed, k, alpha index). Points that
// fail (e.g. N < k) record NaN and the sweep continues; all points failing
// is an error. Ties at the optimum report the smallest k, then the smallest
// alpha. Falls back to the all-ones hypothesis array when no point beats the
// full-set score.
SweepResult run_sweep(const TermDataset& ds, const SweepGrid& grid);

struct LabelingEvaluation {
  HypothesisArray masks;
  ScoreReport report;
  std::vector<ClusterHypothesis> cluster_hypotheses;
};

// Hypothesis selection + scoring for an externally supplied partition
// (hand-made labels or a third-party clusterer's output). Negative labels
// mark noise and receive the all-true mask.
LabelingEvaluation evaluate_labeling(const TermDataset& ds, std::span<const int> labels,
                                     const SelectorConfig& selector,
                                     DegeneratePolicy policy = DegeneratePolicy::penalize);

// Wall-clock timing of single framework passes (one grid point) over a
// family of synthetic datasets, Fig.-style normalized t/t0 output.
enum class BenchFamily { sample_size, term_count };

struct BenchConfig {
  BenchFamily family = BenchFamily::sample_size;
  std::vector<int> grid_sides;  // sample_size family: N = side^2 per entry
  std::vector<int> d_values;    // term_count family
  int fixed_side = 64;          // term_count family: N = fixed_side^2
  int fixed_d = 8;              // sample_size family
  int repeats = 3;
  int k = 2;
  double alpha = 1.0;
  ClustererKind clusterer = ClustererKind::kmeans;
  SelectorKind selector = SelectorKind::chs;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string axis;       // "N" or "D"
  double axis_value = 0;  // sample count or term count
  double seconds = 0;     // mean over repeats
  double t_over_t0 = 0;   // normalized by the smallest axis value's time
};

std::vector<BenchRow> run_benchmark(const BenchConfig& config);

}  // namespace regimes
