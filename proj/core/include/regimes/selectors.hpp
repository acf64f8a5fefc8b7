#pragma once

#include <span>
#include <vector>

#include "regimes/score.hpp"
#include "regimes/term_dataset.hpp"

namespace regimes {

enum class SelectorKind { chs, sparse_pca };

// Objective evaluated by the combinatorial selector: the weighted mean of
// per-sample scores (the quantity the global score aggregates), or the score
// of the weighted-mean absolute term vector.
enum class ChsRepresentative { mean_score, mean_abs_vector };

struct SelectorConfig {
  SelectorKind kind = SelectorKind::chs;
  ChsRepresentative representative = ChsRepresentative::mean_score;
  double alpha = 1.0;      // sparse-pca soft-threshold level, > 0
  int n_components = 1;    // sparse-pca leading directions
  bool spca_normalize = false;  // also scale columns to unit variance
  int chs_ceiling = 16;    // refuse exhaustive search above this many terms
  int spca_max_iter = 500;
  double spca_tol = 1e-6;
};

// One dominance hypothesis per cluster, with the weighted mean local score
// of the member observations under that hypothesis.
struct ClusterHypothesis {
  int cluster_id = 0;
  Hypothesis hypothesis;
  double cluster_score = 0.0;
  bool converged = true;  // sparse-pca convergence warning flag
};

// Exhaustive combinatorial hypothesis selection: evaluates every mask of
// cardinality >= 2 (the all-true mask included) and returns the best scorer.
// Ties break toward larger cardinality, then the lexicographically smallest
// mask. Cost scales with 2^D; D above config.chs_ceiling is refused.
ClusterHypothesis chs_select(const TermDataset& ds, std::span<const Eigen::Index> members,
                             const SelectorConfig& config = {},
                             DegeneratePolicy policy = DegeneratePolicy::penalize,
                             int cluster_id = 0);

// Sparse-principal-component selection: fits the leading n_components sparse
// directions of the cluster's (column-centered) term submatrix by rank-one
// alternating least squares with soft-thresholding at level alpha; a term is
// active when any component loading is non-zero. Fewer than 2 survivors
// activate the 2 largest-variance terms instead. Clusters smaller than D+1
// members fall back to chs_select (or top-variance selection when D exceeds
// the combinatorial ceiling).
ClusterHypothesis sparse_pca_select(const TermDataset& ds,
                                    std::span<const Eigen::Index> members,
                                    const SelectorConfig& config = {},
                                    DegeneratePolicy policy = DegeneratePolicy::penalize,
                                    int cluster_id = 0);

// Expands per-cluster hypotheses to one mask per observation. Noise labels
// (negative) get the all-true mask; a non-negative label without a matching
// hypothesis is an error.
HypothesisArray broadcast(const std::vector<ClusterHypothesis>& cluster_hypotheses,
                          std::span<const int> labels, Eigen::Index d);

}  // namespace regimes
