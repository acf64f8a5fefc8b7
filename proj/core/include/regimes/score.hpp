#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "regimes/term_dataset.hpp"

namespace regimes {

// Binary dominance mask over the D equation terms: true marks a term as
// selected (dominant), false as negligible. A legal mask selects at least
// two terms; a single-term balance is conceptually ambiguous and rejected.
struct Hypothesis {
  std::vector<std::uint8_t> mask;

  static Hypothesis all_true(Eigen::Index d) {
    return Hypothesis{std::vector<std::uint8_t>(static_cast<std::size_t>(d), 1)};
  }
  int cardinality() const {
    int c = 0;
    for (const auto b : mask) c += b ? 1 : 0;
    return c;
  }
  bool is_all_true() const { return cardinality() == static_cast<int>(mask.size()); }
  bool is_legal() const { return cardinality() >= 2; }
  void validate() const;  // throws validation_error when illegal

  bool operator==(const Hypothesis& other) const { return mask == other.mask; }
};

using HypothesisArray = std::vector<Hypothesis>;

// Selected/remainder magnitude arrays, normalized by the smallest |e_i| over
// the full term set, or by the smallest non-zero |e_i| when that minimum is
// zero. A fully zero observation carries no balance information and is
// flagged degenerate instead of raising.
struct NormalizedSplit {
  std::vector<double> selected;
  std::vector<double> remainder;
  bool degenerate = false;
};

NormalizedSplit normalize_split(std::span<const double> e, const Hypothesis& h);

// Relative magnitude gap between the normalized subsets, in [0, 1]:
//
//   gap = log10(min(s) - max(r)) / log10(min(s) + max(r))   if min(s) > max(r)
//   gap = 0                                                 otherwise
//
// floored at 0. An empty remainder, or a remainder made entirely of exact
// zeros, is an exact truncation and scores 1.
double magnitude_gap(std::span<const double> selected, std::span<const double> remainder);

// Decades of magnitude spread within the selected subset:
// log10(max(s)) - log10(min(s)). A zero selected magnitude cannot be
// dominant; it raises validation_error (callers score such hypotheses 0).
double spread_penalty(std::span<const double> selected);

struct LocalScoreBreakdown {
  double gamma = 0.0;  // post-floor magnitude gap
  double omega = 0.0;  // within-selected spread
  double m = 0.0;      // gamma / (1 + omega)
  double normalized_min_selected = std::numeric_limits<double>::quiet_NaN();
  double normalized_max_remainder = std::numeric_limits<double>::quiet_NaN();
};

// Local magnitude score for one observation: composes normalize_split,
// magnitude_gap and spread_penalty; m = gap / (1 + spread). Degenerate
// observations and hypotheses selecting a zero-valued term score 0 in-band.
// The score is invariant to scaling the observation by any non-zero constant
// and to sign flips of its elements.
LocalScoreBreakdown local_score(std::span<const double> e, const Hypothesis& h);

// How degenerate (all-zero) observations enter the weighted global score:
// penalize keeps their weights (scoring 0), exclude drops their weights.
enum class DegeneratePolicy { penalize, exclude };

struct ScoreReport {
  std::vector<LocalScoreBreakdown> local;
  double global_score = 0.0;
  double full_set_score = 0.0;  // score of the all-ones hypothesis array
};

// Domain-weighted mean of the local scores: sum(w_n * m_n) / sum(w_n),
// accumulated in a fixed sequential order so results are bit-stable.
ScoreReport global_score(const TermDataset& ds, const HypothesisArray& hypotheses,
                         DegeneratePolicy policy = DegeneratePolicy::penalize);

}  // namespace regimes
