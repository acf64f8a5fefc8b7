#pragma once

// Shared single-pass local-score kernel. Kept out of the public headers: the
// combinatorial selector calls it once per (mask, observation) pair, so it
// must not allocate.

#include <cmath>
#include <limits>

#include "regimes/errors.hpp"
#include "regimes/score.hpp"

namespace regimes::detail {

// Computes the local magnitude score for terms e[0..d) with membership given
// by is_selected(i). Handles the degenerate (all-zero) observation and the
// zero-selected-term cases in-band by scoring 0.
template <class MaskFn>
inline LocalScoreBreakdown local_score_impl(const double* e, int d, MaskFn is_selected) {
  double min_abs_nonzero = std::numeric_limits<double>::infinity();
  double min_sel = std::numeric_limits<double>::infinity();
  double max_sel = 0.0;
  double max_rem = 0.0;
  bool any_rem = false;
  bool any_nonzero = false;
  bool zero_selected = false;

  for (int i = 0; i < d; ++i) {
    const double a = std::abs(e[i]);
    if (a > 0.0) {
      any_nonzero = true;
      if (a < min_abs_nonzero) min_abs_nonzero = a;
    }
    if (is_selected(i)) {
      if (a < min_sel) min_sel = a;
      if (a > max_sel) max_sel = a;
      if (a == 0.0) zero_selected = true;
    } else {
      any_rem = true;
      if (a > max_rem) max_rem = a;
    }
  }

  LocalScoreBreakdown out;
  if (!any_nonzero) return out;   // degenerate observation, no balance distinguishable
  if (zero_selected) return out;  // a zero term cannot be dominant

  const double mstar = min_abs_nonzero;
  const double ns_min = min_sel / mstar;
  const double ns_max = max_sel / mstar;
  const double nr_max = max_rem / mstar;
  out.normalized_min_selected = ns_min;
  if (any_rem) out.normalized_max_remainder = nr_max;

  double gap;
  if (!any_rem || max_rem == 0.0) {
    gap = 1.0;  // exact truncation: nothing (non-zero) is neglected
  } else if (ns_min <= nr_max) {
    gap = 0.0;
  } else {
    const double den = std::log10(ns_min + nr_max);
    // Normalization puts the smallest non-zero magnitude at 1, so a non-zero
    // remainder forces min(s) + max(r) > 2 on this branch.
    if (!(den > 0.0)) {
      throw numerical_error("magnitude gap denominator not positive");
    }
    gap = std::log10(ns_min - nr_max) / den;
    if (gap < 0.0) gap = 0.0;
  }

  const double spread = std::log10(ns_max) - std::log10(ns_min);
  out.gamma = gap;
  out.omega = spread;
  out.m = gap / (1.0 + spread);
  return out;
}

}  // namespace regimes::detail
