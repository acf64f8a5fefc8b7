#include "regimes/score.hpp"

#include <algorithm>
#include <cmath>

#include "regimes/errors.hpp"
#include "score_impl.hpp"

namespace regimes {

void Hypothesis::validate() const {
  if (mask.size() < 2) {
    throw validation_error("hypothesis mask must cover at least 2 terms");
  }
  if (!is_legal()) {
    throw validation_error("hypothesis must select at least 2 terms (a one-term "
                           "balance is ambiguous); got cardinality " +
                           std::to_string(cardinality()));
  }
}

NormalizedSplit normalize_split(std::span<const double> e, const Hypothesis& h) {
  if (e.size() < 2) throw validation_error("observation must have at least 2 terms");
  if (h.mask.size() != e.size()) {
    throw validation_error("hypothesis mask length does not match term count");
  }
  h.validate();

  double min_abs_nonzero = std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  for (const double v : e) {
    const double a = std::abs(v);
    if (a > 0.0) {
      any_nonzero = true;
      min_abs_nonzero = std::min(min_abs_nonzero, a);
    }
  }

  NormalizedSplit split;
  if (!any_nonzero) {
    split.degenerate = true;
    return split;
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double v = std::abs(e[i]) / min_abs_nonzero;
    if (h.mask[i]) {
      split.selected.push_back(v);
    } else {
      split.remainder.push_back(v);
    }
  }
  return split;
}

double magnitude_gap(std::span<const double> selected, std::span<const double> remainder) {
  if (selected.empty()) throw validation_error("selected subset must be non-empty");
  if (remainder.empty()) return 1.0;

  const double min_s = *std::min_element(selected.begin(), selected.end());
  const double max_r = *std::max_element(remainder.begin(), remainder.end());
  if (max_r == 0.0) return 1.0;  // exact truncation
  if (min_s <= max_r) return 0.0;
  const double den = std::log10(min_s + max_r);
  if (!(den > 0.0)) throw numerical_error("magnitude gap denominator not positive");
  const double gap = std::log10(min_s - max_r) / den;
  return gap < 0.0 ? 0.0 : gap;
}

double spread_penalty(std::span<const double> selected) {
  if (selected.empty()) throw validation_error("selected subset must be non-empty");
  double lo = selected[0], hi = selected[0];
  for (const double v : selected) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo <= 0.0) {
    throw validation_error("invalid selection: a zero-valued term cannot be dominant");
  }
  return std::log10(hi) - std::log10(lo);
}

LocalScoreBreakdown local_score(std::span<const double> e, const Hypothesis& h) {
  if (e.size() < 2) throw validation_error("observation must have at least 2 terms");
  if (h.mask.size() != e.size()) {
    throw validation_error("hypothesis mask length does not match term count");
  }
  h.validate();
  const std::uint8_t* mask = h.mask.data();
  return detail::local_score_impl(e.data(), static_cast<int>(e.size()),
                                  [mask](int i) { return mask[i] != 0; });
}

ScoreReport global_score(const TermDataset& ds, const HypothesisArray& hypotheses,
                         DegeneratePolicy policy) {
  const Eigen::Index n = ds.n_samples();
  const Eigen::Index d = ds.n_terms();
  if (static_cast<Eigen::Index>(hypotheses.size()) != n) {
    throw validation_error("need one hypothesis per observation (got " +
                           std::to_string(hypotheses.size()) + " for " +
                           std::to_string(n) + " observations)");
  }

  ScoreReport report;
  report.local.resize(static_cast<std::size_t>(n));

  const Hypothesis full = Hypothesis::all_true(d);
  double wsum = 0.0, acc = 0.0, acc_full = 0.0;
  std::vector<double> row(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = ds.terms(i, j);
    const bool degenerate = ds.degenerate_mask[static_cast<std::size_t>(i)] != 0;
    if (degenerate && policy == DegeneratePolicy::exclude) {
      report.local[static_cast<std::size_t>(i)] = LocalScoreBreakdown{};
      continue;
    }
    const LocalScoreBreakdown b = local_score(row, hypotheses[static_cast<std::size_t>(i)]);
    const LocalScoreBreakdown bf = degenerate ? LocalScoreBreakdown{} : local_score(row, full);
    report.local[static_cast<std::size_t>(i)] = b;
    const double w = ds.weights(i);
    wsum += w;
    acc += w * b.m;
    acc_full += w * bf.m;
  }
  if (!(wsum > 0.0)) throw validation_error("weight sum is not positive");
  report.global_score = acc / wsum;
  report.full_set_score = acc_full / wsum;
  return report;
}

}  // namespace regimes
