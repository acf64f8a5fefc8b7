#include "regimes/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "regimes/errors.hpp"
#include "score_impl.hpp"

namespace regimes {

namespace {

// Members' rows gathered once into contiguous row-major storage; the
// combinatorial search touches every (mask, member) pair and must not go
// through strided matrix indexing.
struct ClusterView {
  std::vector<double> rows;        // m x d, row-major
  std::vector<double> weights;     // m
  std::vector<std::uint8_t> degenerate;  // m
  int d = 0;
  std::size_t m = 0;
};

ClusterView gather_cluster(const TermDataset& ds, std::span<const Eigen::Index> members) {
  ClusterView view;
  view.d = static_cast<int>(ds.n_terms());
  view.m = members.size();
  view.rows.resize(view.m * static_cast<std::size_t>(view.d));
  view.weights.resize(view.m);
  view.degenerate.resize(view.m);
  for (std::size_t r = 0; r < view.m; ++r) {
    const Eigen::Index idx = members[r];
    for (int j = 0; j < view.d; ++j) {
      view.rows[r * static_cast<std::size_t>(view.d) + static_cast<std::size_t>(j)] =
          ds.terms(idx, j);
    }
    view.weights[r] = ds.weights(idx);
    view.degenerate[r] = ds.degenerate_mask[static_cast<std::size_t>(idx)];
  }
  return view;
}

// Weighted mean local score of the member observations under a bit mask.
double mean_member_score(const ClusterView& view, std::uint32_t bits, DegeneratePolicy policy) {
  double wsum = 0.0, acc = 0.0;
  for (std::size_t r = 0; r < view.m; ++r) {
    const bool degenerate = view.degenerate[r] != 0;
    if (degenerate && policy == DegeneratePolicy::exclude) continue;
    const double w = view.weights[r];
    wsum += w;
    if (degenerate) continue;  // scores 0 under any mask
    const double* e = view.rows.data() + r * static_cast<std::size_t>(view.d);
    acc += w * detail::local_score_impl(e, view.d, [bits](int i) { return (bits >> i) & 1u; }).m;
  }
  if (!(wsum > 0.0)) return 0.0;
  return acc / wsum;
}

double representative_vector_score(const Eigen::VectorXd& v, std::uint32_t bits) {
  return detail::local_score_impl(v.data(), static_cast<int>(v.size()),
                                  [bits](int i) { return (bits >> i) & 1u; })
      .m;
}

Hypothesis mask_from_bits(std::uint32_t bits, int d) {
  Hypothesis h;
  h.mask.resize(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) h.mask[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
  return h;
}

std::uint32_t bits_from_mask(const Hypothesis& h) {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < h.mask.size(); ++i) {
    if (h.mask[i]) bits |= (1u << i);
  }
  return bits;
}

// Tie-break: larger cardinality first, then lexicographically smallest mask
// (term order, false < true).
bool mask_preferred(std::uint32_t challenger, std::uint32_t incumbent, int d) {
  const int card_c = __builtin_popcount(challenger);
  const int card_i = __builtin_popcount(incumbent);
  if (card_c != card_i) return card_c > card_i;
  for (int i = 0; i < d; ++i) {
    const unsigned a = (challenger >> i) & 1u;
    const unsigned b = (incumbent >> i) & 1u;
    if (a != b) return a < b;
  }
  return false;
}

Eigen::VectorXd cluster_column_variances(const TermDataset& ds,
                                         std::span<const Eigen::Index> members) {
  const Eigen::Index d = ds.n_terms();
  const double m = static_cast<double>(members.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const Eigen::Index idx : members) mean += ds.terms.row(idx).transpose();
  mean /= m;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const Eigen::Index idx : members) {
    var += (ds.terms.row(idx).transpose() - mean).array().square().matrix();
  }
  return var / m;
}

// Activates the two largest-variance terms (ties by smaller index).
Hypothesis top_variance_mask(const Eigen::VectorXd& variances) {
  const Eigen::Index d = variances.size();
  Eigen::Index first = 0, second = 1;
  if (variances(second) > variances(first)) std::swap(first, second);
  for (Eigen::Index j = 2; j < d; ++j) {
    if (variances(j) > variances(first)) {
      second = first;
      first = j;
    } else if (variances(j) > variances(second)) {
      second = j;
    }
  }
  Hypothesis h;
  h.mask.assign(static_cast<std::size_t>(d), 0);
  h.mask[static_cast<std::size_t>(first)] = 1;
  h.mask[static_cast<std::size_t>(second)] = 1;
  return h;
}

}  // namespace

ClusterHypothesis chs_select(const TermDataset& ds, std::span<const Eigen::Index> members,
                             const SelectorConfig& config, DegeneratePolicy policy,
                             int cluster_id) {
  const int d = static_cast<int>(ds.n_terms());
  if (members.empty()) throw validation_error("chs_select needs a non-empty cluster");
  if (d > config.chs_ceiling) {
    throw config_error("combinatorial selection over " + std::to_string(d) +
                       " terms exceeds the ceiling of " + std::to_string(config.chs_ceiling) +
                       " (use the sparse-pca selector for wide term sets)");
  }

  const ClusterView view = gather_cluster(ds, members);

  Eigen::VectorXd rep;  // weighted mean |e| vector, mean_abs_vector mode only
  if (config.representative == ChsRepresentative::mean_abs_vector) {
    rep = Eigen::VectorXd::Zero(d);
    double wsum = 0.0;
    for (const Eigen::Index idx : members) {
      const double w = ds.weights(idx);
      wsum += w;
      rep += w * ds.terms.row(idx).cwiseAbs().transpose();
    }
    if (wsum > 0.0) rep /= wsum;
  }

  const std::uint32_t n_masks = 1u << d;
  bool have_best = false;
  std::uint32_t best_bits = 0;
  double best_score = 0.0;
  for (std::uint32_t bits = 0; bits < n_masks; ++bits) {
    if (__builtin_popcount(bits) < 2) continue;
    const double score = (config.representative == ChsRepresentative::mean_abs_vector)
                             ? representative_vector_score(rep, bits)
                             : mean_member_score(view, bits, policy);
    if (!have_best || score > best_score ||
        (score == best_score && mask_preferred(bits, best_bits, d))) {
      have_best = true;
      best_bits = bits;
      best_score = score;
    }
  }

  ClusterHypothesis out;
  out.cluster_id = cluster_id;
  out.hypothesis = mask_from_bits(best_bits, d);
  out.cluster_score = mean_member_score(view, best_bits, policy);
  return out;
}

ClusterHypothesis sparse_pca_select(const TermDataset& ds,
                                    std::span<const Eigen::Index> members,
                                    const SelectorConfig& config, DegeneratePolicy policy,
                                    int cluster_id) {
  const Eigen::Index d = ds.n_terms();
  if (members.empty()) throw validation_error("sparse_pca_select needs a non-empty cluster");
  if (!(config.alpha > 0.0)) throw config_error("sparse-pca alpha must be positive");

  const Eigen::Index m = static_cast<Eigen::Index>(members.size());
  if (m < d + 1) {
    // Too few samples to estimate a sparse direction.
    if (d <= config.chs_ceiling) return chs_select(ds, members, config, policy, cluster_id);
    const Eigen::VectorXd var = cluster_column_variances(ds, members);
    ClusterHypothesis out;
    out.cluster_id = cluster_id;
    out.hypothesis = top_variance_mask(var);
    out.cluster_score =
        mean_member_score(gather_cluster(ds, members), bits_from_mask(out.hypothesis), policy);
    return out;
  }

  // Column-centered cluster submatrix, optionally scaled to unit variance.
  Eigen::MatrixXd x(m, d);
  for (Eigen::Index r = 0; r < m; ++r) {
    x.row(r) = ds.terms.row(members[static_cast<std::size_t>(r)]);
  }
  const Eigen::VectorXd mean = x.colwise().mean();
  x.rowwise() -= mean.transpose();
  const Eigen::VectorXd variances =
      (x.array().square().colwise().sum() / static_cast<double>(m)).matrix();
  if (config.spca_normalize) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double sd = std::sqrt(variances(j));
      if (sd > 0.0) x.col(j) /= sd;
    }
  }

  std::vector<std::uint8_t> active(static_cast<std::size_t>(d), 0);
  bool all_converged = true;
  Eigen::MatrixXd work = x;
  for (int comp = 0; comp < std::max(1, config.n_components); ++comp) {
    // Power-iteration style start from the largest-norm column.
    Eigen::Index j0 = 0;
    double best_norm = -1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double nrm = work.col(j).norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        j0 = j;
      }
    }
    if (!(best_norm > 0.0)) break;  // nothing left to explain
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(j0) = 1.0;

    Eigen::VectorXd u;
    bool converged = false;
    bool dead = false;
    for (int iter = 0; iter < config.spca_max_iter; ++iter) {
      const Eigen::VectorXd xv = work * v;
      const double xv_norm = xv.norm();
      if (!(xv_norm > 0.0)) {
        dead = true;
        break;
      }
      u = xv / xv_norm;
      const Eigen::VectorXd w = work.transpose() * u;
      Eigen::VectorXd v_new(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        const double a = std::abs(w(j)) - config.alpha;
        v_new(j) = a > 0.0 ? (w(j) > 0.0 ? a : -a) : 0.0;
      }
      const double nn = v_new.norm();
      if (!(nn > 0.0)) {
        dead = true;  // the penalty removed every loading
        break;
      }
      const double delta = (v_new / nn - v / v.norm()).norm();
      v = v_new;
      if (delta < config.spca_tol) {
        converged = true;
        break;
      }
    }
    if (dead) break;
    if (!converged) all_converged = false;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (v(j) != 0.0) active[static_cast<std::size_t>(j)] = 1;
    }
    if (!u.size()) break;
    // Projection deflation before the next component.
    work -= u * (u.transpose() * work);
  }

  int n_active = 0;
  for (const auto b : active) n_active += b;
  Hypothesis hyp;
  if (n_active < 2) {
    hyp = top_variance_mask(variances);
  } else {
    hyp.mask = active;
  }

  ClusterHypothesis out;
  out.cluster_id = cluster_id;
  out.hypothesis = std::move(hyp);
  out.cluster_score =
      mean_member_score(gather_cluster(ds, members), bits_from_mask(out.hypothesis), policy);
  out.converged = all_converged;
  return out;
}

HypothesisArray broadcast(const std::vector<ClusterHypothesis>& cluster_hypotheses,
                          std::span<const int> labels, Eigen::Index d) {
  std::map<int, const Hypothesis*> by_id;
  for (const auto& ch : cluster_hypotheses) by_id[ch.cluster_id] = &ch.hypothesis;

  HypothesisArray out;
  out.reserve(labels.size());
  const Hypothesis full = Hypothesis::all_true(d);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0) {
      out.push_back(full);
      continue;
    }
    const auto it = by_id.find(label);
    if (it == by_id.end()) {
      throw validation_error("observation " + std::to_string(i) + " has label " +
                             std::to_string(label) + " with no matching cluster hypothesis");
    }
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace regimes
