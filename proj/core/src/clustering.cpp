#include "regimes/clustering.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "regimes/errors.hpp"
#include "regimes/rng.hpp"

namespace regimes {

namespace {

constexpr double kCovarianceReg = 1e-6;

// k-means++ seeding: first center uniform, subsequent centers sampled with
// probability proportional to the squared distance to the nearest chosen
// center.
Eigen::MatrixXd kmeanspp_seeds(const Eigen::MatrixXd& z, int k, RandomStream& rng) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  Eigen::MatrixXd centers(k, d);
  centers.row(0) = z.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));

  Eigen::VectorXd dist2 = (z.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += dist2(i);
        if (cum >= target) {
          pick = i;
          break;
        }
        pick = i;  // guard against round-off at the tail
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = z.row(pick);
    dist2 = dist2.cwiseMin((z.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

// Nearest center per point, smallest index on ties.
void assign_labels(const Eigen::MatrixXd& z, const Eigen::MatrixXd& centers,
                   std::vector<int>& labels, Eigen::VectorXd& point_dist2) {
  const Eigen::Index n = z.rows();
  const int k = static_cast<int>(centers.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (z.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double dd = (z.row(i) - centers.row(c)).squaredNorm();
      if (dd < best_d) {
        best_d = dd;
        best = c;
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    point_dist2(i) = best_d;
  }
}

struct LloydResult {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
  int k = 0;
  std::vector<double> trace;
  bool k_reduced = false;
};

LloydResult lloyd(const Eigen::MatrixXd& z, int k, int max_iter, double tol,
                  RandomStream& rng) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  Eigen::MatrixXd centers = kmeanspp_seeds(z, k, rng);

  LloydResult res;
  res.labels.assign(static_cast<std::size_t>(n), 0);
  res.k = k;
  Eigen::VectorXd point_dist2(n);
  Eigen::MatrixXd new_centers(k, d);
  Eigen::VectorXd counts(k);
  bool k_reduced = false;

  for (int iter = 0; iter < max_iter; ++iter) {
    assign_labels(z, centers, res.labels, point_dist2);

    // Re-seed empty clusters at the point farthest from its assigned center.
    for (int attempt = 0; attempt < k; ++attempt) {
      counts.setZero();
      for (Eigen::Index i = 0; i < n; ++i) counts(res.labels[static_cast<std::size_t>(i)]) += 1.0;
      int empty = -1;
      for (int c = 0; c < k; ++c) {
        if (counts(c) == 0.0) {
          empty = c;
          break;
        }
      }
      if (empty < 0) break;
      Eigen::Index far = 0;
      point_dist2.maxCoeff(&far);
      if (point_dist2(far) == 0.0) {
        k_reduced = true;  // fewer distinct points than centers
        break;
      }
      centers.row(empty) = z.row(far);
      assign_labels(z, centers, res.labels, point_dist2);
    }

    res.inertia = point_dist2.sum();
    res.trace.push_back(res.inertia);
    res.iterations = iter + 1;

    new_centers.setZero();
    counts.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = res.labels[static_cast<std::size_t>(i)];
      new_centers.row(c) += z.row(i);
      counts(c) += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0.0) new_centers.row(c) /= counts(c);
      else new_centers.row(c) = centers.row(c);
    }
    const double shift = (new_centers - centers).norm();
    centers = new_centers;
    if (shift < tol) {
      res.converged = true;
      break;
    }
  }
  // Final assignment against the converged centers.
  assign_labels(z, centers, res.labels, point_dist2);
  res.inertia = point_dist2.sum();

  if (k_reduced) {
    // Drop empty clusters and relabel compactly.
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int& lab = res.labels[static_cast<std::size_t>(i)];
      if (remap[static_cast<std::size_t>(lab)] < 0) remap[static_cast<std::size_t>(lab)] = next++;
      lab = remap[static_cast<std::size_t>(lab)];
    }
    res.k = next;
    res.k_reduced = true;
  }
  return res;
}

}  // namespace

ClusterAssignment kmeans_fit(const Eigen::MatrixXd& z, const ClustererConfig& config) {
  const Eigen::Index n = z.rows();
  if (config.k < 1) throw config_error("k must be at least 1");
  if (n < config.k) {
    throw validation_error("k-means needs at least k observations (N=" + std::to_string(n) +
                           ", k=" + std::to_string(config.k) + ")");
  }

  LloydResult best;
  for (int init = 0; init < std::max(1, config.n_init); ++init) {
    RandomStream rng(mix_seed(config.seed, 0x6b6d65616e73ull, static_cast<std::uint64_t>(init)));
    LloydResult run = lloyd(z, config.k, config.max_iter, config.tol, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }

  ClusterAssignment out;
  out.labels = std::move(best.labels);
  out.objective = best.inertia;
  out.converged = best.converged;
  out.iterations = best.iterations;
  out.k = best.k;
  out.objective_trace = std::move(best.trace);
  if (best.k_reduced) {
    out.warnings.push_back("k reduced to " + std::to_string(best.k) +
                           ": fewer distinct points than requested clusters");
  }
  return out;
}

namespace {

struct GmmModel {
  Eigen::MatrixXd means;        // k x d
  std::vector<Eigen::MatrixXd> covariances;  // k of d x d (diagonal stored full)
  Eigen::VectorXd mixing;       // k
};

struct GmmResult {
  std::vector<int> labels;
  double loglik = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;
  bool failed = false;
};

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Per-component log density; returns false when the covariance is not SPD.
bool log_gaussian(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& mean,
                  const Eigen::MatrixXd& cov, CovarianceKind kind, Eigen::VectorXd& out) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  if (kind == CovarianceKind::diagonal) {
    double logdet = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = cov(j, j);
      if (!(v > 0.0)) return false;
      logdet += std::log(v);
    }
    out.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double q = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double diff = z(i, j) - mean(j);
        q += diff * diff / cov(j, j);
      }
      out(i) = -0.5 * (static_cast<double>(d) * kLog2Pi + logdet + q);
    }
    return true;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd l = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(l(j, j) > 0.0)) return false;
    logdet += 2.0 * std::log(l(j, j));
  }
  out.resize(n);
  Eigen::VectorXd diff(d), sol(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    diff = (z.row(i) - mean).transpose();
    sol = l.triangularView<Eigen::Lower>().solve(diff);
    out(i) = -0.5 * (static_cast<double>(d) * kLog2Pi + logdet + sol.squaredNorm());
  }
  return true;
}

GmmResult em_fit(const Eigen::MatrixXd& z, int k, CovarianceKind kind, int max_iter,
                 double tol, RandomStream& rng) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  GmmResult res;
  res.failed = true;

  GmmModel model;
  model.means = kmeanspp_seeds(z, k, rng);
  const Eigen::RowVectorXd data_mean = z.colwise().mean();
  Eigen::MatrixXd data_cov = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd diff = z.row(i) - data_mean;
    data_cov += diff.transpose() * diff;
  }
  data_cov /= static_cast<double>(n);
  data_cov.diagonal().array() += kCovarianceReg;
  if (kind == CovarianceKind::diagonal) {
    data_cov = data_cov.diagonal().asDiagonal();
  }
  model.covariances.assign(static_cast<std::size_t>(k), data_cov);
  model.mixing = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));

  Eigen::MatrixXd log_resp(n, k);
  Eigen::VectorXd comp_density;
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    // E step.
    for (int c = 0; c < k; ++c) {
      if (!log_gaussian(z, model.means.row(c), model.covariances[static_cast<std::size_t>(c)],
                        kind, comp_density)) {
        return res;  // singular covariance, caller restarts
      }
      log_resp.col(c) = comp_density.array() + std::log(model.mixing(c));
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = log_resp.row(i).maxCoeff();
      const double lse = mx + std::log((log_resp.row(i).array() - mx).exp().sum());
      ll += lse;
      log_resp.row(i) = (log_resp.row(i).array() - lse);
    }
    res.trace.push_back(ll);
    res.iterations = iter + 1;
    if (std::abs(ll - prev_ll) / static_cast<double>(n) < tol) {
      res.loglik = ll;
      res.converged = true;
      break;
    }
    prev_ll = ll;
    res.loglik = ll;

    // M step.
    for (int c = 0; c < k; ++c) {
      const Eigen::VectorXd resp = log_resp.col(c).array().exp();
      const double nk = resp.sum();
      if (!(nk > 1e-10)) return res;  // collapsed component, caller restarts
      const Eigen::RowVectorXd mu = (resp.transpose() * z) / nk;
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
      if (kind == CovarianceKind::diagonal) {
        Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Eigen::RowVectorXd diff = z.row(i) - mu;
          var += resp(i) * diff.array().square().matrix().transpose();
        }
        var /= nk;
        var.array() += kCovarianceReg;
        cov = var.asDiagonal();
      } else {
        for (Eigen::Index i = 0; i < n; ++i) {
          const Eigen::RowVectorXd diff = z.row(i) - mu;
          cov += resp(i) * (diff.transpose() * diff);
        }
        cov /= nk;
        cov.diagonal().array() += kCovarianceReg;
      }
      model.means.row(c) = mu;
      model.covariances[static_cast<std::size_t>(c)] = cov;
      model.mixing(c) = nk / static_cast<double>(n);
    }
  }

  // Refresh responsibilities against the final model when the loop ran out
  // of iterations after an M step.
  if (!res.converged) {
    for (int c = 0; c < k; ++c) {
      if (!log_gaussian(z, model.means.row(c), model.covariances[static_cast<std::size_t>(c)],
                        kind, comp_density)) {
        return res;
      }
      log_resp.col(c) = comp_density.array() + std::log(model.mixing(c));
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = log_resp.row(i).maxCoeff();
      const double lse = mx + std::log((log_resp.row(i).array() - mx).exp().sum());
      ll += lse;
      log_resp.row(i) = (log_resp.row(i).array() - lse);
    }
    res.loglik = ll;
  }

  // Hard labels by maximum posterior responsibility (first max on ties).
  res.labels.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_v = log_resp(i, 0);
    for (int c = 1; c < k; ++c) {
      if (log_resp(i, c) > best_v) {
        best_v = log_resp(i, c);
        best = c;
      }
    }
    res.labels[static_cast<std::size_t>(i)] = best;
  }
  res.failed = false;
  return res;
}

}  // namespace

ClusterAssignment gmm_fit(const Eigen::MatrixXd& z, const ClustererConfig& config) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  if (config.k < 1) throw config_error("k must be at least 1");
  if (n < config.k) {
    throw validation_error("gmm needs at least k observations (N=" + std::to_string(n) +
                           ", k=" + std::to_string(config.k) + ")");
  }

  CovarianceKind kind = config.covariance;
  std::vector<std::string> warnings;
  if (kind == CovarianceKind::full &&
      n < static_cast<Eigen::Index>(config.k) * (d + 1)) {
    kind = CovarianceKind::diagonal;
    warnings.push_back("too few samples for full covariances; using diagonal");
  }

  GmmResult best;
  bool have_best = false;
  for (int init = 0; init < std::max(1, config.n_init); ++init) {
    RandomStream rng(mix_seed(config.seed, 0x676d6dull, static_cast<std::uint64_t>(init)));
    GmmResult run = em_fit(z, config.k, kind, config.max_iter, config.tol, rng);
    if (run.failed) continue;
    if (!have_best || run.loglik > best.loglik) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best) {
    throw numerical_error("gmm failed on all " + std::to_string(config.n_init) +
                          " restarts (singular covariance)");
  }

  ClusterAssignment out;
  out.labels = std::move(best.labels);
  out.objective = best.loglik;
  out.converged = best.converged;
  out.iterations = best.iterations;
  out.k = config.k;
  out.objective_trace = std::move(best.trace);
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace regimes
