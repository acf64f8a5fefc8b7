#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace regimes {

enum class ClustererKind { kmeans, gmm };
enum class CovarianceKind { diagonal, full };

struct ClustererConfig {
  ClustererKind kind = ClustererKind::kmeans;
  int k = 2;
  std::uint64_t seed = 0;
  int n_init = 10;    // restarts; best kept by objective
  int max_iter = 300;
  double tol = 1e-6;
  CovarianceKind covariance = CovarianceKind::full;  // gmm only
};

struct ClusterAssignment {
  std::vector<int> labels;            // in [0, k)
  double objective = 0.0;             // inertia (kmeans) or log-likelihood (gmm)
  bool converged = false;
  int iterations = 0;
  int k = 0;                          // final cluster count (reduced only with a warning)
  std::vector<double> objective_trace;  // per-iteration objective of the winning restart
  std::vector<std::string> warnings;
};

// Lloyd iterations from k-means++ seeds, best of n_init restarts by inertia.
// Deterministic for a fixed seed. Empty clusters are re-seeded at the point
// farthest from its assigned center; when re-seeding cannot help (fewer
// distinct points than k) k is reduced with a warning.
ClusterAssignment kmeans_fit(const Eigen::MatrixXd& z, const ClustererConfig& config);

// Gaussian-mixture EM with k-means++ initialized means, covariance
// regularization of 1e-6 on the diagonal, and hard labels by maximum
// posterior responsibility. Deterministic for a fixed seed. Restarts that
// hit a singular covariance are discarded; all restarts failing is an error.
ClusterAssignment gmm_fit(const Eigen::MatrixXd& z, const ClustererConfig& config);

}  // namespace regimes
