#pragma once

#include <cstdint>
#include <vector>

#include "regimes/term_dataset.hpp"

namespace regimes {

// Two-regime synthetic field: D equation terms on a cell-centered nx x ny
// grid over (0,1)^2, with
//
//   e_i(x,y) = (-1)^i * eta(y) * (lambda * H(phi_i) + beta),
//   eta(y)   = eta0 * sin(omega * y),
//
// where phi_i = y - 0.5 for the first half of the terms and 0.5 - y for the
// second half (H(0) = 1, so the boundary row belongs to the first regime).
// The first half of the terms dominates for y > 0.5 and vice versa; rows sum
// to zero exactly when d is a multiple of 4.
struct SyntheticConfig {
  int d = 8;       // term count; closure is exact only for d % 4 == 0
  int nx = 128;
  int ny = 128;
  double lambda = 10.0;
  double beta = 0.1;
  double eta0 = 0.1;
  double omega_coef = 10.0 * 3.14159265358979323846;
};

// The seed is reserved for stochastic variants; generation is deterministic.
TermDataset gen_synthetic(const SyntheticConfig& config, std::uint64_t seed = 0);

inline bool synthetic_closure_exact(const SyntheticConfig& config) {
  return config.d % 4 == 0;
}

// Wind-driven circulation in a square basin: the streamfunction of the
// matched-asymptotics solution
//
//   psi(x, y) = (1 - x - exp(-x/epsilon)) * pi * sin(pi * y)
//
// yields the three balance terms [d(psi)/dx, epsilon*lap(psi), -curl(tau)]
// with wind stress tau = -cos(pi*y) i. Derivatives are evaluated
// analytically; the rows close only to O(epsilon) and the residual is
// reported alongside the slice curves.
struct MunkConfig {
  double epsilon = 0.01;
  int nx = 512;
  int ny = 64;
  double y_slice = 0.5;
};

// Local-score curves along x at the grid row nearest y_slice, for the two
// named balances: western boundary current (advection + diffusive torque)
// and Sverdrup (advection + wind stress curl).
struct MunkCurves {
  std::vector<double> x;
  std::vector<double> western_boundary;
  std::vector<double> sverdrup;
  std::vector<double> residual;  // sum of the three terms at the slice
};

struct MunkResult {
  TermDataset dataset;
  MunkCurves curves;
};

MunkResult gen_munk(const MunkConfig& config);

}  // namespace regimes
