#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "regimes/term_dataset.hpp"

namespace regimes {

// Continuous tumor-induced angiogenesis model on the unit square:
//
//   dn/dt = div( D_a grad n - chi(c) n grad c - rho_a n grad f )
//   df/dt = beta_f n - gamma_f n f
//   dc/dt = -eta_c c n
//   chi(c) = chi0 / (1 + alpha_a c)
//
// n is the endothelial-cell density, c the angiogenic-factor concentration,
// f the fibronectin concentration (all non-dimensional). No-flux boundary
// conditions on all four walls; the n equation is discretized in flux form
// so the cell sum of n is conserved to round-off.
struct AngioParams {
  double d_a = 0.00035;
  double alpha_a = 0.6;
  double chi0 = 0.38;
  double rho_a = 0.34;
  double beta_f = 0.05;
  double gamma_f = 0.1;
  double eta_c = 0.1;

  // Initial conditions: circular tumor at (x0, y0).
  double r0 = 0.1;
  double x0 = 1.0;
  double y0 = 0.5;
  double k_f = 0.75;
  double eps1 = 0.45;
  double eps2 = 0.001;

  // Adaptive step-doubling controller.
  double error_tol = 1e-6;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double safety = 0.9;

  // Red-noise construction: white Gaussian field smoothed by a first-order
  // autoregressive filter along each axis, rescaled to the target amplitude.
  double noise_ar = 0.9;
};

double angio_nu(const AngioParams& p);  // (sqrt(5) - 0.1) / (sqrt(5) - 1)

// Pointwise initial conditions (noise-free).
double angio_initial_c(double x, double y, const AngioParams& p = {});
double angio_initial_f(double x, double y, const AngioParams& p = {});
double angio_initial_n(double x, double y, const AngioParams& p = {});

// Cell-centered fields on a resolution x resolution grid, spacing
// h = 1/resolution; entry (i, j) sits at ((i+0.5) h, (j+0.5) h).
struct AngioState {
  int resolution = 0;
  double h = 0.0;
  double t = 0.0;
  Eigen::ArrayXXd n, c, f;
};

AngioState make_angio_initial_state(int resolution, double noise_amp, std::uint64_t seed,
                                    const AngioParams& params = {});

// One classical RK4 step of size dt for the pointwise (f, c) equations with
// n held fixed. Shares the stage structure of the full solver; used for
// closed-form verification of the reaction terms.
void fibronectin_factor_step(AngioState& state, double dt, const AngioParams& params = {});

struct AngioRun {
  AngioState final_state;
  std::vector<AngioState> snapshots;  // at the requested times, in order
  long long accepted_steps = 0;
  long long rejected_steps = 0;
  long long clamped_cells = 0;        // negative values clamped to zero
  double mass_initial = 0.0;          // sum(n) h^2 at t = 0
  double mass_final = 0.0;            // sum(n) h^2 at t_end
};

// Integrates the coupled system to t_end with adaptive step-doubling RK4
// (local error tolerance params.error_tol). noise_amp scales red noise added
// to the initial c and f fields (seed-deterministic; zero disables it and
// makes the run independent of the seed). Enforces after every accepted
// step: c and f non-negative (clamping, aborting when more than 0.1% of
// cells fall below -1e-9) and c pointwise non-increasing within 1e-9.
AngioRun simulate_angiogenesis(double t_end, double noise_amp, std::uint64_t seed,
                               int resolution, std::vector<double> snapshot_times = {},
                               const AngioParams& params = {});

// Expanded endothelial-cell equation terms at the state's time, D = 7
// columns: dn/dt plus the six expanded transport terms (random motility,
// chemotaxis x3, haptotaxis x2), second-order central differences with
// reflected ghost cells. The dn/dt column is assembled from the other six so
// every emitted row sums to zero; uniform cell-area weights.
TermDataset extract_angio_terms(const AngioState& state, const AngioParams& params = {});

// Snapshot fields (n, c, f) as a 3-column dataset for visualization dumps.
TermDataset angio_fields_dataset(const AngioState& state);

}  // namespace regimes
