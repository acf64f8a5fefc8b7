#include "regimes/generators.hpp"

#include <cmath>
#include <string>

#include "regimes/errors.hpp"
#include "regimes/score.hpp"

namespace regimes {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TermDataset gen_synthetic(const SyntheticConfig& config, std::uint64_t /*seed*/) {
  if (config.d < 4 || config.d % 2 != 0) {
    throw config_error("synthetic data needs an even term count of at least 4");
  }
  if (config.nx < 2 || config.ny < 2) throw config_error("synthetic grid must be at least 2x2");
  if (!(config.lambda > 0.0) || !(config.beta > 0.0) || !(config.eta0 > 0.0)) {
    throw config_error("synthetic coefficients must be positive");
  }

  const int d = config.d;
  const Eigen::Index n = static_cast<Eigen::Index>(config.nx) * config.ny;
  Eigen::MatrixXd terms(n, d);
  Eigen::MatrixXd coords(n, 2);
  const double hx = 1.0 / config.nx;
  const double hy = 1.0 / config.ny;
  const bool exact = synthetic_closure_exact(config);

  Eigen::Index row = 0;
  for (int j = 0; j < config.ny; ++j) {
    const double y = (j + 0.5) * hy;
    const double eta = config.eta0 * std::sin(config.omega_coef * y);
    // H(phi) with H(0) = 1 on the first-half branch; the second half takes
    // the complement so a row at exactly y = 0.5 belongs to one regime only.
    const double h_upper = (y >= 0.5) ? 1.0 : 0.0;
    const double h_lower = 1.0 - h_upper;
    const double first_half = eta * (config.lambda * h_upper + config.beta);
    const double second_half = eta * (config.lambda * h_lower + config.beta);
    for (int i = 0; i < config.nx; ++i) {
      const double x = (i + 0.5) * hx;
      coords(row, 0) = x;
      coords(row, 1) = y;
      for (int t = 0; t < d; ++t) {
        const double base = (t < d / 2) ? first_half : second_half;
        terms(row, t) = (t % 2 == 0) ? base : -base;
      }
      ++row;
    }
  }

  if (exact) {
    for (Eigen::Index r = 0; r < n; ++r) {
      double sum = 0.0;
      for (int t = 0; t < d; ++t) sum += terms(r, t);
      if (sum != 0.0) {
        throw numerical_error("synthetic closure violated at row " + std::to_string(r));
      }
    }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, hx * hy);
  TermDataset ds = make_dataset(std::move(terms), std::move(weights), std::move(coords));
  for (const auto flag : ds.degenerate_mask) {
    if (flag) throw numerical_error("synthetic grid produced a degenerate (all-zero) row");
  }
  return ds;
}

MunkResult gen_munk(const MunkConfig& config) {
  if (!(config.epsilon > 0.0) || config.epsilon >= 1.0) {
    throw config_error("epsilon must lie in (0, 1)");
  }
  if (config.nx < 2 || config.ny < 2) throw config_error("munk grid must be at least 2x2");
  if (!(config.y_slice > 0.0) || !(config.y_slice < 1.0)) {
    throw config_error("y_slice must lie in (0, 1)");
  }

  const double eps = config.epsilon;
  const Eigen::Index n = static_cast<Eigen::Index>(config.nx) * config.ny;
  Eigen::MatrixXd terms(n, 3);
  Eigen::MatrixXd coords(n, 2);
  const double hx = 1.0 / config.nx;
  const double hy = 1.0 / config.ny;

  // psi = (1 - x - exp(-x/eps)) * pi * sin(pi y); all derivatives analytic:
  //   d(psi)/dx  = (-1 + exp(-x/eps)/eps) * pi * sin(pi y)
  //   lap(psi)   = -exp(-x/eps)/eps^2 * pi * sin(pi y) - pi^2 * psi
  //   curl(tau)  = -pi * sin(pi y)          (tau = -cos(pi y) i)
  Eigen::Index row = 0;
  int slice_j = 0;
  double slice_dist = std::numeric_limits<double>::infinity();
  for (int j = 0; j < config.ny; ++j) {
    const double y = (j + 0.5) * hy;
    if (std::abs(y - config.y_slice) < slice_dist) {
      slice_dist = std::abs(y - config.y_slice);
      slice_j = j;
    }
    const double s = kPi * std::sin(kPi * y);
    for (int i = 0; i < config.nx; ++i) {
      const double x = (i + 0.5) * hx;
      const double decay = std::exp(-x / eps);
      const double psi = (1.0 - x - decay) * s;
      const double advection = (-1.0 + decay / eps) * s;
      const double diffusion = eps * (-(decay / (eps * eps)) * s - kPi * kPi * psi);
      const double wind = s;  // -curl(tau) = +pi sin(pi y)
      coords(row, 0) = x;
      coords(row, 1) = y;
      terms(row, 0) = advection;
      terms(row, 1) = diffusion;
      terms(row, 2) = wind;
      ++row;
    }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, hx * hy);
  TermDataset ds = make_dataset(std::move(terms), std::move(weights), std::move(coords),
                                {"dpsi_dx", "eps_lap_psi", "neg_wind_curl"});

  // Balance masks by name (term order [advection, diffusion, wind curl]).
  const Hypothesis western_boundary{{1, 1, 0}};
  const Hypothesis sverdrup{{1, 0, 1}};

  MunkCurves curves;
  curves.x.reserve(config.nx);
  for (int i = 0; i < config.nx; ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(slice_j) * config.nx + i;
    const double e[3] = {ds.terms(r, 0), ds.terms(r, 1), ds.terms(r, 2)};
    curves.x.push_back(ds.coords(r, 0));
    curves.western_boundary.push_back(local_score(e, western_boundary).m);
    curves.sverdrup.push_back(local_score(e, sverdrup).m);
    curves.residual.push_back(e[0] + e[1] + e[2]);
  }

  return MunkResult{std::move(ds), std::move(curves)};
}

}  // namespace regimes
