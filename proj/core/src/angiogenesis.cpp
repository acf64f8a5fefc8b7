#include "regimes/angiogenesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "regimes/errors.hpp"
#include "regimes/rng.hpp"

namespace regimes {

namespace {

inline double chi_of(double c, const AngioParams& p) { return p.chi0 / (1.0 + p.alpha_a * c); }

// d(chi)/dc, used for the expanded n grad(chi) . grad(c) term.
inline double dchi_dc(double c, const AngioParams& p) {
  const double den = 1.0 + p.alpha_a * c;
  return -p.chi0 * p.alpha_a / (den * den);
}

struct Fields {
  Eigen::ArrayXXd n, c, f;

  void resize(int r) {
    n.resize(r, r);
    c.resize(r, r);
    f.resize(r, r);
  }
  void setZero(int r) {
    n = Eigen::ArrayXXd::Zero(r, r);
    c = Eigen::ArrayXXd::Zero(r, r);
    f = Eigen::ArrayXXd::Zero(r, r);
  }
};

// Monotonized-central limited slope; zero across extrema.
inline double mc_slope(double d_minus, double d_plus) {
  if (d_minus * d_plus <= 0.0) return 0.0;
  const double central = 0.5 * (d_minus + d_plus);
  const double bound = 2.0 * std::min(std::abs(d_minus), std::abs(d_plus));
  const double mag = std::min(std::abs(central), bound);
  return central > 0.0 ? mag : -mag;
}

// Right-hand side of the coupled system. The n equation is evaluated in flux
// form: interior face fluxes only, zero flux on the walls, so the cell sum
// of rhs.n telescopes to exactly zero. Diffusion and the c/f face gradients
// are second-order central; the advected n face value is reconstructed from
// the upwind side with an MC-limited slope (a plain central face average
// rings at the foot of the exponential cell front and drives n negative).
void eval_rhs(const Fields& y, Fields& rhs, double h, const AngioParams& p) {
  const int r = static_cast<int>(y.n.rows());
  rhs.n.setZero();

  const double inv_h = 1.0 / h;
  auto at = [r](int i) { return i < 0 ? 0 : (i >= r ? r - 1 : i); };

  // x faces: between cells (i, j) and (i+1, j).
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i + 1 < r; ++i) {
      const double n_l = y.n(i, j);
      const double n_r = y.n(i + 1, j);
      const double c_face = 0.5 * (y.c(i, j) + y.c(i + 1, j));
      const double dc = (y.c(i + 1, j) - y.c(i, j)) * inv_h;
      const double df = (y.f(i + 1, j) - y.f(i, j)) * inv_h;
      // Cells drift up the c and f gradients.
      const double v = chi_of(c_face, p) * dc + p.rho_a * df;
      double n_adv;
      if (v >= 0.0) {
        n_adv = n_l + 0.5 * mc_slope(n_l - y.n(at(i - 1), j), n_r - n_l);
      } else {
        n_adv = n_r - 0.5 * mc_slope(n_r - n_l, y.n(at(i + 2), j) - n_r);
      }
      const double flux = p.d_a * (n_r - n_l) * inv_h - v * n_adv;
      rhs.n(i, j) += flux * inv_h;
      rhs.n(i + 1, j) -= flux * inv_h;
    }
  }
  // y faces: between cells (i, j) and (i, j+1).
  for (int j = 0; j + 1 < r; ++j) {
    for (int i = 0; i < r; ++i) {
      const double n_l = y.n(i, j);
      const double n_r = y.n(i, j + 1);
      const double c_face = 0.5 * (y.c(i, j) + y.c(i, j + 1));
      const double dc = (y.c(i, j + 1) - y.c(i, j)) * inv_h;
      const double df = (y.f(i, j + 1) - y.f(i, j)) * inv_h;
      const double v = chi_of(c_face, p) * dc + p.rho_a * df;
      double n_adv;
      if (v >= 0.0) {
        n_adv = n_l + 0.5 * mc_slope(n_l - y.n(i, at(j - 1)), n_r - n_l);
      } else {
        n_adv = n_r - 0.5 * mc_slope(n_r - n_l, y.n(i, at(j + 2)) - n_r);
      }
      const double flux = p.d_a * (n_r - n_l) * inv_h - v * n_adv;
      rhs.n(i, j) += flux * inv_h;
      rhs.n(i, j + 1) -= flux * inv_h;
    }
  }

  // Reactions see non-negative n: advection undershoots below zero must not
  // flip the decay of c into growth.
  const Eigen::ArrayXXd n_pos = y.n.max(0.0);
  rhs.f = p.beta_f * n_pos - p.gamma_f * n_pos * y.f;
  rhs.c = -p.eta_c * y.c * n_pos;
}

struct Rk4Workspace {
  Fields k1, k2, k3, k4, stage;

  void resize(int r) {
    k1.resize(r);
    k2.resize(r);
    k3.resize(r);
    k4.resize(r);
    stage.resize(r);
  }
};

void rk4_step(const Fields& y, Fields& out, double dt, double h, const AngioParams& p,
              Rk4Workspace& w) {
  eval_rhs(y, w.k1, h, p);
  w.stage.n = y.n + 0.5 * dt * w.k1.n;
  w.stage.c = y.c + 0.5 * dt * w.k1.c;
  w.stage.f = y.f + 0.5 * dt * w.k1.f;
  eval_rhs(w.stage, w.k2, h, p);
  w.stage.n = y.n + 0.5 * dt * w.k2.n;
  w.stage.c = y.c + 0.5 * dt * w.k2.c;
  w.stage.f = y.f + 0.5 * dt * w.k2.f;
  eval_rhs(w.stage, w.k3, h, p);
  w.stage.n = y.n + dt * w.k3.n;
  w.stage.c = y.c + dt * w.k3.c;
  w.stage.f = y.f + dt * w.k3.f;
  eval_rhs(w.stage, w.k4, h, p);
  const double s = dt / 6.0;
  out.n = y.n + s * (w.k1.n + 2.0 * w.k2.n + 2.0 * w.k3.n + w.k4.n);
  out.c = y.c + s * (w.k1.c + 2.0 * w.k2.c + 2.0 * w.k3.c + w.k4.c);
  out.f = y.f + s * (w.k1.f + 2.0 * w.k2.f + 2.0 * w.k3.f + w.k4.f);
}

// White Gaussian field smoothed by an AR(1) filter along each axis, then
// rescaled so its maximum magnitude equals `amplitude`.
Eigen::ArrayXXd red_noise_field(int r, double amplitude, double ar, RandomStream& rng) {
  Eigen::ArrayXXd g(r, r);
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < r; ++i) g(i, j) = rng.gaussian();
  }
  for (int j = 0; j < r; ++j) {
    for (int i = 1; i < r; ++i) g(i, j) = ar * g(i - 1, j) + g(i, j);
  }
  for (int j = 1; j < r; ++j) {
    for (int i = 0; i < r; ++i) g(i, j) = ar * g(i, j - 1) + g(i, j);
  }
  const double peak = g.abs().maxCoeff();
  if (peak > 0.0) g *= amplitude / peak;
  return g;
}

double cell_sum(const Eigen::ArrayXXd& a, double h) { return a.sum() * h * h; }

}  // namespace

double angio_nu(const AngioParams& /*p*/) {
  const double s5 = std::sqrt(5.0);
  return (s5 - 0.1) / (s5 - 1.0);
}

double angio_initial_c(double x, double y, const AngioParams& p) {
  const double dx = x - p.x0;
  const double dy = y - p.y0;
  const double r = std::sqrt(dx * dx + dy * dy);
  if (r <= p.r0) return 1.0;
  const double nu = angio_nu(p);
  return (nu - r) * (nu - r) / (nu - p.r0);
}

double angio_initial_f(double x, double /*y*/, const AngioParams& p) {
  return p.k_f * std::exp(-x * x / p.eps1);
}

double angio_initial_n(double x, double y, const AngioParams& p) {
  const double s = std::sin(6.0 * 3.14159265358979323846 * y);
  return std::exp(-x * x / p.eps2) * s * s;
}

AngioState make_angio_initial_state(int resolution, double noise_amp, std::uint64_t seed,
                                    const AngioParams& params) {
  if (resolution < 16) throw config_error("angiogenesis resolution must be at least 16");
  AngioState st;
  st.resolution = resolution;
  st.h = 1.0 / resolution;
  st.t = 0.0;
  st.n.resize(resolution, resolution);
  st.c.resize(resolution, resolution);
  st.f.resize(resolution, resolution);
  for (int j = 0; j < resolution; ++j) {
    const double y = (j + 0.5) * st.h;
    for (int i = 0; i < resolution; ++i) {
      const double x = (i + 0.5) * st.h;
      st.n(i, j) = angio_initial_n(x, y, params);
      st.c(i, j) = angio_initial_c(x, y, params);
      st.f(i, j) = angio_initial_f(x, y, params);
    }
  }
  if (noise_amp > 0.0) {
    RandomStream rng(mix_seed(seed, 0x616e67696full));
    st.c += red_noise_field(resolution, noise_amp * st.c.maxCoeff(), params.noise_ar, rng);
    st.f += red_noise_field(resolution, noise_amp * st.f.maxCoeff(), params.noise_ar, rng);
    st.c = st.c.max(0.0);
    st.f = st.f.max(0.0);
  }
  return st;
}

void fibronectin_factor_step(AngioState& state, double dt, const AngioParams& p) {
  // RK4 on df/dt = beta_f n - gamma_f n f, dc/dt = -eta_c c n with n frozen.
  const Eigen::ArrayXXd n = state.n.max(0.0);
  auto rhs_f = [&](const Eigen::ArrayXXd& f) { return (p.beta_f * n - p.gamma_f * n * f).eval(); };
  auto rhs_c = [&](const Eigen::ArrayXXd& c) { return (-p.eta_c * c * n).eval(); };

  const Eigen::ArrayXXd kf1 = rhs_f(state.f);
  const Eigen::ArrayXXd kc1 = rhs_c(state.c);
  const Eigen::ArrayXXd kf2 = rhs_f(state.f + 0.5 * dt * kf1);
  const Eigen::ArrayXXd kc2 = rhs_c(state.c + 0.5 * dt * kc1);
  const Eigen::ArrayXXd kf3 = rhs_f(state.f + 0.5 * dt * kf2);
  const Eigen::ArrayXXd kc3 = rhs_c(state.c + 0.5 * dt * kc2);
  const Eigen::ArrayXXd kf4 = rhs_f(state.f + dt * kf3);
  const Eigen::ArrayXXd kc4 = rhs_c(state.c + dt * kc3);
  state.f += dt / 6.0 * (kf1 + 2.0 * kf2 + 2.0 * kf3 + kf4);
  state.c += dt / 6.0 * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4);
}

AngioRun simulate_angiogenesis(double t_end, double noise_amp, std::uint64_t seed,
                               int resolution, std::vector<double> snapshot_times,
                               const AngioParams& params) {
  if (t_end < 0.0) throw config_error("t_end must be non-negative");
  AngioState st = make_angio_initial_state(resolution, noise_amp, seed, params);
  const int r = resolution;
  const double h = st.h;

  AngioRun run;
  run.mass_initial = cell_sum(st.n, h);

  Fields y;
  y.n = st.n;
  y.c = st.c;
  y.f = st.f;

  std::sort(snapshot_times.begin(), snapshot_times.end());
  std::size_t next_snapshot = 0;
  auto record_snapshots_at = [&](double t) {
    while (next_snapshot < snapshot_times.size() &&
           snapshot_times[next_snapshot] <= t + 1e-12) {
      st.n = y.n;
      st.c = y.c;
      st.f = y.f;
      run.snapshots.push_back(st);
      run.snapshots.back().t = snapshot_times[next_snapshot];
      ++next_snapshot;
    }
  };
  record_snapshots_at(0.0);

  Fields y_big, y_half, y_new;
  y_big.resize(r);
  y_half.resize(r);
  y_new.resize(r);
  Rk4Workspace work;
  work.resize(r);

  const double cell_budget = 0.001 * static_cast<double>(r) * static_cast<double>(r);
  double dt = std::min(params.dt_max, t_end > 0.0 ? t_end : params.dt_max);
  const bool trace = std::getenv("REGIMES_ANGIO_TRACE") != nullptr;

  while (st.t < t_end - 1e-14) {
    // Land exactly on the next snapshot time or t_end.
    double target = t_end;
    if (next_snapshot < snapshot_times.size()) {
      target = std::min(target, snapshot_times[next_snapshot]);
    }
    dt = std::min(dt, target - st.t);
    dt = std::max(dt, params.dt_min);

    rk4_step(y, y_big, dt, h, params, work);
    rk4_step(y, y_half, 0.5 * dt, h, params, work);
    rk4_step(y_half, y_new, 0.5 * dt, h, params, work);

    double err = 0.0;
    err = std::max(err, (y_new.n - y_big.n).abs().maxCoeff());
    err = std::max(err, (y_new.c - y_big.c).abs().maxCoeff());
    err = std::max(err, (y_new.f - y_big.f).abs().maxCoeff());
    err /= 15.0;  // one-step error estimate for the halved-step result

    if (err > params.error_tol) {
      ++run.rejected_steps;
      if (trace && run.rejected_steps % 200 == 0) {
        std::fprintf(stderr, "REJECT t=%.5f dt=%.3e err=%.3e max_n=%.3f min_n=%.3e rej=%lld\n",
                     st.t, dt, err, y.n.maxCoeff(), y.n.minCoeff(), run.rejected_steps);
      }
      if (dt <= params.dt_min * (1.0 + 1e-12)) {
        throw numerical_error("angiogenesis step size underflow at t = " + std::to_string(st.t));
      }
      const double shrink = params.safety * std::pow(params.error_tol / err, 0.25);
      dt = std::max(params.dt_min, dt * std::max(0.1, shrink));
      continue;
    }

    // Accepted: enforce positivity of c and f and the pointwise decay of c.
    // n is left unclamped; the flux form keeps its cell sum conserved to
    // round-off and the reactions already ignore negative n.
    ++run.accepted_steps;
    const double t_new = st.t + dt;
    long long bad = 0;
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (y_new.c(i, j) < 0.0 || y_new.f(i, j) < 0.0) {
          if (y_new.c(i, j) < -1e-9 || y_new.f(i, j) < -1e-9) ++bad;
          ++run.clamped_cells;
          y_new.c(i, j) = std::max(y_new.c(i, j), 0.0);
          y_new.f(i, j) = std::max(y_new.f(i, j), 0.0);
        }
        if (y_new.c(i, j) > y.c(i, j) + 1e-9) {
          throw numerical_error("angiogenic factor increased pointwise at t = " +
                                std::to_string(t_new));
        }
      }
    }
    if (static_cast<double>(bad) > cell_budget) {
      throw numerical_error("more than 0.1% of cells clamped from below -1e-9 at t = " +
                            std::to_string(t_new));
    }

    std::swap(y.n, y_new.n);
    std::swap(y.c, y_new.c);
    std::swap(y.f, y_new.f);
    st.t = t_new;
    record_snapshots_at(st.t);
    if (trace && run.accepted_steps % 100 == 0) {
      std::fprintf(stderr, "t=%.5f dt=%.3e err=%.3e max_n=%.3f min_n=%.3e rej=%lld\n", st.t, dt,
                   err, y.n.maxCoeff(), y.n.minCoeff(), run.rejected_steps);
    }

    if (err > 0.0) {
      const double grow = params.safety * std::pow(params.error_tol / err, 0.2);
      dt = std::min(params.dt_max, dt * std::min(5.0, std::max(0.1, grow)));
    } else {
      dt = std::min(params.dt_max, dt * 5.0);
    }
  }

  st.n = std::move(y.n);
  st.c = std::move(y.c);
  st.f = std::move(y.f);
  run.mass_final = cell_sum(st.n, st.h);
  run.final_state = std::move(st);
  return run;
}

namespace {

// Reflected (even) ghost cells: index -1 maps to 0 and r to r-1, giving zero
// normal gradients at the walls for the expanded-term evaluation.
inline int reflect(int i, int r) { return i < 0 ? 0 : (i >= r ? r - 1 : i); }

}  // namespace

TermDataset extract_angio_terms(const AngioState& st, const AngioParams& p) {
  const int r = st.resolution;
  const double h = st.h;
  const double inv_2h = 1.0 / (2.0 * h);
  const double inv_h2 = 1.0 / (h * h);

  const Eigen::Index n_rows = static_cast<Eigen::Index>(r) * r;
  Eigen::MatrixXd terms(n_rows, 7);
  Eigen::MatrixXd coords(n_rows, 2);

  auto lap = [&](const Eigen::ArrayXXd& a, int i, int j) {
    return (a(reflect(i - 1, r), j) + a(reflect(i + 1, r), j) + a(i, reflect(j - 1, r)) +
            a(i, reflect(j + 1, r)) - 4.0 * a(i, j)) *
           inv_h2;
  };
  auto gx = [&](const Eigen::ArrayXXd& a, int i, int j) {
    return (a(reflect(i + 1, r), j) - a(reflect(i - 1, r), j)) * inv_2h;
  };
  auto gy = [&](const Eigen::ArrayXXd& a, int i, int j) {
    return (a(i, reflect(j + 1, r)) - a(i, reflect(j - 1, r))) * inv_2h;
  };

  Eigen::Index row = 0;
  for (int j = 0; j < r; ++j) {
    const double y = (j + 0.5) * h;
    for (int i = 0; i < r; ++i) {
      const double x = (i + 0.5) * h;
      const double nv = st.n(i, j);
      const double cv = st.c(i, j);
      const double chi = chi_of(cv, p);
      const double cgx = gx(st.c, i, j);
      const double cgy = gy(st.c, i, j);

      // Expanded right-hand side of the n equation.
      const double motility = p.d_a * lap(st.n, i, j);
      const double chemo_lap = -chi * nv * lap(st.c, i, j);
      const double chemo_grad = -chi * (gx(st.n, i, j) * cgx + gy(st.n, i, j) * cgy);
      const double chemo_chi = -nv * dchi_dc(cv, p) * (cgx * cgx + cgy * cgy);
      const double hapto_lap = -p.rho_a * nv * lap(st.f, i, j);
      const double hapto_grad = -p.rho_a * (gx(st.n, i, j) * gx(st.f, i, j) +
                                            gy(st.n, i, j) * gy(st.f, i, j));

      // dn/dt is the assembled right-hand side; the transport terms are
      // stored moved to the left so each row sums to zero.
      const double dn_dt =
          motility + chemo_lap + chemo_grad + chemo_chi + hapto_lap + hapto_grad;
      terms(row, 0) = dn_dt;
      terms(row, 1) = -motility;
      terms(row, 2) = -chemo_lap;
      terms(row, 3) = -chemo_grad;
      terms(row, 4) = -chemo_chi;
      terms(row, 5) = -hapto_lap;
      terms(row, 6) = -hapto_grad;
      coords(row, 0) = x;
      coords(row, 1) = y;
      ++row;
    }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n_rows, h * h);
  return make_dataset(std::move(terms), std::move(weights), std::move(coords),
                      {"dn_dt", "random_motility", "chemotaxis_n_lap_c", "chemotaxis_gradn_gradc",
                       "chemotaxis_n_gradchi_gradc", "haptotaxis_n_lap_f",
                       "haptotaxis_gradn_gradf"});
}

TermDataset angio_fields_dataset(const AngioState& st) {
  const int r = st.resolution;
  const Eigen::Index n_rows = static_cast<Eigen::Index>(r) * r;
  Eigen::MatrixXd terms(n_rows, 3);
  Eigen::MatrixXd coords(n_rows, 2);
  Eigen::Index row = 0;
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < r; ++i) {
      terms(row, 0) = st.n(i, j);
      terms(row, 1) = st.c(i, j);
      terms(row, 2) = st.f(i, j);
      coords(row, 0) = (i + 0.5) * st.h;
      coords(row, 1) = (j + 0.5) * st.h;
      ++row;
    }
  }
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n_rows, st.h * st.h);
  return make_dataset(std::move(terms), std::move(weights), std::move(coords), {"n", "c", "f"});
}

}  // namespace regimes
