#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "magnomech/errors.hpp"
#include "magnomech/response.hpp"
#include "magnomech/steady_state.hpp"

namespace magnomech {

/// The eight sideband amplitudes of the linearized system:
/// (a-, a+*, b-, b+*, m1-, m1+*, m2-, m2+*).
struct SidebandVector {
  std::array<cplx, 8> v{};
  cplx a_minus() const { return v[0]; }
};

namespace detail {

/// Dense complex LU with partial pivoting, fixed size N.
template <std::size_t N>
struct DenseLU {
  std::array<cplx, N * N> a{};
  std::array<std::size_t, N> piv{};
  double pivot_min = 0.0, pivot_max = 0.0;

  cplx& at(std::size_t r, std::size_t c) { return a[r * N + c]; }
  const cplx& at(std::size_t r, std::size_t c) const { return a[r * N + c]; }

  void factor() {
    pivot_min = std::numeric_limits<double>::infinity();
    pivot_max = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      std::size_t p = k;
      double best = std::abs(at(k, k));
      for (std::size_t r = k + 1; r < N; ++r) {
        const double m = std::abs(at(r, k));
        if (m > best) {
          best = m;
          p = r;
        }
      }
      piv[k] = p;
      if (p != k)
        for (std::size_t c = 0; c < N; ++c) std::swap(at(k, c), at(p, c));
      const double mag = std::abs(at(k, k));
      if (mag == 0.0) {
        throw singularity_error("sideband matrix is singular (pivot " + std::to_string(k) +
                                    " = 0; condition estimate inf)",
                                "pivot" + std::to_string(k));
      }
      pivot_min = std::min(pivot_min, mag);
      pivot_max = std::max(pivot_max, mag);
      const cplx inv = 1.0 / at(k, k);
      for (std::size_t r = k + 1; r < N; ++r) {
        const cplx f = at(r, k) * inv;
        at(r, k) = f;
        if (f != cplx(0.0, 0.0))
          for (std::size_t c = k + 1; c < N; ++c) at(r, c) -= f * at(k, c);
      }
    }
  }

  std::array<cplx, N> solve(std::array<cplx, N> b) const {
    for (std::size_t k = 0; k < N; ++k) {
      if (piv[k] != k) std::swap(b[k], b[piv[k]]);
      for (std::size_t r = k + 1; r < N; ++r) b[r] -= at(r, k) * b[k];
    }
    for (std::size_t k = N; k-- > 0;) {
      for (std::size_t c = k + 1; c < N; ++c) b[k] -= at(k, c) * b[c];
      b[k] /= at(k, k);
    }
    return b;
  }
};

}  // namespace detail

/// The 8x8 sideband system assembled once per parameter set; only the
/// diagonal depends on the probe detuning, so the off-diagonal couplings are
/// filled a single time and reused across a grid.
class SidebandMatrix {
 public:
  explicit SidebandMatrix(const ResponseInputs& in) : in_(in) {
    const cplx i(0.0, 1.0);
    // W = g_mb * m_2s; all magnomechanical couplings enter through it
    const cplx w = in.G / (i * std::sqrt(2.0));
    base_.fill(cplx(0.0, 0.0));
    auto at = [&](int r, int c) -> cplx& { return base_[r * 8 + c]; };
    at(0, 4) = i * in.g1;
    at(0, 6) = i * in.g2;
    at(1, 5) = -i * in.g1;
    at(1, 7) = -i * in.g2;
    at(2, 6) = i * std::conj(w);
    at(2, 7) = i * w;
    at(3, 6) = -i * std::conj(w);
    at(3, 7) = -i * w;
    at(4, 0) = i * in.g1;
    at(5, 1) = -i * in.g1;
    at(6, 0) = i * in.g2;
    at(6, 2) = i * w;
    at(6, 3) = i * w;
    at(7, 1) = -i * in.g2;
    at(7, 2) = -i * std::conj(w);
    at(7, 3) = -i * std::conj(w);
  }

  /// Probe drive eps_p in the a- row (the physical case).
  SidebandVector solve(double delta) const {
    return solve_rhs(delta, 0, cplx(in_.eps_p, 0.0));
  }

  /// Arbitrary single-entry right-hand side; row 1 supports the sideband
  /// swap check, value 0 the homogeneous case.
  SidebandVector solve_rhs(double delta, int drive_row, cplx drive) const {
    detail::DenseLU<8> lu;
    lu.a = base_;
    auto diag = [&](int r) -> cplx& { return lu.a[r * 8 + r]; };
    diag(0) = cplx(in_.kappa_a, in_.delta_a - delta);
    diag(1) = cplx(in_.kappa_a, -(in_.delta_a + delta));
    diag(2) = cplx(in_.kappa_b, in_.omega_b - delta);
    diag(3) = cplx(in_.kappa_b, -(in_.omega_b + delta));
    diag(4) = cplx(in_.kappa_m1, in_.delta_m1 - delta);
    diag(5) = cplx(in_.kappa_m1, -(in_.delta_m1 + delta));
    diag(6) = cplx(in_.kappa_m2, in_.delta_m2_eff - delta);
    diag(7) = cplx(in_.kappa_m2, -(in_.delta_m2_eff + delta));
    lu.factor();

    std::array<cplx, 8> rhs{};
    rhs[drive_row] = drive;
    SidebandVector out;
    out.v = lu.solve(rhs);
    for (const cplx& x : out.v)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw numerical_error("sideband solve produced non-finite amplitudes");
    return out;
  }

 private:
  ResponseInputs in_;
  std::array<cplx, 64> base_;
};

inline SidebandVector sideband_matrix_solve(const ResponseInputs& in, double delta) {
  return SidebandMatrix(in).solve(delta);
}

struct TimeDomainResult {
  cplx a_minus;
  double projection_residual;  // |window2 - window1| / max(|window2|, eps)
};

/// Integrate the four linearized mean-field equations (fluctuations around
/// the steady state, probe drive eps_p e^{-i delta t}) with fixed-step RK4,
/// then project the cavity fluctuation onto e^{-i delta t} over an integer
/// number of beat periods. Two consecutive projection windows give a
/// convergence estimate.
inline TimeDomainResult time_domain_response(const ResponseInputs& in, double delta,
                                             double horizon, double dt,
                                             std::size_t beat_periods = 8) {
  const double min_kappa = std::min({in.kappa_a, in.kappa_b, in.kappa_m1, in.kappa_m2});
  const double max_scale =
      std::max({in.omega_b, std::abs(in.delta_a), std::abs(in.delta_m1),
                std::abs(in.delta_m2_eff), std::abs(delta)});
  if (!(dt > 0.0) || dt > two_pi / (50.0 * max_scale))
    throw validation_error("time_domain_response: dt must satisfy dt <= 2pi/(50*max scale)");
  if (horizon < 10.0 / min_kappa)
    throw convergence_error(
        "time_domain_response: horizon shorter than transient (need >= 10/min kappa)",
        horizon * min_kappa);
  if (delta == 0.0) throw validation_error("time_domain_response: delta must be nonzero");

  const cplx i(0.0, 1.0);
  const cplx w = in.G / (i * std::sqrt(2.0));
  const cplx pa(in.kappa_a, in.delta_a);
  const cplx pb(in.kappa_b, in.omega_b);
  const cplx pm1(in.kappa_m1, in.delta_m1);
  const cplx pm2(in.kappa_m2, in.delta_m2_eff);

  using State = std::array<cplx, 4>;  // (da, db, dm1, dm2)
  auto rhs = [&](double t, const State& y) -> State {
    const cplx da = y[0], db = y[1], dm1 = y[2], dm2 = y[3];
    const cplx drive = in.eps_p * std::exp(cplx(0.0, -delta * t));
    return {-pa * da - i * in.g1 * dm1 - i * in.g2 * dm2 + drive,
            -pb * db - i * (std::conj(w) * dm2 + w * std::conj(dm2)),
            -pm1 * dm1 - i * in.g1 * da,
            -pm2 * dm2 - i * in.g2 * da - i * w * (db + std::conj(db))};
  };
  auto step = [&](double t, State& y, double h) {
    const State k1 = rhs(t, y);
    State y2;
    for (int j = 0; j < 4; ++j) y2[j] = y[j] + 0.5 * h * k1[j];
    const State k2 = rhs(t + 0.5 * h, y2);
    for (int j = 0; j < 4; ++j) y2[j] = y[j] + 0.5 * h * k2[j];
    const State k3 = rhs(t + 0.5 * h, y2);
    for (int j = 0; j < 4; ++j) y2[j] = y[j] + h * k3[j];
    const State k4 = rhs(t + h, y2);
    for (int j = 0; j < 4; ++j)
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  };

  State y{};  // fluctuations start at zero
  double t = 0.0;
  const auto n_transient = static_cast<std::size_t>(std::ceil(horizon / dt));
  for (std::size_t n = 0; n < n_transient; ++n) {
    step(t, y, dt);
    t += dt;
  }

  // projection window: dt adjusted to divide the beat period exactly, so the
  // trapezoid rule over full periods is spectrally accurate
  const double period = two_pi / std::abs(delta);
  const double window = static_cast<double>(beat_periods) * period;
  const auto m = static_cast<std::size_t>(std::ceil(window / dt));
  const double dtp = window / static_cast<double>(m);

  auto project = [&]() -> cplx {
    cplx acc(0.0, 0.0);
    for (std::size_t n = 0; n < m; ++n) {
      const cplx f1 = y[0] * std::exp(cplx(0.0, delta * t));
      step(t, y, dtp);
      t += dtp;
      const cplx f2 = y[0] * std::exp(cplx(0.0, delta * t));
      acc += 0.5 * (f1 + f2) * dtp;
    }
    return acc / window;
  };
  const cplx p1 = project();
  const cplx p2 = project();
  for (const cplx& x : y)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw numerical_error("time_domain_response: non-finite trajectory");

  TimeDomainResult r;
  r.a_minus = p2;
  r.projection_residual = std::abs(p2 - p1) / std::max(std::abs(p2), 1e-300);
  return r;
}

struct ValidationReport {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  double argmax_delta = 0.0;  // rad/s
  double tol = 0.0;
  bool pass = false;
};

inline nlohmann::ordered_json to_json(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["max_rel_err"] = r.max_rel_err;
  j["mean_rel_err"] = r.mean_rel_err;
  j["argmax_delta"] = r.argmax_delta;
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  return j;
}

/// Closed form vs matrix solve at every grid node.
inline ValidationReport cross_validate(const ResponseInputs& in, const ProbeGrid& grid,
                                       double tol) {
  grid.check();
  const SidebandMatrix mat(in);
  ValidationReport r;
  r.tol = tol;
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double d = grid.node(k);
    const cplx ref = mat.solve(d).a_minus();
    const cplx cf = cavity_sideband(in, d);
    const double rel = std::abs(cf - ref) / std::max(std::abs(ref), 1e-300);
    sum += rel;
    if (rel > r.max_rel_err) {
      r.max_rel_err = rel;
      r.argmax_delta = d;
    }
  }
  r.mean_rel_err = sum / static_cast<double>(grid.n_points);
  r.pass = r.max_rel_err <= tol;
  return r;
}

/// Same comparison for the closed form as printed; used to report its
/// deviation from the exact solution.
inline ValidationReport cross_validate_printed(const ResponseInputs& in, const ProbeGrid& grid,
                                               double tol) {
  grid.check();
  const SidebandMatrix mat(in);
  ValidationReport r;
  r.tol = tol;
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double d = grid.node(k);
    const cplx ref = mat.solve(d).a_minus();
    const cplx cf = cavity_sideband_printed(in, d);
    const double rel = std::abs(cf - ref) / std::max(std::abs(ref), 1e-300);
    sum += rel;
    if (rel > r.max_rel_err) {
      r.max_rel_err = rel;
      r.argmax_delta = d;
    }
  }
  r.mean_rel_err = sum / static_cast<double>(grid.n_points);
  r.pass = r.max_rel_err <= tol;
  return r;
}

}  // namespace magnomech
