#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "magnomech/errors.hpp"
#include "magnomech/params.hpp"

namespace magnomech {

/// Zero-order (drive-only) amplitudes and the magnon-number-dependent
/// effective detuning.
struct SteadyState {
  cplx a_s{};
  cplx b_s{};
  std::array<cplx, 2> m_s{};
  double delta_tilde_m2 = 0.0;  // rad/s
  cplx G_mb{};                  // i sqrt(2) g_mb m_2s
  double residual = 0.0;        // fixed-point residual, relative
  std::size_t iterations = 0;
};

namespace detail {

// For fixed effective detuning the (a_s, m_1s, m_2s) subsystem is linear;
// eliminate a_s and m_1s to get m_2s in closed form.
struct SteadyStateMap {
  const SystemParams& p;
  cplx f_a;           // kappa_a + i Delta_a + g1^2/(kappa_m1 + i Delta_m1)
  double shift_coef;  // 2 g_mb^2 omega_b / (kappa_b^2 + omega_b^2)

  explicit SteadyStateMap(const SystemParams& params) : p(params) {
    f_a = cplx(p.kappa_a, p.delta_a()) + p.g[0] * p.g[0] / cplx(p.kappa_m[0], p.delta_m(0));
    shift_coef = 2.0 * p.g_mb * p.g_mb * p.omega_b / (p.kappa_b * p.kappa_b + p.omega_b * p.omega_b);
  }

  double delta_tilde(double x) const { return p.delta_m(1) - shift_coef * x; }

  cplx m2s(double x) const {
    const cplx den = cplx(p.kappa_m[1], delta_tilde(x)) + p.g[1] * p.g[1] / f_a;
    return p.Omega_d / den;
  }

  // fixed-point map on x = |m_2s|^2
  double operator()(double x) const { return std::norm(m2s(x)); }
};

}  // namespace detail

/// Solve the self-consistent steady state. The outer problem is a 1-D fixed
/// point in x = |m_2s|^2; damped iteration with a bisection fallback on the
/// bracket [0, (|Omega_d|/kappa_m2)^2] when the damped update oscillates.
inline SteadyState solve_steady_state(const SystemParams& p, double tol = 1e-12,
                                      std::size_t max_iter = 10000) {
  if (!(tol > 0.0)) throw validation_error("solve_steady_state: tol must be > 0");
  validate(p);

  const detail::SteadyStateMap f(p);
  std::vector<double> history;

  double x = f(0.0);  // exact for g_mb = 0 or Omega_d = 0
  history.push_back(x);
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double prev_r = 0.0;
  int sign_flips = 0;

  for (std::size_t n = 1; n <= max_iter; ++n) {
    const double fx = f(x);
    if (!std::isfinite(fx))
      throw numerical_error("solve_steady_state: non-finite iterate");
    const double r = fx - x;
    iterations = n;
    if (std::abs(r) <= tol * std::max(x, 1.0)) {
      x = fx;
      residual = std::abs(r) / std::max(x, 1.0);
      converged = true;
      break;
    }
    if (n > 1 && r * prev_r < 0.0 && std::abs(r) >= std::abs(prev_r)) ++sign_flips;
    prev_r = r;
    x += 0.5 * (r);  // damped update
    history.push_back(x);

    if (sign_flips >= 2) {
      // oscillating: bisect g(x) = f(x) - x on the magnon-population bracket
      double lo = 0.0;
      double hi = std::norm(p.Omega_d) / (p.kappa_m[1] * p.kappa_m[1]);
      for (std::size_t b = 0; b < 200 && n < max_iter; ++b, ++n) {
        const double mid = 0.5 * (lo + hi);
        const double gm = f(mid) - mid;
        if (gm > 0.0)
          lo = mid;
        else
          hi = mid;
        iterations = n + 1;
        if (hi - lo <= tol * std::max(mid, 1.0)) break;
      }
      x = 0.5 * (lo + hi);
      const double fr = f(x);
      residual = std::abs(fr - x) / std::max(x, 1.0);
      x = fr;
      converged = residual <= 10.0 * tol;
      history.push_back(x);
      break;
    }
  }

  if (!converged) {
    const double r = std::abs(f(x) - x) / std::max(x, 1.0);
    throw convergence_error("solve_steady_state: no convergence after max_iter", r, history);
  }

  SteadyState ss;
  ss.iterations = iterations;
  ss.residual = residual;
  ss.delta_tilde_m2 = f.delta_tilde(x);
  ss.m_s[1] = f.m2s(x);
  ss.a_s = -cplx(0.0, 1.0) * p.g[1] * ss.m_s[1] / f.f_a;
  ss.m_s[0] = -cplx(0.0, 1.0) * p.g[0] * ss.a_s / cplx(p.kappa_m[0], p.delta_m(0));
  ss.b_s = -cplx(0.0, 1.0) * p.g_mb * std::norm(ss.m_s[1]) / cplx(p.kappa_b, p.omega_b);
  ss.G_mb = cplx(0.0, std::sqrt(2.0)) * p.g_mb * ss.m_s[1];
  for (const cplx& v : {ss.a_s, ss.b_s, ss.m_s[0], ss.m_s[1], ss.G_mb})
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw numerical_error("solve_steady_state: non-finite amplitude");
  return ss;
}

struct EffectiveCoupling {
  cplx value;
  bool overridden;
};

/// i sqrt(2) g_mb m_2s, or the configured override when present.
inline EffectiveCoupling effective_coupling(const SteadyState& ss, const SystemParams& p) {
  if (p.G_mb_override) return {*p.G_mb_override, true};
  return {ss.G_mb, false};
}

/// K |m_2s|^3 / |Omega_d|; the magnon Kerr term is negligible when this
/// is small (< 0.01 is a reasonable reading of "<<").
inline double kerr_validity_ratio(const SteadyState& ss, double kerr_k, cplx Omega_d) {
  if (kerr_k < 0.0) throw validation_error("kerr_validity_ratio: K must be >= 0");
  const double om = std::abs(Omega_d);
  if (om == 0.0) {
    if (kerr_k > 0.0)
      throw numerical_error("kerr_validity_ratio: undefined for Omega_d = 0 with K > 0");
    return 0.0;
  }
  const double m = std::abs(ss.m_s[1]);
  return kerr_k * m * m * m / om;
}

/// Everything the first-order response depends on. Both the closed form and
/// the oracles consume this struct, so they always see the same effective
/// detuning and coupling.
struct ResponseInputs {
  double omega_b;
  double kappa_a, kappa_b, kappa_m1, kappa_m2;
  double g1, g2;
  double delta_a, delta_m1;
  double delta_m2_eff;  // effective magnon-2 detuning
  cplx G;               // effective magnomechanical coupling
  double eps_p;
};

/// In override mode the quoted coupling and detuning are taken as the
/// effective ones (no self-consistent shift); otherwise both come from the
/// solved steady state.
inline ResponseInputs make_response_inputs(const SystemParams& p, const SteadyState& ss) {
  const auto gc = effective_coupling(ss, p);
  ResponseInputs in{};
  in.omega_b = p.omega_b;
  in.kappa_a = p.kappa_a;
  in.kappa_b = p.kappa_b;
  in.kappa_m1 = p.kappa_m[0];
  in.kappa_m2 = p.kappa_m[1];
  in.g1 = p.g[0];
  in.g2 = p.g[1];
  in.delta_a = p.delta_a();
  in.delta_m1 = p.delta_m(0);
  in.delta_m2_eff = gc.overridden ? p.delta_m(1) : ss.delta_tilde_m2;
  in.G = gc.value;
  in.eps_p = p.eps_p;
  return in;
}

}  // namespace magnomech
