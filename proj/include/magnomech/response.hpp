#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "magnomech/errors.hpp"
#include "magnomech/parallel.hpp"
#include "magnomech/params.hpp"
#include "magnomech/steady_state.hpp"

namespace magnomech {

namespace detail {

inline void check_finite(const cplx& v, const char* what) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw singularity_error(std::string("non-finite value in ") + what +
                                " (vanishing damping?)",
                            what);
}

}  // namespace detail

/// The twelve auxiliary quantities of the printed closed-form solution,
/// evaluated exactly as printed (complex G^2 and all). Kept for reference
/// and deviation reporting; the production path is cavity_sideband().
struct SidebandCoefficients {
  cplx A, B, C1, C2;
  cplx A_p, B_p, C1_p, C2_p;
  cplx alpha, alpha_p, beta, beta_p;
};

inline SidebandCoefficients coefficients(const ResponseInputs& in, double delta) {
  const cplx i(0.0, 1.0);
  const cplx G2 = in.G * in.G;
  const double wb2 = in.omega_b * in.omega_b;

  SidebandCoefficients c;
  c.A = cplx(in.kappa_a, in.delta_a + delta);
  c.A_p = cplx(in.kappa_a, in.delta_a - delta);
  c.B = G2 * in.omega_b / cplx(wb2 - delta * delta, delta * in.kappa_b);
  c.B_p = G2 * in.omega_b / cplx(wb2 - delta * delta, -delta * in.kappa_b);
  c.C1 = in.g1 * in.g1 / cplx(in.kappa_m1, in.delta_m1 + delta);
  c.C1_p = in.g1 * in.g1 / cplx(in.kappa_m1, in.delta_m1 - delta);
  c.C2 = in.g2 * in.g2 / cplx(in.kappa_m2, in.delta_m2_eff + delta);
  c.C2_p = in.g2 * in.g2 / cplx(in.kappa_m2, in.delta_m2_eff - delta);
  detail::check_finite(c.B, "B");
  detail::check_finite(c.B_p, "B_p");
  detail::check_finite(c.C1, "C1");
  detail::check_finite(c.C1_p, "C1_p");
  detail::check_finite(c.C2, "C2");
  detail::check_finite(c.C2_p, "C2_p");

  if (in.g2 == 0.0) {
    // C2 = 0: the alpha/beta block collapses to zero
    c.alpha = c.alpha_p = c.beta = c.beta_p = cplx(0.0, 0.0);
    return c;
  }
  c.alpha = in.g2 * in.g2 * c.B / (c.C2 + i * c.B);
  c.alpha_p = in.g2 * in.g2 * c.B_p / (c.C2_p + i * c.B_p);
  c.beta = c.C2 - i * std::conj(c.C2_p) * c.B / (std::conj(c.C2_p) + i * c.B);
  c.beta_p = c.C2_p - i * std::conj(c.C2) * c.B_p / (std::conj(c.C2) + i * c.B_p);
  detail::check_finite(c.alpha, "alpha");
  detail::check_finite(c.alpha_p, "alpha_p");
  detail::check_finite(c.beta, "beta");
  detail::check_finite(c.beta_p, "beta_p");
  return c;
}

/// First-order cavity sideband amplitude from the closed form as printed in
/// the source material. Disagrees with the exact solution near delta =
/// omega_b (see cross_validate); do not use for production spectra.
inline cplx cavity_sideband_printed(const ResponseInputs& in, double delta) {
  const cplx i(0.0, 1.0);
  const SidebandCoefficients c = coefficients(in, delta);
  cplx bracket = c.A_p + c.C1_p;
  if (in.g2 != 0.0 || std::abs(in.G) != 0.0) {
    if (c.beta_p == cplx(0.0, 0.0) || c.beta == cplx(0.0, 0.0)) {
      // G = 0 collapses beta to C2 which may still be fine; a true zero
      // means vanishing damping
      if (in.g2 != 0.0)
        throw singularity_error("printed closed form: beta vanished", "beta");
    } else {
      const cplx denom =
          std::conj(c.beta) * c.beta_p + std::conj(c.A) - std::conj(c.C1) +
          in.g2 * in.g2 / std::conj(c.beta);
      bracket += in.g2 * in.g2 / c.beta_p + std::conj(c.alpha) * c.alpha_p / denom;
    }
  }
  const cplx a = in.eps_p / bracket;
  detail::check_finite(a, "printed closed form");
  return a;
}

/// First-order cavity sideband amplitude, exact closed form.
///
/// Obtained by eliminating the seven companion sideband amplitudes from the
/// linearized equations of motion; algebraically identical to the 8x8
/// matrix solve in oracle.hpp (cross-validated there to 1e-10). Only |G|^2
/// enters: the response is invariant under the drive phase.
inline cplx cavity_sideband(const ResponseInputs& in, double delta) {
  const cplx i(0.0, 1.0);
  const cplx A_p = cplx(in.kappa_a, in.delta_a - delta);
  const cplx A_st = cplx(in.kappa_a, -(in.delta_a + delta));
  const cplx C1_p = in.g1 * in.g1 / cplx(in.kappa_m1, in.delta_m1 - delta);
  const cplx C1_st = in.g1 * in.g1 / cplx(in.kappa_m1, -(in.delta_m1 + delta));
  const cplx F2 = cplx(in.kappa_m2, in.delta_m2_eff - delta);
  const cplx F2_p = cplx(in.kappa_m2, -(in.delta_m2_eff + delta));

  // phonon loop: same denominator for both sideband rows
  const double g_abs2 = std::norm(in.G);
  const cplx d_b = cplx(in.kappa_b * in.kappa_b + in.omega_b * in.omega_b - delta * delta,
                        -2.0 * delta * in.kappa_b);
  const cplx B0 = in.omega_b * g_abs2 / d_b;

  const cplx S = F2_p + i * B0 + in.g2 * in.g2 / (A_st + C1_st);
  const cplx D = F2 - i * B0 - B0 * B0 / S;
  const cplx bracket = A_p + C1_p + in.g2 * in.g2 / D;
  const cplx a = in.eps_p / bracket;
  detail::check_finite(a, "cavity sideband");
  return a;
}

/// Output field amplitude 2 kappa_a a_- / eps_p. Re = absorption quadrature,
/// Im = dispersion quadrature.
inline cplx output_field(cplx a_minus, double eps_p, double kappa_a) {
  if (!(eps_p > 0.0)) throw validation_error("output_field: eps_p must be > 0");
  return 2.0 * kappa_a * a_minus / eps_p;
}

/// Rescaled transmission; identically 1 - output_field.
inline cplx transmission(cplx a_minus, double eps_p, double kappa_a) {
  if (!(eps_p > 0.0)) throw validation_error("transmission: eps_p must be > 0");
  return (eps_p - 2.0 * kappa_a * a_minus) / eps_p;
}

struct ResponsePoint {
  double delta;   // rad/s
  cplx a_minus;
  cplx eps_out;
  cplx t_p;
  double phi_t;   // radians, unwrapped along the spectrum
};

struct SpectrumMetadata {
  std::string params_digest;
  std::string steady_state_mode;  // "override" or "self-consistent"
  bool amplifying = false;        // any |t_p|^2 > 1 + 1e-6
};

struct Spectrum {
  std::vector<ResponsePoint> points;
  SpectrumMetadata metadata;
};

/// Unwrap in place: successive jumps > pi are corrected by multiples of 2 pi.
inline void unwrap_phase(std::vector<double>& phi) {
  for (std::size_t k = 1; k < phi.size(); ++k) {
    double d = phi[k] - phi[k - 1];
    while (d > std::numbers::pi) {
      phi[k] -= two_pi;
      d = phi[k] - phi[k - 1];
    }
    while (d < -std::numbers::pi) {
      phi[k] += two_pi;
      d = phi[k] - phi[k - 1];
    }
  }
}

/// Unwrapped transmission phase of an existing spectrum.
inline std::vector<double> phase(const Spectrum& s) {
  if (s.points.empty()) throw validation_error("phase: empty spectrum");
  std::vector<double> phi(s.points.size());
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    const cplx t = s.points[k].t_p;
    if (t == cplx(0.0, 0.0))
      throw phase_undefined_error("phase: t_p = 0 at grid point " + std::to_string(k),
                                  s.points[k].delta);
    phi[k] = std::arg(t);
  }
  unwrap_phase(phi);
  return phi;
}

inline ResponsePoint evaluate_point(const ResponseInputs& in, double delta) {
  ResponsePoint pt;
  pt.delta = delta;
  pt.a_minus = cavity_sideband(in, delta);
  pt.eps_out = output_field(pt.a_minus, in.eps_p, in.kappa_a);
  pt.t_p = cplx(1.0, 0.0) - pt.eps_out;
  pt.phi_t = std::arg(pt.t_p);
  return pt;
}

/// Evaluate the response over a grid. Points are computed in parallel and
/// assembled in grid order; the result is identical to a serial evaluation.
inline Spectrum spectrum(const ResponseInputs& in, const ProbeGrid& grid,
                         int threads = 0) {
  grid.check();
  Spectrum s;
  s.points.resize(grid.n_points);
  std::vector<std::string> errors(grid.n_points);
  parallel_for(grid.n_points, threads, [&](std::size_t i) {
    try {
      s.points[i] = evaluate_point(in, grid.node(i));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw singularity_error("spectrum: grid point " + std::to_string(i) + ": " + errors[i],
                              "grid");

  std::vector<double> phi(s.points.size());
  for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = s.points[k].phi_t;
  unwrap_phase(phi);
  for (std::size_t k = 0; k < phi.size(); ++k) s.points[k].phi_t = phi[k];

  for (const auto& pt : s.points)
    if (std::norm(pt.t_p) > 1.0 + 1e-6) s.metadata.amplifying = true;
  return s;
}

/// Group delay d(arg t_p)/d(omega_p) by central difference with local
/// unwrapping; delta = omega_p - omega_d at fixed drive, so d/d omega_p =
/// d/d delta.
inline double group_delay(const ResponseInputs& in, double delta, double h) {
  if (!(h > 0.0)) throw validation_error("group_delay: h must be > 0");
  if (h > in.kappa_b / 10.0)
    throw validation_error("group_delay: h must be <= kappa_b/10 to resolve the narrowest feature");
  double phi[3];
  int k = 0;
  for (double d : {delta - h, delta, delta + h}) {
    const cplx t = cplx(1.0, 0.0) - output_field(cavity_sideband(in, d), in.eps_p, in.kappa_a);
    if (t == cplx(0.0, 0.0))
      throw phase_undefined_error(
          "group_delay: t_p = 0 at evaluation point; shift delta by h/2", d);
    phi[k++] = std::arg(t);
  }
  for (int j = 1; j < 3; ++j) {
    while (phi[j] - phi[j - 1] > std::numbers::pi) phi[j] -= two_pi;
    while (phi[j] - phi[j - 1] < -std::numbers::pi) phi[j] += two_pi;
  }
  return (phi[2] - phi[0]) / (2.0 * h);
}

inline double group_delay(const ResponseInputs& in, double delta) {
  return group_delay(in, delta, in.kappa_b / 10.0);
}

}  // namespace magnomech
