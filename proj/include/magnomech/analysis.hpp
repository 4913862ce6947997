#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "magnomech/errors.hpp"
#include "magnomech/parallel.hpp"
#include "magnomech/response.hpp"
#include "magnomech/steady_state.hpp"

namespace magnomech {

enum class Channel { absorption, dispersion, transmission };

inline double channel_value(const ResponsePoint& pt, Channel c) {
  switch (c) {
    case Channel::absorption: return pt.eps_out.real();
    case Channel::dispersion: return pt.eps_out.imag();
    default: return std::norm(pt.t_p);
  }
}

struct Extremum {
  double delta;                     // rad/s
  double value;
  double prominence;
  double width_at_half_prominence;  // rad/s
  std::size_t index;
};

struct SpectralFeatures {
  std::vector<Extremum> dips;
  std::vector<Extremum> peaks;
  std::size_t window_count = 0;                 // dips above the prominence threshold
  std::vector<double> asymmetry;                // per dip; NaN when a flank is off-grid
};

namespace detail {

inline std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
      std::size_t j = i;
      while (j + 1 < y.size() && y[j + 1] == y[i]) ++j;
      if (j + 1 < y.size() && y[j + 1] < y[i]) idx.push_back(i);
    }
  }
  return idx;
}

/// Contour prominence: height above the higher of the two flanking saddle
/// levels. Each side is scanned out to the nearest strictly higher sample
/// (or the boundary), taking the minimum on the way.
inline double prominence(const std::vector<double>& y, std::size_t i) {
  double lmin = y[i];
  for (std::size_t j = i; j-- > 0;) {
    if (y[j] > y[i]) break;
    lmin = std::min(lmin, y[j]);
  }
  double rmin = y[i];
  for (std::size_t j = i + 1; j < y.size(); ++j) {
    if (y[j] > y[i]) break;
    rmin = std::min(rmin, y[j]);
  }
  return y[i] - std::max(lmin, rmin);
}

/// Width of peak i at half prominence, by linear interpolation of the
/// crossing on each side.
inline double width_at_half_prominence(const std::vector<double>& x, const std::vector<double>& y,
                                       std::size_t i, double prom) {
  const double ref = y[i] - 0.5 * prom;
  double xl = x.front();
  for (std::size_t j = i; j-- > 0;) {
    if (y[j] <= ref) {
      const double f = (ref - y[j]) / (y[j + 1] - y[j]);
      xl = x[j] + f * (x[j + 1] - x[j]);
      break;
    }
  }
  double xr = x.back();
  for (std::size_t j = i + 1; j < y.size(); ++j) {
    if (y[j] <= ref) {
      const double f = (ref - y[j]) / (y[j - 1] - y[j]);
      xr = x[j] - f * (x[j] - x[j - 1]);
      break;
    }
  }
  return xr - xl;
}

}  // namespace detail

/// Dips and peaks of the selected channel with contour prominences; windows
/// are the dips whose prominence clears the threshold.
inline SpectralFeatures find_extrema(const Spectrum& s, Channel channel,
                                     double prominence_threshold = 0.01) {
  if (s.points.size() < 3) throw validation_error("find_extrema: need at least 3 points");
  std::vector<double> x(s.points.size()), y(s.points.size()), yneg(s.points.size());
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    x[k] = s.points[k].delta;
    y[k] = channel_value(s.points[k], channel);
    yneg[k] = -y[k];
  }

  SpectralFeatures f;
  for (std::size_t i : detail::local_maxima(y)) {
    const double p = detail::prominence(y, i);
    if (p >= prominence_threshold)
      f.peaks.push_back({x[i], y[i], p, detail::width_at_half_prominence(x, y, i, p), i});
  }
  for (std::size_t i : detail::local_maxima(yneg)) {
    const double p = detail::prominence(yneg, i);
    if (p >= prominence_threshold)
      f.dips.push_back({x[i], y[i], p, detail::width_at_half_prominence(x, yneg, i, p), i});
  }
  f.window_count = f.dips.size();

  f.asymmetry.reserve(f.dips.size());
  for (const auto& dip : f.dips) {
    double hl = std::numeric_limits<double>::quiet_NaN();
    double hr = hl;
    for (const auto& pk : f.peaks) {
      if (pk.index < dip.index) hl = pk.value - dip.value;  // peaks sorted by index
      if (pk.index > dip.index && std::isnan(hr)) hr = pk.value - dip.value;
    }
    f.asymmetry.push_back(std::isnan(hl) || std::isnan(hr)
                              ? std::numeric_limits<double>::quiet_NaN()
                              : std::abs(hl - hr) / (hl + hr));
  }
  return f;
}

/// Flanking-peak asymmetry |h_L - h_R| / (h_L + h_R) of one detected dip.
inline double fano_asymmetry(const SpectralFeatures& f, std::size_t dip_index) {
  if (dip_index >= f.dips.size()) throw validation_error("fano_asymmetry: no such dip");
  const double a = f.asymmetry[dip_index];
  if (std::isnan(a))
    throw validation_error("fano_asymmetry: dip at grid boundary (missing flanking peak)");
  return a;
}

enum class LightPropagation { slow, fast, none };

/// tau_g > eps -> slow, < -eps -> fast; eps = 1 ns by default.
inline LightPropagation classify(double tau_g_seconds, double eps_cls = 1e-9) {
  if (!std::isfinite(tau_g_seconds)) throw validation_error("classify: tau_g must be finite");
  if (tau_g_seconds > eps_cls) return LightPropagation::slow;
  if (tau_g_seconds < -eps_cls) return LightPropagation::fast;
  return LightPropagation::none;
}

inline const char* to_string(LightPropagation c) {
  switch (c) {
    case LightPropagation::slow: return "slow";
    case LightPropagation::fast: return "fast";
    default: return "none";
  }
}

enum class SweepVariable { field_b0, rabi_omega_d, drive_power };

enum class SteadyStateMode { self_consistent, override_coupling };

struct SweepSpec {
  SweepVariable variable;
  double x_min;            // exclusive lower edge when > 0 is required
  double x_max;
  std::size_t n;
  SteadyStateMode mode = SteadyStateMode::self_consistent;
  double delta_eval;       // rad/s
  SphereSpec sphere{};     // for B0 -> Omega_d
  double power_ref_w = 10e-3;       // drive power mapped to omega_ref
  double omega_ref = 1.2e12;        // rad/s at the reference power
};

struct DelaySample {
  double x;
  double tau_g;  // seconds
};

struct DelayCurve {
  SweepVariable variable;
  std::vector<DelaySample> samples;
  DelaySample extremum{};  // sample of max |tau_g|
};

inline cplx sweep_rabi(const SweepSpec& s, double x) {
  switch (s.variable) {
    case SweepVariable::field_b0: return rabi_from_field(x, s.sphere);
    case SweepVariable::rabi_omega_d: return cplx(x, 0.0);
    default:
      if (x < 0.0) throw validation_error("delay_sweep: drive power must be >= 0");
      return cplx(s.omega_ref * std::sqrt(x / s.power_ref_w), 0.0);
  }
}

/// Rebuild the steady state at each sweep point and evaluate the group delay
/// at delta_eval. Points are independent; evaluation is parallel with
/// deterministic assembly.
inline DelayCurve delay_sweep(const SystemParams& base, const SweepSpec& spec, int threads = 0) {
  if (spec.n == 0) throw validation_error("delay_sweep: n must be >= 1");
  if (!(spec.x_max > 0.0) || spec.x_min < 0.0 || spec.x_min > spec.x_max)
    throw validation_error("delay_sweep: range must be positive");

  DelayCurve curve;
  curve.variable = spec.variable;
  curve.samples.resize(spec.n);
  std::vector<std::string> errors(spec.n);

  parallel_for(spec.n, threads, [&](std::size_t k) {
    const double x =
        spec.n == 1 ? spec.x_max
                    : spec.x_min + (spec.x_max - spec.x_min) * static_cast<double>(k + 1) /
                                       static_cast<double>(spec.n);
    try {
      SystemParams p = base;
      p.Omega_d = sweep_rabi(spec, x);
      if (spec.mode == SteadyStateMode::self_consistent) p.G_mb_override.reset();
      const SteadyState ss = solve_steady_state(p);
      const ResponseInputs in = make_response_inputs(p, ss);
      curve.samples[k] = {x, group_delay(in, spec.delta_eval)};
    } catch (const std::exception& e) {
      errors[k] = "x = " + std::to_string(x) + ": " + e.what();
    }
  });
  for (std::size_t k = 0; k < errors.size(); ++k)
    if (!errors[k].empty())
      throw convergence_error("delay_sweep: failure at " + errors[k], 0.0);

  curve.extremum = curve.samples.front();
  for (const auto& s : curve.samples)
    if (std::abs(s.tau_g) > std::abs(curve.extremum.tau_g)) curve.extremum = s;
  return curve;
}

}  // namespace magnomech
