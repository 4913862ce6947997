#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magnomech/errors.hpp"

namespace magnomech {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;  // J s

inline double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline double rad_to_hz(double w) { return w / two_pi; }

/// YIG sphere geometry and material constants, used to convert a drive
/// field amplitude B0 into the Rabi frequency.
struct SphereSpec {
  double diameter = 250e-6;           // m
  double spin_density = 4.22e27;      // 1/m^3
  double gyromagnetic_ratio = two_pi * 28e9;  // rad/s/T

  double volume() const { return std::numbers::pi / 6.0 * diameter * diameter * diameter; }
};

// Literature cross-reference: some sources quote S = 7.07e14 for the nominal
// 250 um sphere; direct evaluation of (5/2) rho V gives ~8.6e16.
inline constexpr double quoted_total_spin = 7.07e14;

struct SpinCount {
  double n_spins;      // N = rho * V
  double total_spin;   // S = 5/2 * N
};

inline SpinCount spins_from_sphere(const SphereSpec& sphere) {
  if (sphere.diameter < 0.0 || sphere.spin_density <= 0.0)
    throw validation_error("sphere: diameter must be >= 0 and spin density > 0");
  const double n = sphere.spin_density * sphere.volume();
  return {n, 2.5 * n};
}

/// Rabi frequency of the magnon drive: (sqrt(5)/4) * gamma * sqrt(N) * B0.
/// Real-nonnegative by construction, returned as complex.
inline cplx rabi_from_field(double b0_tesla, const SphereSpec& sphere) {
  if (b0_tesla < 0.0) throw validation_error("rabi_from_field: B0 must be >= 0");
  const double n = spins_from_sphere(sphere).n_spins;
  return cplx(std::sqrt(5.0) / 4.0 * sphere.gyromagnetic_ratio * std::sqrt(n) * b0_tesla, 0.0);
}

/// Probe amplitude from power: sqrt(2 P kappa_a / (hbar omega_p)).
inline double probe_amp_from_power(double power_w, double kappa_a, double omega_p) {
  if (power_w < 0.0) throw validation_error("probe_amp_from_power: power must be >= 0");
  if (omega_p <= 0.0) throw validation_error("probe_amp_from_power: omega_p must be > 0");
  return std::sqrt(2.0 * power_w * kappa_a / (hbar * omega_p));
}

struct ProbeGrid {
  double delta_min;  // rad/s
  double delta_max;  // rad/s
  std::size_t n_points;

  void check() const {
    if (!(delta_min < delta_max)) throw validation_error("grid: delta_min must be < delta_max");
    if (n_points < 2) throw validation_error("grid: n_points must be >= 2");
  }
  double node(std::size_t i) const {
    return delta_min + (delta_max - delta_min) * static_cast<double>(i) /
                           static_cast<double>(n_points - 1);
  }
};

/// All physical inputs of the driven two-YIG magnomechanical model.
/// Frequencies and rates are angular (rad/s) everywhere in this library;
/// configuration files use Hz under keys suffixed `_hz`.
/// Detunings are derived on access, never stored.
struct SystemParams {
  double omega_a = 0.0;                 // cavity resonance
  double omega_b = 0.0;                 // phonon resonance
  std::array<double, 2> omega_m{};      // magnon modes
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  std::array<double, 2> kappa_m{};
  std::array<double, 2> g{};            // magnon-photon couplings
  double g_mb = 0.0;                    // single-magnon magnomechanical coupling
  double omega_d = 0.0;                 // drive frequency
  cplx Omega_d{0.0, 0.0};               // drive Rabi frequency
  double eps_p = 1.0;                   // probe amplitude (arbitrary units)
  std::optional<double> omega_probe;    // optional absolute probe frequency
  std::optional<cplx> G_mb_override;    // direct effective-coupling mode

  // Raw Hz values as loaded, kept so serialize() round-trips bit-for-bit.
  std::map<std::string, double> loaded_hz;

  double delta_a() const { return omega_a - omega_d; }
  double delta_m(int j) const { return omega_m.at(j) - omega_d; }

  bool operator==(const SystemParams& o) const {
    auto eq = [](double a, double b) {
      return a == b || (std::isnan(a) && std::isnan(b));
    };
    return eq(omega_a, o.omega_a) && eq(omega_b, o.omega_b) &&
           eq(omega_m[0], o.omega_m[0]) && eq(omega_m[1], o.omega_m[1]) &&
           eq(kappa_a, o.kappa_a) && eq(kappa_b, o.kappa_b) &&
           eq(kappa_m[0], o.kappa_m[0]) && eq(kappa_m[1], o.kappa_m[1]) &&
           eq(g[0], o.g[0]) && eq(g[1], o.g[1]) && eq(g_mb, o.g_mb) &&
           eq(omega_d, o.omega_d) && Omega_d == o.Omega_d && eq(eps_p, o.eps_p) &&
           omega_probe == o.omega_probe && G_mb_override == o.G_mb_override;
  }
};

namespace detail {

inline const std::vector<std::string>& mandatory_hz_keys() {
  static const std::vector<std::string> keys = {
      "omega_a_hz",  "omega_b_hz",  "omega_m1_hz", "omega_m2_hz",
      "kappa_a_hz",  "kappa_b_hz",  "kappa_m1_hz", "kappa_m2_hz",
      "g1_hz",       "g2_hz",       "gmb_hz",      "omega_d_hz"};
  return keys;
}

}  // namespace detail

/// Hard validation plus advisory warnings.
/// Throws validation_error on nonpositive decay rates / bare frequencies;
/// returns human-readable warnings for soft checks (RWA margin, drive
/// detuning far from both phonon sidebands).
inline std::vector<std::string> validate(const SystemParams& p) {
  if (!(p.kappa_a > 0.0)) throw validation_error("kappa_a must be > 0");
  if (!(p.kappa_b > 0.0)) throw validation_error("kappa_b must be > 0");
  if (!(p.kappa_m[0] > 0.0)) throw validation_error("kappa_m1 must be > 0");
  if (!(p.kappa_m[1] > 0.0)) throw validation_error("kappa_m2 must be > 0");
  if (!(p.omega_a > 0.0)) throw validation_error("omega_a must be > 0");
  if (!(p.omega_b > 0.0)) throw validation_error("omega_b must be > 0");
  if (!(p.omega_m[0] > 0.0)) throw validation_error("omega_m1 must be > 0");
  if (!(p.omega_m[1] > 0.0)) throw validation_error("omega_m2 must be > 0");
  for (double v : {p.omega_a, p.omega_b, p.omega_m[0], p.omega_m[1], p.kappa_a, p.kappa_b,
                   p.kappa_m[0], p.kappa_m[1], p.g[0], p.g[1], p.g_mb, p.omega_d, p.eps_p})
    if (!std::isfinite(v)) throw validation_error("non-finite parameter");

  std::vector<std::string> warnings;
  const double fast = 100.0 * std::max({p.g[0], p.g[1], p.kappa_a, p.kappa_m[0], p.kappa_m[1]});
  if (p.omega_a < fast)
    warnings.push_back("rotating-wave margin violated: omega_a < 100*max(g, kappa)");
  for (int j = 0; j < 2; ++j)
    if (p.omega_m[j] < fast)
      warnings.push_back("rotating-wave margin violated: omega_m" + std::to_string(j + 1) +
                         " < 100*max(g, kappa)");
  for (int j = 0; j < 2; ++j) {
    const double d = p.delta_m(j);
    if (std::min(std::abs(d - p.omega_b), std::abs(d + p.omega_b)) > 0.5 * p.omega_b)
      warnings.push_back("drive neither red nor blue detuned for magnon " + std::to_string(j + 1));
  }
  return warnings;
}

/// Parse a flat JSON configuration document. Frequencies in Hz under `_hz`
/// keys; `Omega_d_rad_s` is taken raw. Missing mandatory keys are all
/// reported at once.
inline SystemParams load_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("configuration must be a JSON object");

  std::vector<std::string> missing;
  for (const auto& k : detail::mandatory_hz_keys())
    if (!doc.contains(k)) missing.push_back(k);
  if (!doc.contains("Omega_d_rad_s")) missing.push_back("Omega_d_rad_s");
  if (!missing.empty()) {
    std::string msg = "missing mandatory configuration key(s):";
    for (const auto& k : missing) msg += " " + k;
    throw config_error(msg, missing);
  }

  auto num = [&](const std::string& k) -> double {
    if (!doc[k].is_number()) throw config_error("key " + k + " must be a number");
    return doc[k].get<double>();
  };

  SystemParams p;
  for (const auto& k : detail::mandatory_hz_keys()) p.loaded_hz[k] = num(k);
  auto rad = [&](const std::string& k) { return hz_to_rad(p.loaded_hz.at(k)); };

  p.omega_a = rad("omega_a_hz");
  p.omega_b = rad("omega_b_hz");
  p.omega_m = {rad("omega_m1_hz"), rad("omega_m2_hz")};
  p.kappa_a = rad("kappa_a_hz");
  p.kappa_b = rad("kappa_b_hz");
  p.kappa_m = {rad("kappa_m1_hz"), rad("kappa_m2_hz")};
  p.g = {rad("g1_hz"), rad("g2_hz")};
  p.g_mb = rad("gmb_hz");
  p.omega_d = rad("omega_d_hz");
  p.Omega_d = cplx(num("Omega_d_rad_s"), 0.0);
  p.loaded_hz["Omega_d_rad_s"] = p.Omega_d.real();

  if (doc.contains("omega_probe_hz")) {
    p.loaded_hz["omega_probe_hz"] = num("omega_probe_hz");
    p.omega_probe = rad("omega_probe_hz");
  }
  if (doc.contains("G_mb_override_hz")) {
    p.loaded_hz["G_mb_override_hz"] = num("G_mb_override_hz");
    p.G_mb_override = cplx(rad("G_mb_override_hz"), 0.0);
  }
  if (doc.contains("eps_p")) {
    p.eps_p = num("eps_p");
    p.loaded_hz["eps_p"] = p.eps_p;
  }

  for (double r : {p.kappa_a, p.kappa_b, p.kappa_m[0], p.kappa_m[1]})
    if (r < 0.0) throw validation_error("decay rates must not be negative");
  validate(p);  // hard checks only; warnings are the caller's to request
  return p;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

/// Emit a configuration document that load_config() maps back to `p`
/// bit-for-bit. Values loaded from a document are re-emitted verbatim;
/// fields set programmatically fall back to rad/(2 pi).
inline std::string serialize(const SystemParams& p) {
  auto hz_of = [&](const std::string& key, double angular) -> double {
    auto it = p.loaded_hz.find(key);
    return it != p.loaded_hz.end() ? it->second : rad_to_hz(angular);
  };
  nlohmann::ordered_json doc;
  doc["omega_a_hz"] = hz_of("omega_a_hz", p.omega_a);
  doc["omega_b_hz"] = hz_of("omega_b_hz", p.omega_b);
  doc["omega_m1_hz"] = hz_of("omega_m1_hz", p.omega_m[0]);
  doc["omega_m2_hz"] = hz_of("omega_m2_hz", p.omega_m[1]);
  doc["kappa_a_hz"] = hz_of("kappa_a_hz", p.kappa_a);
  doc["kappa_b_hz"] = hz_of("kappa_b_hz", p.kappa_b);
  doc["kappa_m1_hz"] = hz_of("kappa_m1_hz", p.kappa_m[0]);
  doc["kappa_m2_hz"] = hz_of("kappa_m2_hz", p.kappa_m[1]);
  doc["g1_hz"] = hz_of("g1_hz", p.g[0]);
  doc["g2_hz"] = hz_of("g2_hz", p.g[1]);
  doc["gmb_hz"] = hz_of("gmb_hz", p.g_mb);
  doc["omega_d_hz"] = hz_of("omega_d_hz", p.omega_d);
  doc["Omega_d_rad_s"] = p.Omega_d.real();
  if (p.omega_probe) doc["omega_probe_hz"] = hz_of("omega_probe_hz", *p.omega_probe);
  if (p.G_mb_override) doc["G_mb_override_hz"] = hz_of("G_mb_override_hz", p.G_mb_override->real());
  doc["eps_p"] = p.eps_p;
  return doc.dump(2);
}

}  // namespace magnomech
