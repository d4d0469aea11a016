#include "tcal/forward_model.hpp"

#include <algorithm>
#include <cmath>

#include "io_util.hpp"
#include "tcal/error.hpp"

namespace tcal {

namespace {

Vec3 json_vec3(const nlohmann::json &j, std::string_view ctx) {
  if (!j.is_array() || j.size() != 3)
    throw SchemaError(std::string(ctx) + ": expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace

void Compliance::validate(const BumpGeometry &g) const {
  for (double k : {kx_mm_per_N, ky_mm_per_N, kz_mm_per_N})
    if (!(k > 0.0) || !std::isfinite(k))
      throw ValidationError("compliance coefficients must be strictly positive");
  if (!(max_normal_force_N > 0.0))
    throw ValidationError("max_normal_force_N must be positive");
  if (!(kz_mm_per_N * max_normal_force_N < g.air_gap_mm))
    throw ValidationError(
        "kz * max_normal_force_N must stay below the air gap (magnet would "
        "touch the sensor)");
}

void MagnetSpec::validate() const {
  if (!(moment_mA_mm2 > 0.0) || !std::isfinite(moment_mA_mm2))
    throw ValidationError("magnet moment must be strictly positive");
  if (!(std::abs(orientation.norm() - 1.0) <= 1e-9))
    throw ValidationError("magnet orientation must be a unit vector");
}

void HallSpec::validate() const {
  if (!(sensitivity_uT_per_count > 0.0) || !std::isfinite(sensitivity_uT_per_count))
    throw ValidationError("hall sensitivity must be strictly positive");
  if (!(noise_sigma_counts >= 0.0) || !std::isfinite(noise_sigma_counts))
    throw ValidationError("hall noise sigma must be non-negative");
  // The wire format carries signed 16-bit counts.
  if (adc_bits < 2 || adc_bits > 16)
    throw ValidationError("adc_bits must be within 2..16");
}

void ForwardConfig::validate() const {
  geometry.validate();
  compliance.validate(geometry);
  magnet.validate();
  hall.validate();
}

ForwardConfig parse_forward_config(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text);
  using detail::require;
  ForwardConfig cfg;
  try {
    const auto &c = require(doc, "compliance", "forward config");
    cfg.compliance.kx_mm_per_N = require(c, "kx_mm_per_N", "compliance").get<double>();
    cfg.compliance.ky_mm_per_N = require(c, "ky_mm_per_N", "compliance").get<double>();
    cfg.compliance.kz_mm_per_N = require(c, "kz_mm_per_N", "compliance").get<double>();
    cfg.compliance.max_normal_force_N =
        c.value("max_normal_force_N", cfg.compliance.max_normal_force_N);

    const auto &m = require(doc, "magnet", "forward config");
    cfg.magnet.moment_mA_mm2 = require(m, "moment_mA_mm2", "magnet").get<double>();
    if (m.contains("orientation")) {
      Vec3 o = json_vec3(m["orientation"], "magnet.orientation");
      if (std::abs(o.norm() - 1.0) <= 1e-6)
        o.normalize();
      cfg.magnet.orientation = o;
    }

    const auto &h = require(doc, "hall", "forward config");
    cfg.hall.sensitivity_uT_per_count =
        require(h, "sensitivity_uT_per_count", "hall").get<double>();
    cfg.hall.noise_sigma_counts = require(h, "noise_sigma_counts", "hall").get<double>();
    cfg.hall.adc_bits = h.value("adc_bits", cfg.hall.adc_bits);
    if (h.contains("offset_counts")) {
      const auto &o = h["offset_counts"];
      if (!o.is_array() || o.size() != 3)
        throw SchemaError("hall.offset_counts: expected an array of 3 integers");
      cfg.hall.offset_counts = {o[0].get<int>(), o[1].get<int>(), o[2].get<int>()};
    }

    const auto &g = require(doc, "geometry", "forward config");
    cfg.geometry.air_gap_mm = require(g, "air_gap_mm", "geometry").get<double>();
    cfg.geometry.bump_diameter_mm =
        require(g, "bump_diameter_mm", "geometry").get<double>();
    cfg.geometry.skin_thickness_mm =
        require(g, "skin_thickness_mm", "geometry").get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("forward config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ForwardConfig load_forward_config(const std::filesystem::path &path) {
  return parse_forward_config(detail::read_text_file(path));
}

std::string forward_config_to_json(const ForwardConfig &cfg) {
  const auto &c = cfg.compliance;
  const auto &m = cfg.magnet;
  const auto &h = cfg.hall;
  const auto &g = cfg.geometry;
  nlohmann::json doc = {
      {"compliance",
       {{"kx_mm_per_N", c.kx_mm_per_N},
        {"ky_mm_per_N", c.ky_mm_per_N},
        {"kz_mm_per_N", c.kz_mm_per_N},
        {"max_normal_force_N", c.max_normal_force_N}}},
      {"magnet",
       {{"moment_mA_mm2", m.moment_mA_mm2},
        {"orientation", {m.orientation.x(), m.orientation.y(), m.orientation.z()}}}},
      {"hall",
       {{"sensitivity_uT_per_count", h.sensitivity_uT_per_count},
        {"noise_sigma_counts", h.noise_sigma_counts},
        {"adc_bits", h.adc_bits},
        {"offset_counts",
         {h.offset_counts.x(), h.offset_counts.y(), h.offset_counts.z()}}}},
      {"geometry",
       {{"air_gap_mm", g.air_gap_mm},
        {"bump_diameter_mm", g.bump_diameter_mm},
        {"skin_thickness_mm", g.skin_thickness_mm}}}};
  return doc.dump(2) + "\n";
}

Deflection deflect(const Compliance &c, const Vec3 &force_N,
                   const BumpGeometry &g) {
  Deflection d;
  d.displacement_mm = {c.kx_mm_per_N * force_N.x(), c.ky_mm_per_N * force_N.y(),
                       -c.kz_mm_per_N * force_N.z()};
  const double limit = g.air_gap_mm - kMinGapMm;
  if (d.displacement_mm.z() < -limit) {
    d.displacement_mm.z() = -limit;
    d.clamped = true;
  }
  return d;
}

Vec3 dipole_field(const MagnetSpec &m, const Vec3 &rel_pos_mm) {
  const double r = rel_pos_mm.norm();
  if (!(r >= kMinGapMm))
    throw SingularityError("dipole evaluated at " + detail::format_double(r) +
                           " mm, below the " +
                           detail::format_double(kMinGapMm) + " mm floor");
  const Vec3 rhat = rel_pos_mm / r;
  const Vec3 moment = m.moment_mA_mm2 * m.orientation;
  // (m.r)r is even in r, so the sensor->magnet direction can be used as is.
  return kDipolePrefactorUt * (3.0 * moment.dot(rhat) * rhat - moment) /
         (r * r * r);
}

Counts raw_counts(const HallSpec &h, const Vec3 &field_uT, Rng &rng) {
  const double sat = h.saturation();
  Counts out;
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    double v = field_uT[i] / h.sensitivity_uT_per_count + h.offset_counts[i];
    if (h.noise_sigma_counts > 0.0)
      v += h.noise_sigma_counts * noise(rng);
    out[i] = static_cast<int>(std::clamp(std::round(v), -sat, sat));
  }
  return out;
}

Counts raw_counts(const HallSpec &h, const Vec3 &field_uT,
                  std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return raw_counts(h, field_uT, rng);
}

Vec3 rest_field(const ForwardConfig &cfg) {
  return dipole_field(cfg.magnet, Vec3(0.0, 0.0, cfg.geometry.air_gap_mm));
}

SimulatedSample simulate_sample(const ForwardConfig &cfg,
                                const TaxelLayout &layout, int taxel_id,
                                const Vec3 &force_N, TimestampUs t_us,
                                Rng &rng) {
  layout.at(taxel_id);

  const Deflection d = deflect(cfg.compliance, force_N, cfg.geometry);
  const Vec3 magnet_pos =
      Vec3(0.0, 0.0, cfg.geometry.air_gap_mm) + d.displacement_mm;
  const Counts counts = raw_counts(cfg.hall, dipole_field(cfg.magnet, magnet_pos), rng);
  const bool saturated =
      (counts.cwiseAbs().array() >= cfg.hall.saturation()).any();

  SimulatedSample s;
  s.tactile = {t_us, taxel_id, counts, d.clamped || saturated};
  s.reference = {t_us, force_N};
  return s;
}

SimulatedSample simulate_sample(const ForwardConfig &cfg,
                                const TaxelLayout &layout, int taxel_id,
                                const Vec3 &force_N, TimestampUs t_us,
                                std::uint64_t seed) {
  Rng rng(seed);
  return simulate_sample(cfg, layout, taxel_id, force_N, t_us, rng);
}

} // namespace tcal
