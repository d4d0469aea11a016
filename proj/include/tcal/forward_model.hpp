#pragma once

// Physics stand-in for one taxel: applied force -> magnet displacement ->
// dipole field at the Hall element -> quantized, noisy counts.
//
// Everything is evaluated in the taxel's local frame: the Hall element sits at
// the origin, the magnet rests at (0, 0, air_gap) on the outward normal, and a
// force with positive Z presses the skin and moves the magnet towards the die.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tcal/geometry.hpp"
#include "tcal/records.hpp"

namespace tcal {

using Rng = std::mt19937_64;

/// Smallest magnet-to-die distance the deflection model will produce.
inline constexpr double kMinGapMm = 0.05;

/// mu0/4pi = 1e-7 T m/A. With the moment in mA mm^2 (1e-9 A m^2) and the
/// distance in mm (1e-3 m), the dipole prefactor becomes 1e-7 T = 0.1 uT.
inline constexpr double kDipolePrefactorUt = 0.1;

/// Diagonal linear compliance of the bump.
struct Compliance {
  double kx_mm_per_N = 0.06;
  double ky_mm_per_N = 0.06;
  double kz_mm_per_N = 0.04;
  /// Largest normal force the configuration is rated for.
  double max_normal_force_N = 10.0;

  void validate(const BumpGeometry &g) const;
};

struct MagnetSpec {
  double moment_mA_mm2 = 20000.0;
  /// North pole towards the Hall element.
  Vec3 orientation = Vec3(0.0, 0.0, -1.0);

  void validate() const;
};

struct HallSpec {
  double sensitivity_uT_per_count = 1.0;
  double noise_sigma_counts = 2.0;
  int adc_bits = 16;
  Counts offset_counts = Counts::Zero();

  int saturation() const { return (1 << (adc_bits - 1)) - 1; }
  void validate() const;
};

struct ForwardConfig {
  Compliance compliance;
  MagnetSpec magnet;
  HallSpec hall;
  BumpGeometry geometry;

  void validate() const;
};

ForwardConfig parse_forward_config(std::string_view json_text);
ForwardConfig load_forward_config(const std::filesystem::path &path);
std::string forward_config_to_json(const ForwardConfig &cfg);

struct Deflection {
  Vec3 displacement_mm = Vec3::Zero();
  bool clamped = false;
};

Deflection deflect(const Compliance &c, const Vec3 &force_N,
                   const BumpGeometry &g);

/// Field in uT at the sensor; `rel_pos_mm` points from the sensor to the
/// magnet centre. Throws SingularityError when |rel_pos_mm| < kMinGapMm.
Vec3 dipole_field(const MagnetSpec &m, const Vec3 &rel_pos_mm);

Counts raw_counts(const HallSpec &h, const Vec3 &field_uT, Rng &rng);
Counts raw_counts(const HallSpec &h, const Vec3 &field_uT,
                  std::uint64_t rng_seed);

/// Noise-free field at the undisturbed gap.
Vec3 rest_field(const ForwardConfig &cfg);

struct SimulatedSample {
  RawTaxelSample tactile;
  ReferenceSample reference;
};

/// `force_N` is in the taxel's local frame. Shell-frame forces can be mapped
/// with `taxel_frame(layout, id).direction_to_local(f)`.
SimulatedSample simulate_sample(const ForwardConfig &cfg,
                                const TaxelLayout &layout, int taxel_id,
                                const Vec3 &force_N, TimestampUs t_us, Rng &rng);
SimulatedSample simulate_sample(const ForwardConfig &cfg,
                                const TaxelLayout &layout, int taxel_id,
                                const Vec3 &force_N, TimestampUs t_us,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Force protocols

enum class Interpolation { hold, ramp };

struct ProfileSegment {
  double duration_s = 0.0;
  Vec3 target_force_N = Vec3::Zero();
};

struct ForceProfile {
  std::vector<ProfileSegment> segments;
  Interpolation interpolation = Interpolation::ramp;
  /// Ramp starting point of the first segment.
  Vec3 start_force_N = Vec3::Zero();

  /// Throws ValidationError on an empty or malformed profile.
  void validate() const;
  TimestampUs duration_us() const;
  /// Commanded force at `t_us`; the last target holds past the end.
  Vec3 force_at(TimestampUs t_us) const;
};

/// Oscillatory Z loading followed by -X, +X, -Y, +Y shear sweeps under a
/// held normal load. 60 s, ramp interpolation.
ForceProfile training_profile();
/// Plateaus of 5 s each, shear within +/-2 N. 60 s, hold interpolation.
ForceProfile test_profile();
/// "training" or "test"; throws ValidationError otherwise.
ForceProfile preset_profile(std::string_view name);

ForceProfile parse_profile(std::string_view json_text);
ForceProfile load_profile(const std::filesystem::path &path);
std::string profile_to_json(const ForceProfile &p);

struct StreamOptions {
  double rate_hz = 100.0;
  /// Uniform timestamp jitter applied independently to each stream.
  std::int64_t jitter_us = 0;
};

struct SampleStreams {
  std::vector<RawTaxelSample> tactile;
  std::vector<ReferenceSample> reference;
};

/// Tactile and reference streams sampled from the profile. With zero jitter
/// both share one time grid.
SampleStreams generate_streams(const ForwardConfig &cfg,
                               const TaxelLayout &layout, int taxel_id,
                               const ForceProfile &profile,
                               const StreamOptions &opts, std::uint64_t seed);

/// Streams merged into synced records (see merge_streams).
std::vector<SyncedRecord>
generate_dataset(const ForwardConfig &cfg, const TaxelLayout &layout,
                 int taxel_id, const ForceProfile &profile,
                 const StreamOptions &opts, std::uint64_t seed,
                 std::int64_t max_skew_us = 5000);

} // namespace tcal
