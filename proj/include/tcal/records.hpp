#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace tcal {

using Vec3 = Eigen::Vector3d;
using Counts = Eigen::Vector3i;

/// Microseconds since the stream epoch.
using TimestampUs = std::int64_t;

/// One digitized reading of a taxel's three Hall channels.
struct RawTaxelSample {
  TimestampUs t_us = 0;
  int taxel_id = 0;
  Counts counts = Counts::Zero();
  /// Deflection clamped at the minimum gap, or an ADC channel saturated.
  bool clamp_flag = false;

  bool operator==(const RawTaxelSample &) const = default;
};

/// Force from the reference sensor. Torques are not carried.
struct ReferenceSample {
  TimestampUs t_us = 0;
  Vec3 force_N = Vec3::Zero();

  bool operator==(const ReferenceSample &) const = default;
};

/// A tactile sample paired with its nearest-in-time reference force.
struct SyncedRecord {
  TimestampUs t_us = 0;
  int taxel_id = 0;
  Counts counts = Counts::Zero();
  Vec3 force_N = Vec3::Zero();
  /// Reference time minus tactile time.
  std::int64_t skew_us = 0;
  bool clamp_flag = false;

  bool operator==(const SyncedRecord &) const = default;
};

} // namespace tcal
