#pragma once

// Bus topology, wire framing, stream synchronization and the tcal-log format.

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tcal/records.hpp"

namespace tcal {

struct BusSlot {
  int bus = 0;
  int slot = 0;
  bool operator==(const BusSlot &) const = default;
};

/// 20 Hall sensors shared out over 5 I2C data lines, 4 per line.
class BusTopology {
public:
  static constexpr int kBusCount = 5;
  static constexpr int kSensorsPerBus = 4;

  /// taxel i -> (i / 4, i % 4).
  BusTopology();
  /// `assignment[taxel]`; throws ValidationError unless it is a bijection
  /// onto {0..4} x {0..3}.
  explicit BusTopology(std::array<BusSlot, kBusCount * kSensorsPerBus> assignment);

  BusSlot slot_of(int taxel_id) const;
  std::optional<int> taxel_at(BusSlot s) const;

private:
  std::array<BusSlot, kBusCount * kSensorsPerBus> by_taxel_;
  std::array<int, kBusCount * kSensorsPerBus> by_slot_;
};

/// 11-bit identifier + 8 data bytes.
///
///   id      = bus << 5 | slot << 2 | group
///   group   = 0 XYZ counts, 1 XYZ counts with clamp flag, 2..3 reserved
///   payload = cx, cy, cz as little-endian int16, then the low 16 bits of
///             t_us, little-endian
struct WireFrame {
  std::uint16_t frame_id = 0;
  std::array<std::uint8_t, 8> payload{};

  bool operator==(const WireFrame &) const = default;
};

inline constexpr std::uint16_t kMaxFrameId = 0x7FF;

/// Frame from a raw identifier and data bytes as received off the bus.
/// Throws FrameError if the id exceeds 11 bits or the payload is not 8 bytes.
WireFrame make_frame(std::uint32_t frame_id, std::span<const std::uint8_t> data);

WireFrame encode_frame(const RawTaxelSample &s, const BusTopology &topo);

/// Inverse of encode_frame. The timestamp comes back as its low 16 bits, or,
/// when `near_t_us` is given, as the value closest to it with those bits.
RawTaxelSample decode_frame(const WireFrame &f, const BusTopology &topo,
                            std::optional<TimestampUs> near_t_us = std::nullopt);

/// Closest timestamp to `near_t_us` whose low 16 bits equal `low16`.
TimestampUs unwrap_timestamp(std::uint16_t low16, TimestampUs near_t_us);

inline constexpr std::int64_t kDefaultMaxSkewUs = 5000;

/// Pairs each tactile sample with the reference sample of smallest |dt|
/// (lowest index on ties) and drops pairs beyond `max_skew_us`. Reference
/// samples may be reused. Output follows tactile order.
std::vector<SyncedRecord> merge_streams(std::span<const RawTaxelSample> tactile,
                                        std::span<const ReferenceSample> reference,
                                        std::int64_t max_skew_us = kDefaultMaxSkewUs);

/// Incremental form of merge_streams. Producers may push from separate
/// threads; a single consumer drains finished records in tactile order.
class StreamMerger {
public:
  explicit StreamMerger(std::int64_t max_skew_us = kDefaultMaxSkewUs);

  /// Throws UnsortedStreamError if `s` is earlier than the previous push.
  void push_tactile(const RawTaxelSample &s);
  void push_reference(const ReferenceSample &s);
  /// No more reference samples will arrive.
  void close_reference();

  /// Records whose pairing can no longer change.
  std::vector<SyncedRecord> drain();

private:
  void resolve_locked();

  std::mutex mu_;
  std::int64_t max_skew_us_;
  std::deque<RawTaxelSample> pending_;
  /// Strictly increasing in time; later duplicates can never win a tie.
  std::deque<ReferenceSample> refs_;
  std::vector<SyncedRecord> ready_;
  std::size_t tactile_count_ = 0;
  std::size_t reference_count_ = 0;
  std::optional<TimestampUs> last_tactile_t_;
  std::optional<TimestampUs> last_reference_t_;
  bool reference_closed_ = false;
};

// ---------------------------------------------------------------------------
// tcal-log: CSV with a versioned header line
//
//   #tcal-log v1
//   t_us,taxel,cx,cy,cz,fx,fy,fz,skew_us,clamp

inline constexpr std::string_view kLogMagic = "#tcal-log v1";
inline constexpr std::string_view kLogColumns =
    "t_us,taxel,cx,cy,cz,fx,fy,fz,skew_us,clamp";

void write_log(std::span<const SyncedRecord> records, std::ostream &out);
void write_log(std::span<const SyncedRecord> records,
               const std::filesystem::path &path);
std::vector<SyncedRecord> read_log(std::istream &in);
std::vector<SyncedRecord> read_log(const std::filesystem::path &path);

} // namespace tcal
