#include <algorithm>
#include <limits>
#include <string>

#include "tcal/acquisition.hpp"
#include "tcal/error.hpp"

namespace tcal {

namespace {

constexpr int kSlotCount = BusTopology::kBusCount * BusTopology::kSensorsPerBus;

int flat_index(BusSlot s) { return s.bus * BusTopology::kSensorsPerBus + s.slot; }

bool in_range(BusSlot s) {
  return s.bus >= 0 && s.bus < BusTopology::kBusCount && s.slot >= 0 &&
         s.slot < BusTopology::kSensorsPerBus;
}

void put_le16(std::uint8_t *p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v & 0xFF);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

std::uint16_t get_le16(const std::uint8_t *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace

BusTopology::BusTopology() {
  std::array<BusSlot, kSlotCount> a;
  for (int i = 0; i < kSlotCount; ++i)
    a[static_cast<std::size_t>(i)] = {i / kSensorsPerBus, i % kSensorsPerBus};
  *this = BusTopology(a);
}

BusTopology::BusTopology(std::array<BusSlot, kSlotCount> assignment)
    : by_taxel_(assignment) {
  by_slot_.fill(-1);
  for (int taxel = 0; taxel < kSlotCount; ++taxel) {
    const BusSlot s = by_taxel_[static_cast<std::size_t>(taxel)];
    if (!in_range(s))
      throw ValidationError("taxel " + std::to_string(taxel) +
                            " assigned to a bus/slot outside 5x4");
    int &owner = by_slot_[static_cast<std::size_t>(flat_index(s))];
    if (owner != -1)
      throw ValidationError("bus " + std::to_string(s.bus) + " slot " +
                            std::to_string(s.slot) + " assigned twice");
    owner = taxel;
  }
}

BusSlot BusTopology::slot_of(int taxel_id) const {
  if (taxel_id < 0 || taxel_id >= kSlotCount)
    throw FrameError(FrameError::Kind::unknown_taxel,
                     "taxel " + std::to_string(taxel_id) + " is not on any bus");
  return by_taxel_[static_cast<std::size_t>(taxel_id)];
}

std::optional<int> BusTopology::taxel_at(BusSlot s) const {
  if (!in_range(s))
    return std::nullopt;
  return by_slot_[static_cast<std::size_t>(flat_index(s))];
}

WireFrame make_frame(std::uint32_t frame_id, std::span<const std::uint8_t> data) {
  if (frame_id > kMaxFrameId)
    throw FrameError(FrameError::Kind::unknown_frame_id,
                     "frame id " + std::to_string(frame_id) + " exceeds 11 bits");
  if (data.size() != 8)
    throw FrameError(FrameError::Kind::malformed_payload,
                     "payload is " + std::to_string(data.size()) +
                         " bytes, expected 8");
  WireFrame f;
  f.frame_id = static_cast<std::uint16_t>(frame_id);
  std::copy(data.begin(), data.end(), f.payload.begin());
  return f;
}

WireFrame encode_frame(const RawTaxelSample &s, const BusTopology &topo) {
  const BusSlot bs = topo.slot_of(s.taxel_id);
  const int group = s.clamp_flag ? 1 : 0;

  WireFrame f;
  f.frame_id = static_cast<std::uint16_t>((bs.bus << 5) | (bs.slot << 2) | group);
  for (int i = 0; i < 3; ++i) {
    const int c = s.counts[i];
    if (c < std::numeric_limits<std::int16_t>::min() ||
        c > std::numeric_limits<std::int16_t>::max())
      throw FrameError(FrameError::Kind::malformed_payload,
                       "count " + std::to_string(c) + " does not fit in 16 bits");
    put_le16(&f.payload[static_cast<std::size_t>(2 * i)],
             static_cast<std::uint16_t>(static_cast<std::int16_t>(c)));
  }
  put_le16(&f.payload[6], static_cast<std::uint16_t>(s.t_us & 0xFFFF));
  return f;
}

TimestampUs unwrap_timestamp(std::uint16_t low16, TimestampUs near_t_us) {
  constexpr TimestampUs kWrap = 1 << 16;
  const TimestampUs base = near_t_us - (near_t_us & (kWrap - 1));
  TimestampUs best = base + low16;
  for (TimestampUs cand : {best - kWrap, best + kWrap}) {
    const auto d_cand = cand > near_t_us ? cand - near_t_us : near_t_us - cand;
    const auto d_best = best > near_t_us ? best - near_t_us : near_t_us - best;
    if (d_cand < d_best)
      best = cand;
  }
  return best;
}

RawTaxelSample decode_frame(const WireFrame &f, const BusTopology &topo,
                            std::optional<TimestampUs> near_t_us) {
  if (f.frame_id > kMaxFrameId)
    throw FrameError(FrameError::Kind::unknown_frame_id,
                     "frame id " + std::to_string(f.frame_id) + " exceeds 11 bits");
  const int group = f.frame_id & 0x3;
  const BusSlot bs{f.frame_id >> 5, (f.frame_id >> 2) & 0x7};
  // bits 2..4 carry the slot; only values 0..3 are legal
  const auto taxel = topo.taxel_at(bs);
  if (!taxel)
    throw FrameError(FrameError::Kind::unknown_frame_id,
                     "frame id " + std::to_string(f.frame_id) +
                         " does not map to a known bus/slot");
  if (group > 1)
    throw FrameError(FrameError::Kind::malformed_payload,
                     "reserved channel group " + std::to_string(group));

  RawTaxelSample s;
  s.taxel_id = *taxel;
  s.clamp_flag = group == 1;
  for (int i = 0; i < 3; ++i)
    s.counts[i] = static_cast<std::int16_t>(
        get_le16(&f.payload[static_cast<std::size_t>(2 * i)]));
  const std::uint16_t ts = get_le16(&f.payload[6]);
  s.t_us = near_t_us ? unwrap_timestamp(ts, *near_t_us) : ts;
  return s;
}

} // namespace tcal
