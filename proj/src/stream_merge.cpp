#include <cstdlib>

#include "tcal/acquisition.hpp"
#include "tcal/error.hpp"

namespace tcal {

StreamMerger::StreamMerger(std::int64_t max_skew_us) : max_skew_us_(max_skew_us) {
  if (max_skew_us < 0)
    throw ValidationError("max_skew_us must be non-negative");
}

void StreamMerger::push_tactile(const RawTaxelSample &s) {
  std::lock_guard lock(mu_);
  if (last_tactile_t_ && s.t_us < *last_tactile_t_)
    throw UnsortedStreamError("tactile", tactile_count_);
  last_tactile_t_ = s.t_us;
  ++tactile_count_;
  pending_.push_back(s);
  resolve_locked();
}

void StreamMerger::push_reference(const ReferenceSample &s) {
  std::lock_guard lock(mu_);
  if (reference_closed_)
    throw Error("reference stream already closed");
  if (last_reference_t_ && s.t_us < *last_reference_t_)
    throw UnsortedStreamError("reference", reference_count_);
  ++reference_count_;
  const bool duplicate = last_reference_t_ && s.t_us == *last_reference_t_;
  last_reference_t_ = s.t_us;
  if (!duplicate) {
    refs_.push_back(s);
    resolve_locked();
  }
}

void StreamMerger::close_reference() {
  std::lock_guard lock(mu_);
  reference_closed_ = true;
  resolve_locked();
}

std::vector<SyncedRecord> StreamMerger::drain() {
  std::lock_guard lock(mu_);
  resolve_locked();
  std::vector<SyncedRecord> out;
  out.swap(ready_);
  return out;
}

void StreamMerger::resolve_locked() {
  while (!pending_.empty()) {
    const RawTaxelSample &tac = pending_.front();
    const TimestampUs t = tac.t_us;

    // Tactile times never decrease, so a reference followed by one that is
    // already no later than t can never be nearest again.
    while (refs_.size() >= 2 && refs_[1].t_us <= t)
      refs_.pop_front();

    const ReferenceSample *best = nullptr;
    if (refs_.empty()) {
      if (!reference_closed_)
        return;
    } else if (refs_[0].t_us >= t) {
      best = &refs_[0];
    } else if (refs_.size() >= 2) {
      best = (t - refs_[0].t_us) <= (refs_[1].t_us - t) ? &refs_[0] : &refs_[1];
    } else if (reference_closed_) {
      best = &refs_[0];
    } else {
      return;
    }

    if (best) {
      const std::int64_t skew = best->t_us - t;
      if (std::llabs(skew) <= max_skew_us_)
        ready_.push_back(
            {t, tac.taxel_id, tac.counts, best->force_N, skew, tac.clamp_flag});
    }
    pending_.pop_front();
  }
}

std::vector<SyncedRecord> merge_streams(std::span<const RawTaxelSample> tactile,
                                        std::span<const ReferenceSample> reference,
                                        std::int64_t max_skew_us) {
  StreamMerger merger(max_skew_us);
  for (const auto &r : reference)
    merger.push_reference(r);
  merger.close_reference();
  for (const auto &s : tactile)
    merger.push_tactile(s);
  return merger.drain();
}

} // namespace tcal
