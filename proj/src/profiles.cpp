// Force protocols and synthetic stream generation.

#include <cmath>
#include <string>

#include "io_util.hpp"
#include "tcal/acquisition.hpp"
#include "tcal/error.hpp"
#include "tcal/forward_model.hpp"

namespace tcal {

namespace {

TimestampUs seconds_to_us(double s) {
  return static_cast<TimestampUs>(std::llround(s * 1e6));
}

Rng seeded_rng(std::uint64_t seed, int taxel_id, std::uint32_t stream_tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(taxel_id), stream_tag};
  return Rng(seq);
}

} // namespace

void ForceProfile::validate() const {
  if (segments.empty())
    throw ValidationError("force profile has no segments");
  if (!start_force_N.allFinite())
    throw ValidationError("force profile start force is not finite");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto &s = segments[i];
    if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s) ||
        seconds_to_us(s.duration_s) <= 0)
      throw ValidationError("force profile segment " + std::to_string(i) +
                            " has a non-positive duration");
    if (!s.target_force_N.allFinite())
      throw ValidationError("force profile segment " + std::to_string(i) +
                            " has a non-finite target");
  }
}

TimestampUs ForceProfile::duration_us() const {
  TimestampUs total = 0;
  for (const auto &s : segments)
    total += seconds_to_us(s.duration_s);
  return total;
}

Vec3 ForceProfile::force_at(TimestampUs t_us) const {
  if (segments.empty())
    return start_force_N;
  if (t_us < 0)
    return interpolation == Interpolation::ramp ? start_force_N
                                                : segments.front().target_force_N;
  TimestampUs begin = 0;
  Vec3 prev = start_force_N;
  for (const auto &s : segments) {
    const TimestampUs len = seconds_to_us(s.duration_s);
    if (t_us < begin + len) {
      if (interpolation == Interpolation::hold)
        return s.target_force_N;
      const double a = static_cast<double>(t_us - begin) / static_cast<double>(len);
      return prev + (s.target_force_N - prev) * a;
    }
    begin += len;
    prev = s.target_force_N;
  }
  return segments.back().target_force_N;
}

ForceProfile training_profile() {
  ForceProfile p;
  p.interpolation = Interpolation::ramp;
  auto add = [&](double dur, double fx, double fy, double fz) {
    p.segments.push_back({dur, Vec3(fx, fy, fz)});
  };

  add(2.0, 0, 0, 0);
  for (double peak : {2.0, 4.0, 6.0}) {
    add(3.0, 0, 0, peak);
    add(3.0, 0, 0, 0);
  }

  // Shear sweeps need a held normal load to keep contact.
  constexpr double normal = 3.0;
  const Vec3 directions[] = {-Vec3::UnitX(), Vec3::UnitX(), -Vec3::UnitY(),
                             Vec3::UnitY()};
  for (const Vec3 &dir : directions) {
    add(1.0, 0, 0, normal);
    for (double mag : {1.0, 2.0}) {
      const Vec3 s = dir * mag;
      add(2.0, s.x(), s.y(), normal);
      add(2.0, 0, 0, normal);
    }
    add(1.0, 0, 0, 0);
  }
  return p;
}

ForceProfile test_profile() {
  ForceProfile p;
  p.interpolation = Interpolation::hold;
  constexpr double plateau = 5.0;
  const Vec3 targets[] = {
      {0, 0, 0},    {0, 0, 1.5},  {0, 0, 3.0},    {0, 0, 4.5},
      {-1, 0, 3.0}, {-2, 0, 3.0}, {1.5, 0, 3.0},  {0, 1, 3.0},
      {0, 2, 3.0},  {0, -1.5, 3.0}, {0, 0, 5.5},  {0, 0, 0},
  };
  for (const Vec3 &t : targets)
    p.segments.push_back({plateau, t});
  return p;
}

ForceProfile preset_profile(std::string_view name) {
  if (name == "training")
    return training_profile();
  if (name == "test")
    return test_profile();
  throw ValidationError("unknown profile preset '" + std::string(name) +
                        "' (expected 'training' or 'test')");
}

ForceProfile parse_profile(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text);
  ForceProfile p;
  try {
    const auto interp = doc.value("interpolation", std::string("ramp"));
    if (interp == "ramp")
      p.interpolation = Interpolation::ramp;
    else if (interp == "hold")
      p.interpolation = Interpolation::hold;
    else
      throw ValidationError("unknown interpolation '" + interp + "'");

    if (doc.contains("start_force_N")) {
      const auto &s = doc["start_force_N"];
      if (!s.is_array() || s.size() != 3)
        throw SchemaError("profile: start_force_N must be an array of 3 numbers");
      p.start_force_N = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    }
    const auto &segs = detail::require(doc, "segments", "profile");
    if (!segs.is_array())
      throw SchemaError("profile: 'segments' must be an array");
    for (const auto &s : segs) {
      const auto &f = detail::require(s, "force_N", "profile segment");
      if (!f.is_array() || f.size() != 3)
        throw SchemaError("profile segment: force_N must be an array of 3 numbers");
      p.segments.push_back(
          {detail::require(s, "duration_s", "profile segment").get<double>(),
           Vec3(f[0].get<double>(), f[1].get<double>(), f[2].get<double>())});
    }
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("profile: ") + e.what());
  }
  p.validate();
  return p;
}

ForceProfile load_profile(const std::filesystem::path &path) {
  return parse_profile(detail::read_text_file(path));
}

std::string profile_to_json(const ForceProfile &p) {
  nlohmann::json doc;
  doc["interpolation"] = p.interpolation == Interpolation::ramp ? "ramp" : "hold";
  doc["start_force_N"] = {p.start_force_N.x(), p.start_force_N.y(),
                          p.start_force_N.z()};
  auto &segs = doc["segments"] = nlohmann::json::array();
  for (const auto &s : p.segments)
    segs.push_back({{"duration_s", s.duration_s},
                    {"force_N",
                     {s.target_force_N.x(), s.target_force_N.y(),
                      s.target_force_N.z()}}});
  return doc.dump(2) + "\n";
}

SampleStreams generate_streams(const ForwardConfig &cfg,
                               const TaxelLayout &layout, int taxel_id,
                               const ForceProfile &profile,
                               const StreamOptions &opts, std::uint64_t seed) {
  cfg.validate();
  profile.validate();
  layout.at(taxel_id);
  if (!(opts.rate_hz > 0.0) || !std::isfinite(opts.rate_hz))
    throw ValidationError("sampling rate must be positive");
  const double period_us = 1e6 / opts.rate_hz;
  if (opts.jitter_us < 0 || 2.0 * static_cast<double>(opts.jitter_us) >= period_us)
    throw ValidationError("jitter must be within [0, half the sampling period)");

  const auto n = static_cast<std::size_t>(
      std::floor(static_cast<double>(profile.duration_us()) * opts.rate_hz / 1e6 +
                 1e-9));

  Rng noise_rng = seeded_rng(seed, taxel_id, 1);
  Rng jitter_rng = seeded_rng(seed, taxel_id, 2);
  std::uniform_int_distribution<std::int64_t> jitter(-opts.jitter_us, opts.jitter_us);

  SampleStreams out;
  out.tactile.reserve(n);
  out.reference.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto nominal =
        static_cast<TimestampUs>(std::llround(static_cast<double>(k) * period_us));
    TimestampUs t_tac = nominal;
    TimestampUs t_ref = nominal;
    if (opts.jitter_us > 0) {
      t_tac = std::max<TimestampUs>(0, nominal + jitter(jitter_rng));
      t_ref = std::max<TimestampUs>(0, nominal + jitter(jitter_rng));
    }
    out.tactile.push_back(simulate_sample(cfg, layout, taxel_id,
                                          profile.force_at(t_tac), t_tac, noise_rng)
                              .tactile);
    out.reference.push_back({t_ref, profile.force_at(t_ref)});
  }
  return out;
}

std::vector<SyncedRecord>
generate_dataset(const ForwardConfig &cfg, const TaxelLayout &layout,
                 int taxel_id, const ForceProfile &profile,
                 const StreamOptions &opts, std::uint64_t seed,
                 std::int64_t max_skew_us) {
  const auto streams = generate_streams(cfg, layout, taxel_id, profile, opts, seed);
  return merge_streams(streams.tactile, streams.reference, max_skew_us);
}

} // namespace tcal
