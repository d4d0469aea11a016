#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <random>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "tcal/acquisition.hpp"
#include "tcal/error.hpp"

using namespace tcal;

namespace {

FrameError::Kind frame_error_kind(auto &&fn) {
  try {
    fn();
  } catch (const FrameError &e) {
    return e.kind();
  }
  FAIL("expected a FrameError");
  return FrameError::Kind::unknown_taxel;
}

std::vector<ReferenceSample> grid_reference(int n, std::int64_t step, std::int64_t offset = 0) {
  std::vector<ReferenceSample> r;
  for (int i = 0; i < n; ++i)
    r.push_back({i * step + offset, Vec3(i, -i, 0.5 * i)});
  return r;
}

std::vector<RawTaxelSample> grid_tactile(int n, std::int64_t step, std::int64_t offset = 0) {
  std::vector<RawTaxelSample> t;
  for (int i = 0; i < n; ++i)
    t.push_back({i * step + offset, 11, Counts(i, 2 * i, -i), i % 7 == 0});
  return t;
}

} // namespace

TEST_CASE("topology: default assignment is 4 sensors on each of 5 lines") {
  const BusTopology t;
  CHECK(t.slot_of(0) == BusSlot{0, 0});
  CHECK(t.slot_of(11) == BusSlot{2, 3});
  CHECK(t.slot_of(19) == BusSlot{4, 3});
  for (int id = 0; id < 20; ++id)
    CHECK(t.taxel_at(t.slot_of(id)) == id);
  CHECK_FALSE(t.taxel_at({5, 0}).has_value());
  CHECK(frame_error_kind([&] { t.slot_of(20); }) == FrameError::Kind::unknown_taxel);
}

TEST_CASE("topology: non-bijective assignment is rejected") {
  std::array<BusSlot, 20> a;
  for (int i = 0; i < 20; ++i)
    a[i] = {i / 4, i % 4};
  std::swap(a[3], a[17]);
  CHECK_NOTHROW(BusTopology{a});
  a[5] = a[6];
  CHECK_THROWS_AS(BusTopology{a}, ValidationError);
  a[5] = {0, 4};
  CHECK_THROWS_AS(BusTopology{a}, ValidationError);
}

TEST_CASE("encode_frame: byte layout") {
  const BusTopology topo;
  const RawTaxelSample s{0x12345, 11, Counts(-1, 1, 32767), false};
  const WireFrame f = encode_frame(s, topo);
  CHECK(f.frame_id == ((2 << 5) | (3 << 2) | 0));
  const std::array<std::uint8_t, 8> expected{0xFF, 0xFF, 0x01, 0x00, 0xFF, 0x7F, 0x45, 0x23};
  CHECK(f.payload == expected);

  const WireFrame g = encode_frame({0, 0, Counts::Zero(), true}, topo);
  CHECK(g.frame_id == 1);
}

TEST_CASE("encode/decode round trip over random samples") {
  const BusTopology topo;
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> count(-32767, 32767);
  std::uniform_int_distribution<int> taxel(0, 19);
  std::uniform_int_distribution<std::int64_t> time(0, 1'000'000'000);
  for (int i = 0; i < 10000; ++i) {
    const RawTaxelSample s{time(rng), taxel(rng),
                           Counts(count(rng), count(rng), count(rng)), (i & 1) != 0};
    const WireFrame f = encode_frame(s, topo);
    REQUIRE(f.frame_id <= kMaxFrameId);
    const RawTaxelSample back = decode_frame(f, topo, s.t_us + (i % 30000) - 15000);
    REQUIRE(back == s);
    REQUIRE(decode_frame(f, topo).t_us == (s.t_us & 0xFFFF));
  }
}

TEST_CASE("decode_frame: malformed input") {
  const BusTopology topo;
  const std::array<std::uint8_t, 8> eight{};
  const std::array<std::uint8_t, 7> seven{};
  CHECK(frame_error_kind([&] { make_frame(0x800, eight); }) ==
        FrameError::Kind::unknown_frame_id);
  CHECK(frame_error_kind([&] { make_frame(0x10, seven); }) ==
        FrameError::Kind::malformed_payload);
  // bus 7 does not exist
  CHECK(frame_error_kind([&] { decode_frame(make_frame(7u << 5, eight), topo); }) ==
        FrameError::Kind::unknown_frame_id);
  // slot 5 does not exist
  CHECK(frame_error_kind([&] { decode_frame(make_frame(5u << 2, eight), topo); }) ==
        FrameError::Kind::unknown_frame_id);
  // reserved group
  CHECK(frame_error_kind([&] { decode_frame(make_frame(2u, eight), topo); }) ==
        FrameError::Kind::malformed_payload);
  CHECK_NOTHROW(decode_frame(make_frame(1u, eight), topo));
}

TEST_CASE("unwrap_timestamp picks the nearest candidate") {
  CHECK(unwrap_timestamp(0x0010, 0x10000) == 0x10010);
  CHECK(unwrap_timestamp(0xFFF0, 0x10000) == 0x0FFF0);
  CHECK(unwrap_timestamp(0x1234, 0) == 0x1234);
  CHECK(unwrap_timestamp(0xFFFF, 0) == -1);
}

TEST_CASE("merge: aligned streams pair one to one with zero skew") {
  const auto tac = grid_tactile(100, 10000);
  const auto ref = grid_reference(100, 10000);
  const auto m = merge_streams(tac, ref);
  REQUIRE(m.size() == 100);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m[i].skew_us == 0);
    CHECK(m[i].force_N == ref[i].force_N);
    CHECK(m[i].counts == tac[i].counts);
    CHECK(m[i].clamp_flag == tac[i].clamp_flag);
  }
}

TEST_CASE("merge: a constant 3 ms offset becomes a 3 ms skew") {
  const auto tac = grid_tactile(50, 10000);
  const auto ref = grid_reference(50, 10000, 3000);
  const auto m = merge_streams(tac, ref);
  REQUIRE(m.size() == 50);
  for (const auto &r : m)
    CHECK(r.skew_us == 3000);
  CHECK(merge_streams(tac, ref, 2999).empty());
}

TEST_CASE("merge: tie goes to the earlier reference sample") {
  const std::vector<RawTaxelSample> tac{{5000, 11, Counts::Zero(), false}};
  const std::vector<ReferenceSample> ref{{0, Vec3(1, 0, 0)}, {10000, Vec3(2, 0, 0)}};
  const auto m = merge_streams(tac, ref);
  REQUIRE(m.size() == 1);
  CHECK(m[0].force_N.x() == 1.0);
  CHECK(m[0].skew_us == -5000);
}

TEST_CASE("merge: empty inputs") {
  const auto tac = grid_tactile(3, 10);
  CHECK(merge_streams(tac, {}).empty());
  CHECK(merge_streams({}, grid_reference(3, 10)).empty());
}

TEST_CASE("merge agrees with an exhaustive pairing on jittered streams") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> len(0, 80);
    std::uniform_int_distribution<std::int64_t> gap(0, 12000);
    std::uniform_int_distribution<std::int64_t> skew(0, 8000);
    std::vector<RawTaxelSample> tac;
    std::vector<ReferenceSample> ref;
    std::int64_t t = gap(rng);
    for (int i = len(rng); i > 0; --i, t += gap(rng))
      tac.push_back({t, 11, Counts(i, 0, 0), false});
    t = gap(rng);
    for (int i = len(rng); i > 0; --i, t += gap(rng))
      ref.push_back({t, Vec3(i, trial, 0)});
    const std::int64_t max_skew = skew(rng);
    REQUIRE(merge_streams(tac, ref, max_skew) ==
            oracle::brute_force_pairing(tac, ref, max_skew));
  }
}

TEST_CASE("merge: unsorted input names the stream and index") {
  auto tac = grid_tactile(10, 100);
  std::swap(tac[4], tac[5]);
  try {
    merge_streams(tac, grid_reference(10, 100));
    FAIL("expected UnsortedStreamError");
  } catch (const UnsortedStreamError &e) {
    CHECK(e.stream() == "tactile");
    CHECK(e.index() == 5);
  }
  auto ref = grid_reference(10, 100);
  std::swap(ref[1], ref[2]);
  CHECK_THROWS_AS(merge_streams(grid_tactile(10, 100), ref), UnsortedStreamError);
}

TEST_CASE("StreamMerger with concurrent producers matches the batch merge") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::int64_t> jit(-3000, 3000);
  std::vector<RawTaxelSample> tac;
  std::vector<ReferenceSample> ref;
  for (int i = 0; i < 5000; ++i) {
    tac.push_back({i * 10000 + jit(rng), 11, Counts(i, 0, 0), false});
    ref.push_back({i * 10000 + jit(rng), Vec3(i, 0, 0)});
  }
  const auto expected = merge_streams(tac, ref, 4000);

  StreamMerger merger(4000);
  std::vector<SyncedRecord> got;
  std::atomic<int> finished{0};
  std::thread a([&] {
    for (const auto &s : tac)
      merger.push_tactile(s);
    ++finished;
  });
  std::thread b([&] {
    for (const auto &s : ref)
      merger.push_reference(s);
    merger.close_reference();
    ++finished;
  });
  while (finished.load() < 2) {
    auto part = merger.drain();
    got.insert(got.end(), part.begin(), part.end());
    std::this_thread::yield();
  }
  a.join();
  b.join();
  auto rest = merger.drain();
  got.insert(got.end(), rest.begin(), rest.end());
  CHECK(got == expected);
}

TEST_CASE("StreamMerger rejects out-of-order pushes") {
  StreamMerger m;
  m.push_tactile({10, 11, Counts::Zero(), false});
  CHECK_THROWS_AS(m.push_tactile({5, 11, Counts::Zero(), false}), UnsortedStreamError);
  m.push_reference({10, Vec3::Zero()});
  CHECK_THROWS_AS(m.push_reference({9, Vec3::Zero()}), UnsortedStreamError);
}

TEST_CASE("log: header-only file reads as empty") {
  std::stringstream ss;
  write_log({}, ss);
  CHECK(ss.str() == "#tcal-log v1\nt_us,taxel,cx,cy,cz,fx,fy,fz,skew_us,clamp\n");
  CHECK(read_log(ss).empty());
}

TEST_CASE("log: single row has ten columns") {
  const std::vector<SyncedRecord> one{{1500, 11, Counts(-3, 4, -2315), Vec3(0.25, -1, 3), -200, true}};
  std::stringstream ss;
  write_log(one, ss);
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  std::getline(ss, line);
  CHECK(line == "1500,11,-3,4,-2315,0.25,-1,3,-200,1");
  CHECK(std::count(line.begin(), line.end(), ',') == 9);
  ss.clear();
  ss.seekg(0);
  CHECK(read_log(ss) == one);
}

TEST_CASE("log: write/read/write is byte identical and lossless") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> f(-10.0, 10.0);
  std::uniform_int_distribution<int> c(-32767, 32767);
  std::vector<SyncedRecord> recs;
  for (int i = 0; i < 100000; ++i)
    recs.push_back({i * 10000LL, i % 20, Counts(c(rng), c(rng), c(rng)),
                    Vec3(f(rng), f(rng), f(rng)), c(rng) % 5000, (i % 3) == 0});
  std::stringstream a;
  write_log(recs, a);
  const auto back = read_log(a);
  CHECK(back == recs);
  std::stringstream b;
  write_log(back, b);
  CHECK(a.str() == b.str());

  const auto path = std::filesystem::temp_directory_path() / "tcal_log_roundtrip.csv";
  write_log(recs, path);
  CHECK(read_log(path) == recs);
  std::filesystem::remove(path);
}

TEST_CASE("log: schema and parse errors") {
  {
    std::stringstream ss("#tcal-log v2\nt_us,taxel,cx,cy,cz,fx,fy,fz,skew_us,clamp\n");
    CHECK_THROWS_AS(read_log(ss), SchemaError);
  }
  {
    std::stringstream ss("#tcal-log v1\nt_us,taxel,cx,cy,cz,fx,fy,fz,clamp\n");
    CHECK_THROWS_AS(read_log(ss), SchemaError);
  }
  {
    std::stringstream ss("#tcal-log v1\nt_us,taxel,cx,cy,cz,fx,fy,fz,skew_us,clamp\n"
                         "0,11,0,0,0,0,0,0,0,0\n0,11,0,0,0,zero,0,0,0,0\n");
    try {
      read_log(ss);
      FAIL("expected ParseError");
    } catch (const ParseError &e) {
      CHECK(e.line() == 4);
    }
  }
  {
    std::stringstream ss("#tcal-log v1\nt_us,taxel,cx,cy,cz,fx,fy,fz,skew_us,clamp\n"
                         "0,11,0,0,0,0,0,0,0\n");
    CHECK_THROWS_AS(read_log(ss), ParseError);
  }
  {
    std::stringstream ss("#tcal-log v1\nt_us,taxel,cx,cy,cz,fx,fy,fz,skew_us,clamp\n"
                         "0,11,0,0,0,0,0,0,0,2\n");
    CHECK_THROWS_AS(read_log(ss), ParseError);
  }
  CHECK_THROWS_AS(read_log(std::filesystem::path("/nonexistent/x.csv")), IoError);
}
