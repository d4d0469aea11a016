#include <doctest.h>

#include <random>
#include <string>

#include <json.hpp>

#include "tcal/error.hpp"
#include "tcal/geometry.hpp"

using namespace tcal;

namespace {

nlohmann::json default_doc() { return nlohmann::json::parse(layout_to_json(default_layout())); }

std::string error_of(const std::string &text) {
  try {
    parse_layout(text);
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

double orthonormality_error(const Eigen::Matrix3d &r) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Vec3 random_unit(std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do {
    v = {g(rng), g(rng), g(rng)};
  } while (v.norm() < 1e-6);
  return v.normalized();
}

} // namespace

TEST_CASE("bundled layout file loads with 20 taxels and matches the built-in default") {
  const TaxelLayout file = load_layout(TCAL_DATA_DIR "/default_layout.json");
  const TaxelLayout builtin = default_layout();
  REQUIRE(file.taxels().size() == 20);
  for (int id = 0; id < kTaxelCount; ++id) {
    CHECK(file.at(id).id == id);
    CHECK((file.at(id).position_mm - builtin.at(id).position_mm).norm() < 1e-12);
    CHECK((file.at(id).normal - builtin.at(id).normal).norm() < 1e-12);
    CHECK(file.at(id).region == builtin.at(id).region);
  }
}

TEST_CASE("default layout: 12 palmar, 4 per lateral side, shell dimensions") {
  const TaxelLayout l = default_layout();
  int palmar = 0, left = 0, right = 0;
  for (const auto &t : l.taxels()) {
    palmar += t.region == Region::palmar;
    left += t.region == Region::lateral_left;
    right += t.region == Region::lateral_right;
    CHECK(l.shell().contains(t.position_mm));
    CHECK(std::abs(t.normal.norm() - 1.0) < 1e-9);
  }
  CHECK(palmar == 12);
  CHECK(left == 4);
  CHECK(right == 4);
  CHECK(l.shell().length_mm == 39.0);
  CHECK(l.shell().width_mm == 27.0);
  CHECK(l.shell().height_mm == 26.0);
  // the calibration taxel sits on the flat pad
  CHECK((l.at(11).normal - Vec3(0, 0, -1)).norm() < 1e-12);
}

TEST_CASE("load_layout rejects a file with 19 taxels") {
  auto doc = default_doc();
  doc["taxels"].erase(doc["taxels"].size() - 1);
  CHECK(error_of(doc.dump()).find("expected 20 taxels") != std::string::npos);
  CHECK_THROWS_AS(parse_layout(doc.dump()), ValidationError);
}

TEST_CASE("load_layout rejects a non-unit normal such as (0,0,2)") {
  auto doc = default_doc();
  doc["taxels"][3]["normal"] = {0.0, 0.0, 2.0};
  CHECK_THROWS_AS(parse_layout(doc.dump()), ValidationError);
  CHECK(error_of(doc.dump()).find("not unit length") != std::string::npos);
}

TEST_CASE("load_layout normalizes normals within 1e-6 of unit length") {
  auto doc = default_doc();
  doc["taxels"][5]["normal"] = {0.0, 0.0, 1.0 + 5e-7};
  const auto l = parse_layout(doc.dump());
  CHECK(std::abs(l.at(5).normal.norm() - 1.0) < 1e-12);
}

TEST_CASE("load_layout rejects duplicate ids, bad regions and escaping positions") {
  SUBCASE("duplicate id") {
    auto doc = default_doc();
    doc["taxels"][4]["id"] = 7;
    CHECK(error_of(doc.dump()).find("duplicate taxel id 7") != std::string::npos);
  }
  SUBCASE("unknown region") {
    auto doc = default_doc();
    doc["taxels"][0]["region"] = "dorsal";
    CHECK_THROWS_AS(parse_layout(doc.dump()), ValidationError);
  }
  SUBCASE("outside shell") {
    auto doc = default_doc();
    doc["taxels"][2]["position_mm"] = {40.0, 0.0, 0.0};
    CHECK(error_of(doc.dump()).find("outside the shell") != std::string::npos);
  }
  SUBCASE("non-positive shell") {
    auto doc = default_doc();
    doc["shell"]["width_mm"] = 0.0;
    CHECK_THROWS_AS(parse_layout(doc.dump()), ValidationError);
  }
  SUBCASE("missing field") {
    auto doc = default_doc();
    doc["taxels"][1].erase("normal");
    CHECK_THROWS_AS(parse_layout(doc.dump()), SchemaError);
  }
}

TEST_CASE("parse errors report the line number") {
  const std::string text = "{\n  \"shell\": {\n    \"length_mm\": 39,\n    oops\n  }\n}\n";
  try {
    parse_layout(text);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).rfind("line 4", 0) == 0);
  }
}

TEST_CASE("missing layout file is an I/O error") {
  CHECK_THROWS_AS(load_layout("/nonexistent/layout.json"), IoError);
}

TEST_CASE("every accepted mutation of the layout file satisfies the layout invariants") {
  // Randomly perturb ids, normals, positions and counts; whatever loads must
  // be a valid layout.
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick(0, 19);
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_real_distribution<double> jitter(-1e-6, 1e-6);
  int accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto doc = default_doc();
    auto &t = doc["taxels"];
    const int i = pick(rng);
    switch (kind(rng)) {
    case 0: t[i]["id"] = pick(rng); break;
    case 1: t[i]["normal"][0] = t[i]["normal"][0].get<double>() + jitter(rng) * 3; break;
    case 2: t[i]["position_mm"][1] = t[i]["position_mm"][1].get<double>() * 1.5; break;
    case 3: t.erase(static_cast<std::size_t>(i)); break;
    default: std::swap(t[i], t[pick(rng)]); break;
    }
    try {
      const auto l = parse_layout(doc.dump());
      ++accepted;
      REQUIRE(l.taxels().size() == 20);
      for (int id = 0; id < 20; ++id) {
        CHECK(l.taxels()[static_cast<std::size_t>(id)].id == id);
        CHECK(std::abs(l.at(id).normal.norm() - 1.0) < 1e-9);
        CHECK(l.shell().contains(l.at(id).position_mm));
      }
    } catch (const Error &) {
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("taxel_frame: identity for normal +Z at the origin") {
  TaxelPose p{0, Vec3::Zero(), Vec3::UnitZ(), Region::tip};
  const TaxelFrame f = frame_from_pose(p);
  CHECK((f.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.origin_mm.isZero());
}

TEST_CASE("taxel_frame: normal +Y maps local Z onto +Y") {
  TaxelPose p{0, Vec3(1, 2, 3), Vec3::UnitY(), Region::lateral_right};
  const TaxelFrame f = frame_from_pose(p);
  CHECK((f.rotation * Vec3::UnitZ() - Vec3::UnitY()).norm() < 1e-15);
  CHECK((f.rotation.col(0) - Vec3::UnitX()).norm() < 1e-15);
  CHECK((f.to_local(Vec3(1, 2, 3))).norm() < 1e-15);
}

TEST_CASE("taxel_frame: normal along the long axis falls back to the width axis") {
  TaxelPose p{0, Vec3::Zero(), Vec3::UnitX(), Region::tip};
  const TaxelFrame f = frame_from_pose(p);
  CHECK((f.rotation.col(0) - Vec3::UnitY()).norm() < 1e-15);
  CHECK(orthonormality_error(f.rotation) < 1e-12);
  CHECK(f.rotation.determinant() == doctest::Approx(1.0));
}

TEST_CASE("taxel_frame: random unit normals give orthonormal right-handed frames") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 n = random_unit(rng);
    const TaxelFrame f = frame_from_pose({0, Vec3::Zero(), n, Region::palmar});
    REQUIRE(orthonormality_error(f.rotation) < 1e-9);
    REQUIRE((f.rotation * Vec3::UnitZ() - n).norm() < 1e-12);
    REQUIRE(f.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int id = 0; id < kTaxelCount; ++id)
    CHECK(orthonormality_error(taxel_frame(default_layout(), id).rotation) < 1e-9);
}

TEST_CASE("taxel_frame round trip and unknown id") {
  const auto l = default_layout();
  const TaxelFrame f = taxel_frame(l, 3);
  const Vec3 p(1.5, -2.0, 0.25);
  CHECK((f.to_shell(f.to_local(p)) - p).norm() < 1e-12);
  CHECK_THROWS_AS(taxel_frame(l, 20), ValidationError);
  CHECK_THROWS_AS(taxel_frame(l, -1), ValidationError);
}

TEST_CASE("nearest_taxel: exact position and tie-break by lowest id") {
  const auto l = default_layout();
  CHECK(nearest_taxel(l, l.at(11).position_mm) == 11);

  // taxels 3 and 7 mirrored about the origin on the x axis, others far away
  std::vector<TaxelPose> poses;
  for (int id = 0; id < kTaxelCount; ++id)
    poses.push_back({id, Vec3(0, -10.0 + id, 10.0), Vec3::UnitZ(), Region::palmar});
  poses[3].position_mm = Vec3(-2, 0, 0);
  poses[7].position_mm = Vec3(2, 0, 0);
  const TaxelLayout custom(FingertipShell{}, poses);
  CHECK(nearest_taxel(custom, Vec3::Zero()) == 3);
  CHECK(nearest_taxel(custom, Vec3(0, 0.5, -1)) == 3);
}

TEST_CASE("nearest_taxel agrees with an exhaustive distance scan") {
  const auto l = default_layout();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-25.0, 25.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 q(u(rng), u(rng), u(rng));
    int best = 0;
    double best_d = 1e300;
    for (int id = 0; id < kTaxelCount; ++id) {
      const Vec3 d = l.at(id).position_mm - q;
      const double dist = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
      if (dist < best_d) {
        best_d = dist;
        best = id;
      }
    }
    CHECK(nearest_taxel(l, q) == best);
  }
}

TEST_CASE("bump geometry invariants") {
  BumpGeometry g;
  CHECK(g.air_gap_mm == 1.2);
  CHECK(g.bump_diameter_mm == 3.1);
  CHECK(g.skin_thickness_mm == 0.3);
  CHECK_NOTHROW(g.validate());
  g.air_gap_mm = 0.0;
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g = {};
  g.skin_thickness_mm = 3.2;
  CHECK_THROWS_AS(g.validate(), ValidationError);
}
