#include "tcal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "io_util.hpp"
#include "tcal/error.hpp"

namespace tcal {

namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kLoadNormalizeTolerance = 1e-6;

std::string vec_str(const Vec3 &v) {
  return "(" + detail::format_double(v.x()) + ", " +
         detail::format_double(v.y()) + ", " + detail::format_double(v.z()) +
         ")";
}

Vec3 parse_vec3(const nlohmann::json &j, std::string_view context) {
  if (!j.is_array() || j.size() != 3)
    throw SchemaError(std::string(context) + ": expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number())
      throw SchemaError(std::string(context) + ": expected a number");
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

} // namespace

bool FingertipShell::contains(const Vec3 &p, double tol_mm) const {
  const Vec3 h = half_extents();
  return (p.cwiseAbs().array() <= h.array() + tol_mm).all();
}

std::string_view to_string(Region r) {
  switch (r) {
  case Region::palmar:
    return "palmar";
  case Region::lateral_left:
    return "lateral_left";
  case Region::lateral_right:
    return "lateral_right";
  case Region::tip:
    return "tip";
  }
  return "palmar";
}

Region region_from_string(std::string_view name) {
  for (Region r : {Region::palmar, Region::lateral_left, Region::lateral_right,
                   Region::tip})
    if (to_string(r) == name)
      return r;
  throw ValidationError("unknown region '" + std::string(name) + "'");
}

void BumpGeometry::validate() const {
  if (!(air_gap_mm > 0.0))
    throw ValidationError("air_gap_mm must be positive");
  if (!(bump_diameter_mm > 0.0))
    throw ValidationError("bump_diameter_mm must be positive");
  if (!(skin_thickness_mm >= 0.0 && skin_thickness_mm < bump_diameter_mm))
    throw ValidationError(
        "skin_thickness_mm must be non-negative and below bump_diameter_mm");
}

TaxelLayout::TaxelLayout(FingertipShell shell, std::vector<TaxelPose> taxels)
    : shell_(shell), taxels_(std::move(taxels)) {
  if (!(shell_.length_mm > 0 && shell_.width_mm > 0 && shell_.height_mm > 0))
    throw ValidationError("shell dimensions must be strictly positive");
  if (taxels_.size() != kTaxelCount)
    throw ValidationError("expected " + std::to_string(kTaxelCount) +
                          " taxels, found " + std::to_string(taxels_.size()));

  std::array<bool, kTaxelCount> seen{};
  for (const auto &t : taxels_) {
    if (t.id < 0 || t.id >= kTaxelCount)
      throw ValidationError("taxel id " + std::to_string(t.id) +
                            " outside 0.." + std::to_string(kTaxelCount - 1));
    if (seen[static_cast<std::size_t>(t.id)])
      throw ValidationError("duplicate taxel id " + std::to_string(t.id));
    seen[static_cast<std::size_t>(t.id)] = true;
    if (!t.position_mm.allFinite() || !shell_.contains(t.position_mm))
      throw ValidationError("taxel " + std::to_string(t.id) + " position " +
                            vec_str(t.position_mm) + " is outside the shell");
    if (!t.normal.allFinite() ||
        std::abs(t.normal.norm() - 1.0) > kUnitTolerance)
      throw ValidationError("taxel " + std::to_string(t.id) + " normal " +
                            vec_str(t.normal) + " is not unit length");
  }
  std::sort(taxels_.begin(), taxels_.end(),
            [](const TaxelPose &a, const TaxelPose &b) { return a.id < b.id; });
}

const TaxelPose &TaxelLayout::at(int id) const {
  if (!has(id))
    throw ValidationError("unknown taxel id " + std::to_string(id));
  return taxels_[static_cast<std::size_t>(id)];
}

TaxelLayout default_layout() {
  std::vector<TaxelPose> taxels;
  taxels.reserve(kTaxelCount);

  // Palmar arc: three stations on the ellipse x = 19.5 cos t, z = 13 sin t at
  // t = -30, -60, -90 degrees, four taxels across the width at each station.
  struct Station {
    double x, z, nx, nz;
  };
  constexpr Station stations[] = {
      {16.887, -6.5, 0.755929, -0.654654},
      {9.75, -11.258, 0.359211, -0.933257},
      {0.0, -13.0, 0.0, -1.0},
  };
  constexpr double across[] = {-9.0, -3.0, 3.0, 9.0};
  int id = 0;
  for (const auto &s : stations)
    for (double y : across)
      taxels.push_back({id++, Vec3(s.x, y, s.z),
                        Vec3(s.nx, 0.0, s.nz).normalized(), Region::palmar});

  constexpr double side[][2] = {{-4.0, -5.0}, {6.0, -5.0}, {-4.0, 3.0}, {6.0, 3.0}};
  for (const auto &xz : side)
    taxels.push_back({id++, Vec3(xz[0], -13.5, xz[1]), Vec3(0, -1, 0),
                      Region::lateral_left});
  for (const auto &xz : side)
    taxels.push_back({id++, Vec3(xz[0], 13.5, xz[1]), Vec3(0, 1, 0),
                      Region::lateral_right});

  return TaxelLayout(FingertipShell{}, std::move(taxels));
}

TaxelLayout parse_layout(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text);
  try {
    const auto &js = detail::require(doc, "shell", "layout");
    FingertipShell shell{
        detail::require(js, "length_mm", "shell").get<double>(),
        detail::require(js, "width_mm", "shell").get<double>(),
        detail::require(js, "height_mm", "shell").get<double>()};

    const auto &jt = detail::require(doc, "taxels", "layout");
    if (!jt.is_array())
      throw SchemaError("layout: 'taxels' must be an array");

    std::vector<TaxelPose> taxels;
    for (const auto &e : jt) {
      TaxelPose p;
      p.id = detail::require(e, "id", "taxel").get<int>();
      const std::string ctx = "taxel " + std::to_string(p.id);
      p.position_mm = parse_vec3(detail::require(e, "position_mm", ctx), ctx);
      Vec3 n = parse_vec3(detail::require(e, "normal", ctx), ctx);
      const double norm = n.norm();
      if (!(std::abs(norm - 1.0) <= kLoadNormalizeTolerance))
        throw ValidationError(ctx + " normal " + vec_str(n) +
                              " is not unit length (|n| = " +
                              detail::format_double(norm) + ")");
      p.normal = n / norm;
      p.region =
          region_from_string(detail::require(e, "region", ctx).get<std::string>());
      taxels.push_back(p);
    }
    return TaxelLayout(shell, std::move(taxels));
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("layout: ") + e.what());
  }
}

TaxelLayout load_layout(const std::filesystem::path &path) {
  return parse_layout(detail::read_text_file(path));
}

std::string layout_to_json(const TaxelLayout &layout) {
  nlohmann::json doc;
  doc["shell"] = {{"length_mm", layout.shell().length_mm},
                  {"width_mm", layout.shell().width_mm},
                  {"height_mm", layout.shell().height_mm}};
  auto &arr = doc["taxels"] = nlohmann::json::array();
  for (const auto &t : layout.taxels()) {
    arr.push_back({{"id", t.id},
                   {"position_mm",
                    {t.position_mm.x(), t.position_mm.y(), t.position_mm.z()}},
                   {"normal", {t.normal.x(), t.normal.y(), t.normal.z()}},
                   {"region", std::string(to_string(t.region))}});
  }
  return doc.dump(2) + "\n";
}

TaxelFrame frame_from_pose(const TaxelPose &pose) {
  const Vec3 z = pose.normal.normalized();
  Vec3 x = Vec3::UnitX() - z.dot(Vec3::UnitX()) * z;
  if (x.norm() < 1e-6)
    x = Vec3::UnitY() - z.dot(Vec3::UnitY()) * z;
  x.normalize();
  const Vec3 y = z.cross(x);

  TaxelFrame f;
  f.rotation.col(0) = x;
  f.rotation.col(1) = y;
  f.rotation.col(2) = z;
  f.origin_mm = pose.position_mm;
  return f;
}

TaxelFrame taxel_frame(const TaxelLayout &layout, int id) {
  return frame_from_pose(layout.at(id));
}

int nearest_taxel(const TaxelLayout &layout, const Vec3 &point_mm) {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto &t : layout.taxels()) {
    const double d2 = (t.position_mm - point_mm).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = t.id;
    }
  }
  return best;
}

} // namespace tcal
