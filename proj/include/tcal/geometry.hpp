#pragma once

// Fingertip shell, taxel poses and per-taxel coordinate frames.
//
// Shell frame: origin at the centre of the shell bounding box, +x along the
// finger towards the tip (length), +y across the finger (width), +z from the
// palmar side towards the nail (height). The palmar pad therefore faces -z.

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace tcal {

using Vec3 = Eigen::Vector3d;

inline constexpr int kTaxelCount = 20;

struct FingertipShell {
  double length_mm = 39.0;
  double width_mm = 27.0;
  double height_mm = 26.0;

  /// Half extents of the bounding box centred on the origin.
  Vec3 half_extents() const {
    return {0.5 * length_mm, 0.5 * width_mm, 0.5 * height_mm};
  }
  bool contains(const Vec3 &p, double tol_mm = 1e-9) const;
};

enum class Region { palmar, lateral_left, lateral_right, tip };

std::string_view to_string(Region r);
/// Throws ValidationError on an unknown name.
Region region_from_string(std::string_view name);

struct TaxelPose {
  int id = 0;
  Vec3 position_mm = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ(); ///< outward, unit length
  Region region = Region::palmar;
};

/// Air gap, bump and skin dimensions of one magnet-bearing bump.
struct BumpGeometry {
  double air_gap_mm = 1.2;
  double bump_diameter_mm = 3.1;
  double skin_thickness_mm = 0.3;

  /// Throws ValidationError if a dimension is out of range.
  void validate() const;
};

class TaxelLayout {
public:
  /// Validates and takes ownership; taxels are stored ordered by id.
  TaxelLayout(FingertipShell shell, std::vector<TaxelPose> taxels);

  const FingertipShell &shell() const noexcept { return shell_; }
  const std::vector<TaxelPose> &taxels() const noexcept { return taxels_; }
  bool has(int id) const noexcept { return id >= 0 && id < kTaxelCount; }
  /// Throws ValidationError for an unknown id.
  const TaxelPose &at(int id) const;

private:
  FingertipShell shell_;
  std::vector<TaxelPose> taxels_;
};

/// Synthetic default placement: 12 taxels on the palmar arc, 4 per lateral
/// side. The physical coordinates of the real device are unpublished.
TaxelLayout default_layout();

/// Parse a layout JSON document. Parse failures carry the line number.
TaxelLayout parse_layout(std::string_view json_text);
TaxelLayout load_layout(const std::filesystem::path &path);
std::string layout_to_json(const TaxelLayout &layout);

/// Rigid frame of one taxel. Columns of `rotation` are the local X, Y, Z axes
/// expressed in the shell frame, so `rotation * UnitZ()` is the normal.
struct TaxelFrame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 origin_mm = Vec3::Zero();

  Vec3 to_local(const Vec3 &shell_point) const {
    return rotation.transpose() * (shell_point - origin_mm);
  }
  Vec3 to_shell(const Vec3 &local_point) const {
    return rotation * local_point + origin_mm;
  }
  Vec3 direction_to_local(const Vec3 &v) const {
    return rotation.transpose() * v;
  }
  Vec3 direction_to_shell(const Vec3 &v) const { return rotation * v; }
};

/// Local frame from a pose: Z = normal, X = long axis projected onto the
/// tangent plane (width axis if the normal is parallel to the long axis).
TaxelFrame frame_from_pose(const TaxelPose &pose);
TaxelFrame taxel_frame(const TaxelLayout &layout, int id);

/// Id of the taxel closest to `point_mm`; ties go to the lowest id.
int nearest_taxel(const TaxelLayout &layout, const Vec3 &point_mm);

} // namespace tcal
