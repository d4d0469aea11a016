#pragma once

// Quadratic regression calibration of one taxel: raw counts are normalized,
// expanded into the full degree-2 polynomial basis and mapped to force by a
// 3x10 weight matrix fitted with per-axis least squares.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tcal/least_squares.hpp"
#include "tcal/records.hpp"

namespace tcal {

inline constexpr int kFeatureCount = 10;
inline constexpr std::size_t kMinTrainingRecords = 2 * kFeatureCount;

/// [1, x, y, z, x^2, y^2, z^2, xy, xz, yz] over normalized counts.
using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;
using WeightMatrix = Eigen::Matrix<double, 3, kFeatureCount>;

struct Normalization {
  Vec3 mean = Vec3::Zero();
  Vec3 scale = Vec3::Ones();

  bool operator==(const Normalization &) const = default;
};

FeatureVector expand_normalized(const Vec3 &u);
FeatureVector expand_features(const Counts &counts, const Normalization &norm);

/// Per-channel mean and population standard deviation; a constant channel
/// gets scale 1.
Normalization normalization_from(std::span<const Counts> counts);

struct TrainReport {
  std::size_t sample_count = 0;
  /// Records dropped for carrying the clamp flag.
  std::size_t excluded_count = 0;
  Vec3 mae_N = Vec3::Zero();
  Vec3 rmse_N = Vec3::Zero();
  double gram_condition = 0.0;
  int rank = 0;
  bool rank_deficient = false;

  bool operator==(const TrainReport &) const = default;
};

struct CalibrationModel {
  int taxel_id = 0;
  /// Rows predict Fx, Fy, Fz.
  WeightMatrix weights = WeightMatrix::Zero();
  Normalization norm;
  TrainReport training;

  bool operator==(const CalibrationModel &) const = default;
};

enum class FeatureSet {
  linear,   ///< first 4 basis terms only; quadratic weights stay zero
  quadratic ///< all 10 terms
};

struct FitOptions {
  FeatureSet features = FeatureSet::quadratic;
  /// Fixed normalization instead of the training-set statistics.
  std::optional<Normalization> normalization;
  double max_gram_condition = kDefaultMaxGramCondition;
};

struct FitResult {
  CalibrationModel model;
  TrainReport report;
};

/// Fits the records of `taxel_id`, skipping clamp-flagged ones. Throws
/// InsufficientDataError below kMinTrainingRecords usable records. A rank
/// deficient design is flagged in the report and solved for minimum norm.
FitResult fit(std::span<const SyncedRecord> records, int taxel_id,
              const FitOptions &opts = {});

Vec3 predict(const CalibrationModel &model, const Counts &counts);

inline constexpr std::string_view kModelSchema = "tcal-model";
inline constexpr int kModelVersion = 1;

/// Canonical form: sorted keys, shortest round-trip numbers.
std::string model_to_json(const CalibrationModel &model);
/// Throws SchemaError for anything that is not a complete, valid model.
CalibrationModel model_from_json(std::string_view json_text);
void save_model(const CalibrationModel &model, const std::filesystem::path &path);
CalibrationModel load_model(const std::filesystem::path &path);

/// Per-taxel models stored side by side; each fitted independently.
struct ModelBundle {
  std::vector<CalibrationModel> models;

  const CalibrationModel *find(int taxel_id) const;
};

void save_bundle(const ModelBundle &bundle, const std::filesystem::path &path);
ModelBundle load_bundle(const std::filesystem::path &path);

} // namespace tcal
