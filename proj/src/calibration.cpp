#include "tcal/calibration.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "io_util.hpp"
#include "tcal/error.hpp"
#include "tcal/metrics.hpp"

namespace tcal {

namespace {

nlohmann::json vec_json(const Vec3 &v) { return {v.x(), v.y(), v.z()}; }

Vec3 json_vec(const nlohmann::json &j, std::string_view ctx) {
  if (!j.is_array() || j.size() != 3)
    throw SchemaError(std::string(ctx) + ": expected an array of 3 numbers");
  Vec3 v(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  if (!v.allFinite())
    throw SchemaError(std::string(ctx) + ": non-finite value");
  return v;
}

nlohmann::json model_json(const CalibrationModel &m) {
  nlohmann::json w = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < kFeatureCount; ++c)
      w.push_back(m.weights(r, c));

  const auto &t = m.training;
  nlohmann::json training = {
      {"sample_count", t.sample_count},
      {"excluded_count", t.excluded_count},
      {"mae_N", vec_json(t.mae_N)},
      {"rmse_N", vec_json(t.rmse_N)},
      {"rank", t.rank},
      {"rank_deficient", t.rank_deficient},
  };
  // JSON has no infinity; an exactly singular design is written as null.
  training["gram_condition"] =
      std::isfinite(t.gram_condition) ? nlohmann::json(t.gram_condition) : nullptr;

  return {{"schema", std::string(kModelSchema)},
          {"version", kModelVersion},
          {"taxel_id", m.taxel_id},
          {"features", "1,x,y,z,x2,y2,z2,xy,xz,yz"},
          {"weights", w},
          {"norm", {{"mean", vec_json(m.norm.mean)}, {"scale", vec_json(m.norm.scale)}}},
          {"training", training}};
}

CalibrationModel model_from(const nlohmann::json &doc) {
  using detail::require;
  try {
    const auto schema = require(doc, "schema", "model").get<std::string>();
    if (schema != kModelSchema)
      throw SchemaError("not a calibration model (schema '" + schema + "')");
    const int version = require(doc, "version", "model").get<int>();
    if (version != kModelVersion)
      throw SchemaError("unsupported model schema version " +
                        std::to_string(version) + " (expected " +
                        std::to_string(kModelVersion) + ")");

    CalibrationModel m;
    m.taxel_id = require(doc, "taxel_id", "model").get<int>();
    if (m.taxel_id < 0 || m.taxel_id >= 20)
      throw SchemaError("model taxel_id out of range");

    const auto &w = require(doc, "weights", "model");
    if (!w.is_array() || w.size() != 3 * kFeatureCount)
      throw SchemaError("model weights must hold 30 numbers (row-major 3x10)");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < kFeatureCount; ++c)
        m.weights(r, c) = w[static_cast<std::size_t>(r * kFeatureCount + c)].get<double>();
    if (!m.weights.allFinite())
      throw SchemaError("model weights must be finite");

    const auto &norm = require(doc, "norm", "model");
    m.norm.mean = json_vec(require(norm, "mean", "model.norm"), "model.norm.mean");
    m.norm.scale = json_vec(require(norm, "scale", "model.norm"), "model.norm.scale");
    if (!(m.norm.scale.array() > 0.0).all())
      throw SchemaError("model.norm.scale must be strictly positive");

    const auto &t = require(doc, "training", "model");
    m.training.sample_count = require(t, "sample_count", "model.training").get<std::size_t>();
    m.training.excluded_count =
        require(t, "excluded_count", "model.training").get<std::size_t>();
    m.training.mae_N = json_vec(require(t, "mae_N", "model.training"), "mae_N");
    m.training.rmse_N = json_vec(require(t, "rmse_N", "model.training"), "rmse_N");
    m.training.rank = require(t, "rank", "model.training").get<int>();
    m.training.rank_deficient = require(t, "rank_deficient", "model.training").get<bool>();
    const auto &gc = require(t, "gram_condition", "model.training");
    m.training.gram_condition =
        gc.is_null() ? std::numeric_limits<double>::infinity() : gc.get<double>();
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("model: ") + e.what());
  }
}

nlohmann::json parse_model_doc(std::string_view text) {
  try {
    return detail::parse_json(text);
  } catch (const ParseError &e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
}

} // namespace

FeatureVector expand_normalized(const Vec3 &u) {
  FeatureVector f;
  f << 1.0, u.x(), u.y(), u.z(), u.x() * u.x(), u.y() * u.y(), u.z() * u.z(),
      u.x() * u.y(), u.x() * u.z(), u.y() * u.z();
  return f;
}

FeatureVector expand_features(const Counts &counts, const Normalization &norm) {
  const Vec3 u = (counts.cast<double>() - norm.mean).cwiseQuotient(norm.scale);
  return expand_normalized(u);
}

Normalization normalization_from(std::span<const Counts> counts) {
  Normalization n;
  if (counts.empty())
    return n;
  Vec3 sum = Vec3::Zero();
  for (const auto &c : counts)
    sum += c.cast<double>();
  n.mean = sum / static_cast<double>(counts.size());
  Vec3 sq = Vec3::Zero();
  for (const auto &c : counts)
    sq += (c.cast<double>() - n.mean).cwiseAbs2();
  n.scale = (sq / static_cast<double>(counts.size())).cwiseSqrt();
  for (int i = 0; i < 3; ++i)
    if (!(n.scale[i] > 0.0))
      n.scale[i] = 1.0;
  return n;
}

FitResult fit(std::span<const SyncedRecord> records, int taxel_id,
              const FitOptions &opts) {
  std::vector<Counts> counts;
  std::vector<Vec3> forces;
  std::size_t excluded = 0;
  for (const auto &r : records) {
    if (r.taxel_id != taxel_id)
      continue;
    if (r.clamp_flag) {
      ++excluded;
      continue;
    }
    counts.push_back(r.counts);
    forces.push_back(r.force_N);
  }
  if (counts.size() < kMinTrainingRecords)
    throw InsufficientDataError(
        "need at least " + std::to_string(kMinTrainingRecords) +
        " usable records for taxel " + std::to_string(taxel_id) + ", found " +
        std::to_string(counts.size()) + " (" + std::to_string(excluded) +
        " clamp-flagged excluded)");

  const Normalization norm =
      opts.normalization ? *opts.normalization : normalization_from(counts);
  if (!(norm.scale.array() > 0.0).all() || !norm.mean.allFinite())
    throw ValidationError("normalization scale must be strictly positive");

  const int cols = opts.features == FeatureSet::quadratic ? kFeatureCount : 4;
  const auto n = static_cast<Eigen::Index>(counts.size());
  Eigen::MatrixXd design(n, cols);
  Eigen::MatrixXd targets(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    design.row(i) = expand_features(counts[static_cast<std::size_t>(i)], norm)
                        .head(cols)
                        .transpose();
    targets.row(i) = forces[static_cast<std::size_t>(i)].transpose();
  }

  const LeastSquaresSolution sol =
      solve_least_squares(design, targets, opts.max_gram_condition);

  FitResult out;
  CalibrationModel &m = out.model;
  m.taxel_id = taxel_id;
  m.norm = norm;
  m.weights.leftCols(cols) = sol.coefficients.transpose();

  std::vector<Vec3> pred;
  pred.reserve(counts.size());
  for (const auto &c : counts)
    pred.push_back(predict(m, c));

  TrainReport &rep = out.report;
  rep.sample_count = counts.size();
  rep.excluded_count = excluded;
  rep.mae_N = mae(pred, forces);
  rep.rmse_N = rmse(pred, forces);
  rep.gram_condition = sol.gram_condition;
  rep.rank = sol.rank;
  rep.rank_deficient = sol.rank_deficient;
  m.training = rep;
  return out;
}

Vec3 predict(const CalibrationModel &model, const Counts &counts) {
  return model.weights * expand_features(counts, model.norm);
}

std::string model_to_json(const CalibrationModel &model) {
  return model_json(model).dump(2) + "\n";
}

CalibrationModel model_from_json(std::string_view json_text) {
  return model_from(parse_model_doc(json_text));
}

void save_model(const CalibrationModel &model, const std::filesystem::path &path) {
  detail::write_text_file(path, model_to_json(model));
}

CalibrationModel load_model(const std::filesystem::path &path) {
  return model_from_json(detail::read_text_file(path));
}

const CalibrationModel *ModelBundle::find(int taxel_id) const {
  for (const auto &m : models)
    if (m.taxel_id == taxel_id)
      return &m;
  return nullptr;
}

void save_bundle(const ModelBundle &bundle, const std::filesystem::path &path) {
  nlohmann::json arr = nlohmann::json::array();
  std::set<int> ids;
  for (const auto &m : bundle.models) {
    if (!ids.insert(m.taxel_id).second)
      throw ValidationError("bundle holds two models for taxel " +
                            std::to_string(m.taxel_id));
    arr.push_back(model_json(m));
  }
  nlohmann::json doc = {{"schema", "tcal-model-bundle"},
                        {"version", kModelVersion},
                        {"models", arr}};
  detail::write_text_file(path, doc.dump(2) + "\n");
}

ModelBundle load_bundle(const std::filesystem::path &path) {
  const auto doc = parse_model_doc(detail::read_text_file(path));
  try {
    if (detail::require(doc, "schema", "bundle").get<std::string>() !=
        "tcal-model-bundle")
      throw SchemaError("not a model bundle");
    if (detail::require(doc, "version", "bundle").get<int>() != kModelVersion)
      throw SchemaError("unsupported bundle schema version");
    ModelBundle b;
    std::set<int> ids;
    for (const auto &j : detail::require(doc, "models", "bundle")) {
      b.models.push_back(model_from(j));
      if (!ids.insert(b.models.back().taxel_id).second)
        throw SchemaError("bundle holds two models for taxel " +
                          std::to_string(b.models.back().taxel_id));
    }
    return b;
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("bundle: ") + e.what());
  }
}

} // namespace tcal
