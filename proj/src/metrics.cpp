#include "tcal/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "io_util.hpp"
#include "tcal/error.hpp"

namespace tcal {

namespace {

void check_lengths(std::span<const Vec3> pred, std::span<const Vec3> truth) {
  if (pred.size() != truth.size())
    throw ValidationError("prediction and truth lengths differ (" +
                          std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
  if (pred.empty())
    throw ValidationError("cannot compute error metrics on an empty series");
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char *kAxisNames[] = {"X", "Y", "Z"};

} // namespace

Vec3 mae(std::span<const Vec3> pred, std::span<const Vec3> truth) {
  check_lengths(pred, truth);
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < pred.size(); ++i)
    sum += (pred[i] - truth[i]).cwiseAbs();
  return sum / static_cast<double>(pred.size());
}

Vec3 rmse(std::span<const Vec3> pred, std::span<const Vec3> truth) {
  check_lengths(pred, truth);
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < pred.size(); ++i)
    sum += (pred[i] - truth[i]).cwiseAbs2();
  return (sum / static_cast<double>(pred.size())).cwiseSqrt();
}

EvalReport evaluate(std::span<const Vec3> pred, std::span<const Vec3> truth,
                    std::string dataset) {
  const Vec3 a = mae(pred, truth);
  const Vec3 r = rmse(pred, truth);
  EvalReport rep;
  rep.dataset = std::move(dataset);
  rep.n = pred.size();
  rep.x = {a.x(), r.x()};
  rep.y = {a.y(), r.y()};
  rep.z = {a.z(), r.z()};
  return rep;
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "text")
    return ReportFormat::text;
  if (name == "json")
    return ReportFormat::json;
  if (name == "csv")
    return ReportFormat::csv;
  throw ValidationError("unknown report format '" + std::string(name) +
                        "' (expected text, json or csv)");
}

std::string render_report(const EvalReport &r, ReportFormat fmt) {
  switch (fmt) {
  case ReportFormat::text: {
    std::string out = "Mean Absolute Error and Root Mean Square Error per axis\n";
    out += "dataset: " + r.dataset + "  (n = " + std::to_string(r.n) + ")\n";
    char line[128];
    std::snprintf(line, sizeof line, "%-8s %22s %26s\n", "Axis",
                  "Mean Absolute Error", "Root Mean Squared Error");
    out += line;
    for (int i = 0; i < 3; ++i) {
      const std::string label = std::string(kAxisNames[i]) + " (N)";
      std::snprintf(line, sizeof line, "%-8s %22s %26s\n", label.c_str(),
                    fixed2(r.axis(i).mae_N).c_str(),
                    fixed2(r.axis(i).rmse_N).c_str());
      out += line;
    }
    return out;
  }
  case ReportFormat::json: {
    nlohmann::json axes;
    for (int i = 0; i < 3; ++i)
      axes[kAxisNames[i]] = {{"mae", r.axis(i).mae_N}, {"rmse", r.axis(i).rmse_N}};
    nlohmann::json doc = {{"dataset", r.dataset}, {"n", r.n}, {"axes", axes}};
    return doc.dump(2) + "\n";
  }
  case ReportFormat::csv: {
    std::string out = "axis,mae_N,rmse_N\n";
    for (int i = 0; i < 3; ++i)
      out += std::string(kAxisNames[i]) + "," +
             detail::format_double(r.axis(i).mae_N) + "," +
             detail::format_double(r.axis(i).rmse_N) + "\n";
    return out;
  }
  }
  return {};
}

EvalReport parse_report_json(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text);
  try {
    EvalReport r;
    r.dataset = detail::require(doc, "dataset", "report").get<std::string>();
    r.n = detail::require(doc, "n", "report").get<std::size_t>();
    const auto &axes = detail::require(doc, "axes", "report");
    AxisError *dst[] = {&r.x, &r.y, &r.z};
    for (int i = 0; i < 3; ++i) {
      const auto &a = detail::require(axes, kAxisNames[i], "report.axes");
      dst[i]->mae_N = detail::require(a, "mae", "report axis").get<double>();
      dst[i]->rmse_N = detail::require(a, "rmse", "report axis").get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

} // namespace tcal
