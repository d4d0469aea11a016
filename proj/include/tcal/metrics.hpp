#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "tcal/records.hpp"

namespace tcal {

/// Per-axis mean absolute error. Throws ValidationError on empty or
/// mismatched inputs.
Vec3 mae(std::span<const Vec3> pred, std::span<const Vec3> truth);
/// Per-axis root mean squared error.
Vec3 rmse(std::span<const Vec3> pred, std::span<const Vec3> truth);

struct AxisError {
  double mae_N = 0.0;
  double rmse_N = 0.0;
  bool operator==(const AxisError &) const = default;
};

struct EvalReport {
  std::string dataset;
  std::size_t n = 0;
  AxisError x, y, z;

  const AxisError &axis(int i) const { return i == 0 ? x : i == 1 ? y : z; }
  bool operator==(const EvalReport &) const = default;
};

EvalReport evaluate(std::span<const Vec3> pred, std::span<const Vec3> truth,
                    std::string dataset);

enum class ReportFormat { text, json, csv };

/// Throws ValidationError for anything but text/json/csv.
ReportFormat report_format_from_string(std::string_view name);

/// Text mirrors the MAE/RMSE-per-axis table and rounds to 2 decimals; JSON
/// keeps full precision.
std::string render_report(const EvalReport &r, ReportFormat fmt);
EvalReport parse_report_json(std::string_view json_text);

} // namespace tcal
