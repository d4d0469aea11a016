#pragma once

// Static time-series output: reference force drawn solid, calibrated
// prediction dashed, one panel per axis.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcal/calibration.hpp"
#include "tcal/records.hpp"

namespace tcal {

struct PlotSeries {
  std::vector<TimestampUs> t_us;
  std::vector<Vec3> reference_N;
  std::vector<Vec3> predicted_N;
};

/// Predictions for every record of the model's taxel.
PlotSeries make_plot_series(const CalibrationModel &model,
                            std::span<const SyncedRecord> records);

/// Header `t_us,ref_fx,pred_fx,ref_fy,pred_fy,ref_fz,pred_fz`, one row per
/// sample, shortest round-trip numbers.
std::string render_plot_csv(const PlotSeries &s);
std::string render_plot_svg(const PlotSeries &s, std::string_view title);

} // namespace tcal
