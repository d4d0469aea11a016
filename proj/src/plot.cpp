#include "tcal/plot.hpp"

#include <algorithm>
#include <cstdio>

#include "io_util.hpp"

namespace tcal {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 200.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kPanelGap = 30.0;

// Blue, green, red for X, Y, Z.
constexpr const char *kColors[] = {"#1f77b4", "#2ca02c", "#d62728"};
constexpr const char *kAxisNames[] = {"X", "Y", "Z"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

PlotSeries make_plot_series(const CalibrationModel &model,
                            std::span<const SyncedRecord> records) {
  PlotSeries s;
  for (const auto &r : records) {
    if (r.taxel_id != model.taxel_id)
      continue;
    s.t_us.push_back(r.t_us);
    s.reference_N.push_back(r.force_N);
    s.predicted_N.push_back(predict(model, r.counts));
  }
  return s;
}

std::string render_plot_csv(const PlotSeries &s) {
  std::string out = "t_us,ref_fx,pred_fx,ref_fy,pred_fy,ref_fz,pred_fz\n";
  for (std::size_t i = 0; i < s.t_us.size(); ++i) {
    out += std::to_string(s.t_us[i]);
    for (int a = 0; a < 3; ++a) {
      out += ',';
      out += detail::format_double(s.reference_N[i][a]);
      out += ',';
      out += detail::format_double(s.predicted_N[i][a]);
    }
    out += '\n';
  }
  return out;
}

std::string render_plot_svg(const PlotSeries &s, std::string_view title) {
  const double height = kMarginTop + 3 * kPanelHeight + 2 * kPanelGap + 40.0;
  const double plot_w = kWidth - kMarginLeft - kMarginRight;

  double t0 = 0.0, t1 = 1.0;
  if (!s.t_us.empty()) {
    t0 = static_cast<double>(s.t_us.front()) * 1e-6;
    t1 = static_cast<double>(s.t_us.back()) * 1e-6;
    if (t1 <= t0)
      t1 = t0 + 1.0;
  }

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
         num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" +
         xml_escape(title) + "</text>\n";

  for (int a = 0; a < 3; ++a) {
    const double top = kMarginTop + a * (kPanelHeight + kPanelGap);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < s.t_us.size(); ++i) {
      lo = std::min({lo, s.reference_N[i][a], s.predicted_N[i][a]});
      hi = std::max({hi, s.reference_N[i][a], s.predicted_N[i][a]});
    }
    if (hi - lo < 1e-9) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    auto px = [&](TimestampUs t) {
      return kMarginLeft + (static_cast<double>(t) * 1e-6 - t0) / (t1 - t0) * plot_w;
    };
    auto py = [&](double f) { return top + (hi - f) / (hi - lo) * kPanelHeight; };

    svg += "<g id=\"axis-" + std::string(kAxisNames[a]) + "\">\n";
    svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(top) + "\" width=\"" +
           num(plot_w) + "\" height=\"" + num(kPanelHeight) +
           "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(py(0.0)) +
           "\" x2=\"" + num(kMarginLeft + plot_w) + "\" y2=\"" + num(py(0.0)) +
           "\" stroke=\"#ccc\"/>\n";
    svg += "<text x=\"10\" y=\"" + num(top + kPanelHeight / 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + kAxisNames[a] +
           " (N)</text>\n";
    svg += "<text x=\"" + num(kMarginLeft - 4) + "\" y=\"" + num(top + 10) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
           num(hi) + "</text>\n";
    svg += "<text x=\"" + num(kMarginLeft - 4) + "\" y=\"" +
           num(top + kPanelHeight) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
           num(lo) + "</text>\n";

    for (int which = 0; which < 2; ++which) {
      const auto &series = which == 0 ? s.reference_N : s.predicted_N;
      svg += which == 0 ? "<polyline class=\"reference\" stroke-width=\"1.5\" "
                        : "<polyline class=\"predicted\" stroke-width=\"1.5\" "
                          "stroke-dasharray=\"5,3\" ";
      svg += "fill=\"none\" stroke=\"" + std::string(kColors[a]) + "\" points=\"";
      for (std::size_t i = 0; i < s.t_us.size(); ++i) {
        if (i)
          svg += ' ';
        svg += num(px(s.t_us[i])) + "," + num(py(series[i][a]));
      }
      svg += "\"/>\n";
    }
    svg += "</g>\n";
  }

  const double legend_y = height - 14.0;
  svg += "<text x=\"" + num(kMarginLeft) + "\" y=\"" + num(legend_y) +
         "\" font-family=\"sans-serif\" font-size=\"11\">solid: reference sensor, "
         "dashed: calibrated prediction, time axis " +
         num(t0) + " s to " + num(t1) + " s</text>\n";
  svg += "</svg>\n";
  return svg;
}

} // namespace tcal
