#include "tcal/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "tcal/acquisition.hpp"
#include "tcal/calibration.hpp"
#include "tcal/error.hpp"
#include "tcal/forward_model.hpp"
#include "tcal/geometry.hpp"
#include "tcal/metrics.hpp"
#include "tcal/plot.hpp"

namespace tcal::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  // simulate
  std::string config;
  std::string layout;
  std::string preset = "training";
  std::string profile;
  std::uint64_t seed = kDefaultSeed;
  double rate_hz = 100.0;
  std::optional<double> noise_sigma;
  std::int64_t jitter_us = 0;
  std::int64_t max_skew_us = kDefaultMaxSkewUs;
  // shared
  std::string in;
  std::string out;
  std::string model;
  int taxel = 11;
  std::string format = "text";
  std::string label;
  std::string features = "quadratic";
};

void require_input(const std::string &path, const char *what) {
  if (path.empty())
    throw IoError(std::string("missing ") + what + " path");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw IoError(std::string(what) + " '" + path + "' does not exist");
}

void require_output(const std::string &path) {
  if (path.empty())
    throw IoError("missing output path");
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec))
    throw IoError("output directory '" + parent.string() + "' does not exist");
}

std::string range_line(const char *name, double lo, double hi) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "  %s: [%.3f, %.3f] N\n", name, lo, hi);
  return buf;
}

std::string train_report_text(const TrainReport &r) {
  char buf[160];
  std::string out = "training report\n";
  std::snprintf(buf, sizeof buf, "  samples: %zu (%zu clamp-flagged excluded)\n",
                r.sample_count, r.excluded_count);
  out += buf;
  const char *axes[] = {"X", "Y", "Z"};
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof buf, "  %s: MAE %.4f N  RMSE %.4f N\n", axes[i],
                  r.mae_N[i], r.rmse_N[i]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "  gram condition: %.3e  rank: %d%s\n",
                r.gram_condition, r.rank,
                r.rank_deficient ? "  (rank deficient)" : "");
  out += buf;
  return out;
}

int cmd_simulate(const Options &o, std::ostream &out, std::ostream &err) {
  if (!o.config.empty())
    require_input(o.config, "config");
  if (!o.layout.empty())
    require_input(o.layout, "layout");
  if (!o.profile.empty())
    require_input(o.profile, "profile");
  require_output(o.out);

  ForwardConfig cfg = o.config.empty() ? ForwardConfig{} : load_forward_config(o.config);
  if (o.noise_sigma)
    cfg.hall.noise_sigma_counts = *o.noise_sigma;
  cfg.validate();
  const TaxelLayout layout = o.layout.empty() ? default_layout() : load_layout(o.layout);
  const ForceProfile profile =
      o.profile.empty() ? preset_profile(o.preset) : load_profile(o.profile);

  std::uint64_t seed = o.seed;
  if (seed == 0) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    err << "seed: " << seed << "\n";
  }

  const auto records =
      generate_dataset(cfg, layout, o.taxel, profile,
                       StreamOptions{o.rate_hz, o.jitter_us}, seed, o.max_skew_us);
  write_log(records, fs::path(o.out));

  out << "wrote " << records.size() << " records for taxel " << o.taxel << " to "
      << o.out << "\n";
  if (!records.empty()) {
    Vec3 lo = records.front().force_N, hi = lo;
    std::size_t clamped = 0;
    for (const auto &r : records) {
      lo = lo.cwiseMin(r.force_N);
      hi = hi.cwiseMax(r.force_N);
      clamped += r.clamp_flag ? 1 : 0;
    }
    out << "force ranges:\n"
        << range_line("fx", lo.x(), hi.x()) << range_line("fy", lo.y(), hi.y())
        << range_line("fz", lo.z(), hi.z());
    if (clamped)
      out << clamped << " records carry the clamp flag\n";
  }
  return kOk;
}

int cmd_fit(const Options &o, std::ostream &out, std::ostream &err) {
  require_input(o.in, "input log");
  require_output(o.out);
  const auto records = read_log(fs::path(o.in));

  FitOptions opts;
  opts.features = o.features == "linear" ? FeatureSet::linear : FeatureSet::quadratic;
  const FitResult res = fit(records, o.taxel, opts);
  save_model(res.model, o.out);

  out << train_report_text(res.report);
  out << "model written to " << o.out << "\n";
  if (res.report.rank_deficient)
    err << "warning: feature matrix is rank deficient or badly conditioned; "
           "minimum-norm solution used\n";
  return kOk;
}

std::vector<SyncedRecord> taxel_records(const std::vector<SyncedRecord> &all,
                                        int taxel) {
  std::vector<SyncedRecord> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [&](const SyncedRecord &r) { return r.taxel_id == taxel; });
  return out;
}

int cmd_predict(const Options &o, std::ostream &out, std::ostream &) {
  require_input(o.model, "model");
  require_input(o.in, "input log");
  if (!o.out.empty())
    require_output(o.out);
  const CalibrationModel model = load_model(o.model);
  const auto records = taxel_records(read_log(fs::path(o.in)), model.taxel_id);

  std::string csv = "t_us,fx,fy,fz\n";
  for (const auto &r : records) {
    const Vec3 f = predict(model, r.counts);
    csv += std::to_string(r.t_us);
    for (int i = 0; i < 3; ++i) {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, f[i]);
      csv += ',';
      csv.append(buf, res.ptr);
    }
    csv += '\n';
  }
  if (o.out.empty()) {
    out << csv;
  } else {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!(f << csv))
      throw IoError("cannot write '" + o.out + "'");
    out << "wrote " << records.size() << " predictions to " << o.out << "\n";
  }
  return kOk;
}

int cmd_eval(const Options &o, std::ostream &out, std::ostream &) {
  const ReportFormat fmt = report_format_from_string(o.format);
  require_input(o.model, "model");
  require_input(o.in, "input log");
  if (!o.out.empty())
    require_output(o.out);
  const CalibrationModel model = load_model(o.model);
  const auto records = taxel_records(read_log(fs::path(o.in)), model.taxel_id);

  std::vector<Vec3> pred, truth;
  for (const auto &r : records) {
    pred.push_back(predict(model, r.counts));
    truth.push_back(r.force_N);
  }
  const std::string label =
      o.label.empty() ? fs::path(o.in).stem().string() : o.label;
  const std::string text = render_report(evaluate(pred, truth, label), fmt);
  out << text;
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!(f << text))
      throw IoError("cannot write '" + o.out + "'");
  }
  return kOk;
}

int cmd_plot(const Options &o, std::ostream &out, std::ostream &) {
  require_input(o.model, "model");
  require_input(o.in, "input log");
  require_output(o.out);
  const CalibrationModel model = load_model(o.model);
  const auto records = read_log(fs::path(o.in));
  const PlotSeries series = make_plot_series(model, records);

  const std::string svg_path = o.out + ".svg";
  const std::string csv_path = o.out + ".csv";
  const std::string title = "Taxel " + std::to_string(model.taxel_id) +
                            ": calibrated vs reference force (" +
                            fs::path(o.in).filename().string() + ")";
  for (const auto &[path, body] :
       {std::pair{svg_path, render_plot_svg(series, title)},
        std::pair{csv_path, render_plot_csv(series)}}) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!(f << body))
      throw IoError("cannot write '" + path + "'");
  }
  out << "wrote " << svg_path << " and " << csv_path << " (" << series.t_us.size()
      << " samples)\n";
  return kOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Hall-effect fingertip taxel simulation and calibration toolkit", "tcal"};
  app.require_subcommand(1);
  Options o;

  auto add_taxel = [&](CLI::App *c) {
    c->add_option("--taxel", o.taxel, "Taxel id")
        ->check(CLI::Range(0, kTaxelCount - 1))
        ->capture_default_str();
  };

  auto *sim = app.add_subcommand("simulate", "Synthesize a paired tactile/reference log");
  sim->add_option("--config", o.config, "Forward-model config JSON (built-in defaults if omitted)");
  sim->add_option("--layout", o.layout, "Taxel layout JSON (built-in default if omitted)");
  auto *preset = sim->add_option("--preset", o.preset, "Force protocol preset")
                     ->check(CLI::IsMember({"training", "test"}))
                     ->capture_default_str();
  sim->add_option("--profile", o.profile, "Force profile JSON")->excludes(preset);
  sim->add_option("--seed", o.seed, "RNG seed (0 = entropy)")->capture_default_str();
  sim->add_option("--rate", o.rate_hz, "Sampling rate in Hz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--noise-sigma", o.noise_sigma, "Override Hall noise sigma (counts)")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--jitter-us", o.jitter_us, "Per-stream timestamp jitter (us)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sim->add_option("--max-skew-us", o.max_skew_us, "Sync window (us)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sim->add_option("--out", o.out, "Output tcal-log")->required();
  add_taxel(sim);

  auto *fitc = app.add_subcommand("fit", "Fit a quadratic calibration model");
  fitc->add_option("--in", o.in, "Training tcal-log")->required();
  fitc->add_option("--out", o.out, "Model JSON to write")->required();
  fitc->add_option("--features", o.features, "Feature set")
      ->check(CLI::IsMember({"linear", "quadratic"}))
      ->capture_default_str();
  add_taxel(fitc);

  auto *pred = app.add_subcommand("predict", "Predict forces for a log");
  pred->add_option("--model", o.model, "Model JSON")->required();
  pred->add_option("--in", o.in, "tcal-log")->required();
  pred->add_option("--out", o.out, "CSV output (stdout if omitted)");

  auto *ev = app.add_subcommand("eval", "Per-axis MAE/RMSE report");
  ev->add_option("--model", o.model, "Model JSON")->required();
  ev->add_option("--in", o.in, "Test tcal-log")->required();
  ev->add_option("--format", o.format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  ev->add_option("--out", o.out, "Also write the report here");
  ev->add_option("--label", o.label, "Dataset label (default: input file stem)");

  auto *pl = app.add_subcommand("plot", "Reference vs predicted time series (SVG + CSV)");
  pl->add_option("--model", o.model, "Model JSON")->required();
  pl->add_option("--in", o.in, "tcal-log")->required();
  pl->add_option("--out", o.out, "Output prefix; writes <prefix>.svg and <prefix>.csv")
      ->required();

  std::vector<const char *> argv{"tcal"};
  for (const auto &a : args)
    argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(o, out, err);
    if (fitc->parsed())
      return cmd_fit(o, out, err);
    if (pred->parsed())
      return cmd_predict(o, out, err);
    if (ev->parsed())
      return cmd_eval(o, out, err);
    if (pl->parsed())
      return cmd_plot(o, out, err);
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

} // namespace tcal::cli
