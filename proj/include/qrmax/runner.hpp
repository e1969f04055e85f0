#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrmax/config.hpp"
#include "qrmax/verify.hpp"

namespace qrmax {

struct SuiteResult {
  std::string name;
  bool pass = true;
  double measured = 0.0;
  double bound = 0.0;
  std::string note;
};

struct ReportRow {
  double r = 0.0;
  double m_est = 0.0;
  long argmax_count = 0;
  double hausdorff = std::numeric_limits<double>::quiet_NaN();
  bool in_exceptional = false;
};

struct DistortionSummary {
  double probe_radius = 0.0;
  // roundness of the vertical shrink f in lift coordinates (bounded by 3)
  double shrink_roundness_max = 0.0;
  // informational Jacobian singular-value ratios of the final map
  double map_h_min = 1.0, map_h_median = 1.0, map_h_p95 = 1.0, map_h_max = 1.0;
  long excluded_points = 0;
};

struct RunReport {
  ExperimentConfig config;
  std::string config_echo;  // canonical serialization
  std::vector<ReportRow> rows;
  std::vector<SuiteResult> suites;
  std::optional<DistortionSummary> distortion;
  std::vector<std::string> notes;
  std::vector<Vec> target_points;     // section samples, for the overlay
  std::vector<Vec> extracted_points;  // argmax samples
  std::vector<std::pair<std::string, double>> timings_sec;  // console only
  bool pass = true;
};

/// Build oracle -> pullback -> h1 -> composite -> verification, per config.
/// Deterministic for a fixed seed and any worker count.
RunReport run_experiment(const ExperimentConfig& config);

/// Renderers (pure; used by emit_outputs and the determinism tests).
/// CSV columns exactly: r,M_est,argmax_count,hausdorff,in_exceptional.
std::string render_csv(const RunReport& report);
std::string render_json(const RunReport& report);
std::string render_svg(const RunReport& report);

struct EmitResult {
  std::vector<std::string> paths;
  bool svg_written = false;
};

/// Write CSV + JSON (+ SVG for n = 2) under the config's output dir (or the
/// override). I/O failures carry the offending path.
EmitResult emit_outputs(const RunReport& report, const std::string& out_dir_override = "");

}  // namespace qrmax
