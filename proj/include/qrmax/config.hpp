#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrmax/common.hpp"
#include "qrmax/sets.hpp"

namespace qrmax {

struct GridSpec {
  std::string scale = "geometric";  // "linear" | "geometric"
  double min = 0.1;
  double max = 10.0;
  int count = 64;

  std::vector<double> radii() const;
};

struct SetConfig {
  std::string kind = "radial-ray";  // full-space | radial-ray | log-spiral | cone |
                                    // point-cloud | union
  std::string mode = "exact";       // "exact" | "cloud" (cloud twin built by sampling)
  std::vector<double> direction;    // ray / cone axis
  double omega = 1.0;               // spiral
  double phase = 0.0;
  double half_angle = 0.5;          // cone
  std::string csv;                  // point cloud source
  double resolution = 0.01;         // cloud resolution
  std::vector<SetConfig> children;  // union
};

struct MapConfig {
  std::string type = "polynomial";  // polynomial | transcendental | raw
  int degree = 2;                   // polynomial
  double epsilon = 0.5;             // transcendental
  std::string radii_rule = "exp-exp";
  int radii_count = 4;
  std::vector<double> radii_list;   // explicit schedule radii (overrides rule)
  std::string block = "h1";         // raw: zorich | power | h1 | gluing | identity
};

struct PullbackConfig {
  std::string mode = "auto";  // auto | analytic | sampled
  double cap = 9.0;
  double t_step = 0.05;
  int section_count = 512;
};

struct VerifyPlan {
  GridSpec r_grid;
  int samples_per_sphere = 1024;
  int refine_iters = 48;
  int section_count = 0;  // 0: use samples_per_sphere
  int distortion_samples = 0;
  double probe_radius = 1e-3;
  PullbackConfig pullback;
};

struct OutputConfig {
  std::string dir = "out";
  std::string csv = "report.csv";
  std::string json = "report.json";
  std::string svg = "overlay.svg";
};

struct ExperimentConfig {
  int dimension = 2;
  std::uint64_t seed = 0;
  bool seed_set = false;
  SetConfig set;
  MapConfig map;
  VerifyPlan verify;
  OutputConfig output;

  /// Parse + validate. Throws ConfigError listing every offending field.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  /// Canonical serialization; parse(serialize(.)) is the identity.
  std::string to_json_text() const;

  ClosedSetOracle build_oracle() const;
};

}  // namespace qrmax
