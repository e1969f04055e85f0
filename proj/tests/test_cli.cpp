#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrmax/runner.hpp"

using namespace qrmax;

namespace {

const char* kSmallConfig = R"JSON({
  "dimension": 2,
  "seed": 20240817,
  "set": {"kind": "radial-ray", "direction": [1, 0]},
  "map": {"type": "polynomial", "degree": 2},
  "verify": {
    "r_grid": {"scale": "linear", "min": 0.5, "max": 2.5, "count": 5},
    "samples_per_sphere": 64,
    "refine_iters": 24
  },
  "output": {"dir": "out"}
})JSON";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation reports every offending field") {
  CHECK_NOTHROW(ExperimentConfig::from_json_text(kSmallConfig));

  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      ExperimentConfig::from_json_text(text);
      FAIL_CHECK("expected ConfigError mentioning '" << needle << "'");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_error(R"({"dimension": 2})", "seed");
  expect_error(R"({"dimension": 1, "seed": 1, "set": {"kind": "full-space"},
                   "map": {"type": "polynomial"},
                   "verify": {"r_grid": {"scale": "linear", "min": 1, "max": 2, "count": 3}}})",
               "dimension");
  expect_error(R"({"dimension": 2, "seed": 1, "set": {"kind": "full-space"},
                   "map": {"type": "polynomial", "degree": 1},
                   "verify": {"r_grid": {"scale": "linear", "min": 1, "max": 2, "count": 3}}})",
               "map.degree");
  expect_error(R"({"dimension": 3, "seed": 1, "set": {"kind": "full-space"},
                   "map": {"type": "transcendental"},
                   "verify": {"r_grid": {"scale": "linear", "min": 1, "max": 2, "count": 3}}})",
               "transcendental requires dimension 2");
  expect_error(R"({"dimension": 2, "seed": 1, "set": {"kind": "full-space"},
                   "map": {"type": "polynomial"},
                   "verify": {"r_grid": {"scale": "geometric", "min": 0, "max": 2, "count": 3}}})",
               "min > 0");
  expect_error(R"({"dimension": 2, "seed": 1, "set": {"kind": "full-space"},
                   "map": {"type": "polynomial"}, "verify": {"r_grid": {"count": 0}}})",
               "count");
  expect_error(R"({"dimension": 2, "seed": 1, "set": {"kind": "nonsense"},
                   "map": {"type": "polynomial"},
                   "verify": {"r_grid": {"scale": "linear", "min": 1, "max": 2, "count": 3}}})",
               "set.kind");
  expect_error(R"({"dimension": 2, "seed": 1, "typo_field": 3, "set": {"kind": "full-space"},
                   "map": {"type": "polynomial"},
                   "verify": {"r_grid": {"scale": "linear", "min": 1, "max": 2, "count": 3}}})",
               "typo_field");
}

TEST_CASE("config serialization round-trips") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
  std::string once = cfg.to_json_text();
  ExperimentConfig reparsed = ExperimentConfig::from_json_text(once);
  std::string twice = reparsed.to_json_text();
  CHECK(once == twice);
}

TEST_CASE("grid specs") {
  GridSpec lin{"linear", 0.0, 2.0, 5};
  auto lr = lin.radii();
  REQUIRE(lr.size() == 5);
  CHECK(lr[0] == 0.0);
  CHECK(lr[4] == 2.0);
  CHECK(lr[2] == doctest::Approx(1.0));
  GridSpec geo{"geometric", 0.1, 10.0, 3};
  auto gr = geo.radii();
  CHECK(gr[1] == doctest::Approx(1.0));
}

TEST_CASE("run_experiment: small polynomial pipeline passes its suites") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
  RunReport report = run_experiment(cfg);
  CHECK(report.pass);
  CHECK(report.rows.size() == 5);
  for (const auto& row : report.rows) {
    CHECK(row.m_est > 0.0);
    CHECK(!row.in_exceptional);
    CHECK(row.hausdorff >= 0.0);
  }
  bool has_schroder = false;
  for (const auto& s : report.suites)
    if (s.name == "schroder-identity") has_schroder = s.pass;
  CHECK(has_schroder);
}

TEST_CASE("CSV column contract and golden file") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
  RunReport report = run_experiment(cfg);
  std::string csv = render_csv(report);
  CHECK(csv.rfind("r,M_est,argmax_count,hausdorff,in_exceptional\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows

  const char* dir = std::getenv("QRMAX_GOLDEN_DIR");
  std::string golden_dir = dir ? dir : "tests/golden";
  std::string golden_path = golden_dir + "/small_report.csv";
  if (std::getenv("QRMAX_REGEN_GOLDEN")) {
    std::filesystem::create_directories(golden_dir);
    std::ofstream out(golden_path, std::ios::binary);
    out << csv;
  }
  CHECK(csv == read_file(golden_path));
}

TEST_CASE("outputs are byte-identical across worker counts") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
  setenv("QRMAX_THREADS", "1", 1);
  RunReport one = run_experiment(cfg);
  std::string csv1 = render_csv(one), json1 = render_json(one);
  setenv("QRMAX_THREADS", "3", 1);
  RunReport three = run_experiment(cfg);
  std::string csv3 = render_csv(three), json3 = render_json(three);
  unsetenv("QRMAX_THREADS");
  CHECK(csv1 == csv3);
  CHECK(json1 == json3);
}

TEST_CASE("emit_outputs writes the declared files; svg only for n = 2") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
  RunReport report = run_experiment(cfg);
  std::string dir = "/tmp/qrmax_test_out";
  std::filesystem::remove_all(dir);
  auto emitted = emit_outputs(report, dir);
  CHECK(emitted.svg_written);
  CHECK(emitted.paths.size() == 3);
  CHECK(std::filesystem::exists(dir + "/report.csv"));
  CHECK(std::filesystem::exists(dir + "/report.json"));
  CHECK(std::filesystem::exists(dir + "/overlay.svg"));
  std::string json = read_file(dir + "/report.json");
  CHECK(json.find("\"svg_emitted\": true") != std::string::npos);
  CHECK(json.find("timing") == std::string::npos);  // timings stay off the record
  std::filesystem::remove_all(dir);

  // n = 3: no svg, and the JSON says so
  ExperimentConfig cfg3 = ExperimentConfig::from_json_text(R"JSON({
    "dimension": 3,
    "seed": 7,
    "set": {"kind": "radial-ray", "direction": [0, 0, 1]},
    "map": {"type": "polynomial", "degree": 2},
    "verify": {"r_grid": {"scale": "linear", "min": 0.5, "max": 2.0, "count": 3},
               "samples_per_sphere": 128, "refine_iters": 8}
  })JSON");
  RunReport r3 = run_experiment(cfg3);
  auto emitted3 = emit_outputs(r3, dir);
  CHECK(!emitted3.svg_written);
  CHECK(!std::filesystem::exists(dir + "/overlay.svg"));
  std::string json3 = read_file(dir + "/report.json");
  CHECK(json3.find("\"svg_emitted\": false") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("transcendental and raw-block configs run end to end") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(R"JSON({
    "dimension": 2,
    "seed": 99,
    "set": {"kind": "log-spiral", "omega": 1.0},
    "map": {"type": "transcendental", "epsilon": 0.5,
            "radii": {"list": [2.0, 10.0, 60.0]}},
    "verify": {"r_grid": {"scale": "geometric", "min": 0.3, "max": 20.0, "count": 12},
               "samples_per_sphere": 256, "refine_iters": 16}
  })JSON");
  RunReport report = run_experiment(cfg);
  CHECK(report.pass);
  bool any_flagged = false;
  for (const auto& row : report.rows) any_flagged = any_flagged || row.in_exceptional;
  CHECK(any_flagged);

  ExperimentConfig raw = ExperimentConfig::from_json_text(R"JSON({
    "dimension": 2,
    "seed": 5,
    "set": {"kind": "full-space"},
    "map": {"type": "raw", "block": "zorich"},
    "verify": {"r_grid": {"scale": "linear", "min": 1.0, "max": 2.0, "count": 2},
               "samples_per_sphere": 64, "refine_iters": 4}
  })JSON");
  RunReport raw_report = run_experiment(raw);
  CHECK(raw_report.rows.size() == 2);
}

TEST_CASE("cloud-mode sets carry their substitution note") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(R"JSON({
    "dimension": 2,
    "seed": 31,
    "set": {"kind": "radial-ray", "direction": [1, 0], "mode": "cloud",
            "resolution": 0.05},
    "map": {"type": "raw", "block": "h1"},
    "verify": {"r_grid": {"scale": "linear", "min": 0.5, "max": 2.0, "count": 4},
               "samples_per_sphere": 128, "refine_iters": 8,
               "pullback": {"mode": "sampled", "t_step": 0.05, "section_count": 64}}
  })JSON");
  RunReport report = run_experiment(cfg);
  bool noted = false;
  for (const auto& n : report.notes)
    if (n.find("sampled pullback") != std::string::npos) noted = true;
  CHECK(noted);
}
