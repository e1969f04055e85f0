// qrmax: config-driven runner for quasiregular maximum-modulus experiments.
//
// Subcommands:
//   build       parse + validate the config, construct the pipeline, print a summary
//   maxmod      run the max-modulus extraction and write the CSV table
//   mms         extraction + target comparison + SVG overlay
//   distortion  distortion probes only
//   verify      property suites only (exit status reflects pass/fail)
//   all         everything
//
// QRMAX_THREADS caps the worker count (default: machine parallelism).

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "qrmax/parallel.hpp"
#include "qrmax/runner.hpp"

namespace {

void print_summary(const qrmax::RunReport& report) {
  std::printf("map: n = %d, type = %s\n", report.config.dimension, report.config.map.type.c_str());
  std::printf("radii: %zu, argmax samples: %zu\n", report.rows.size(),
              report.extracted_points.size());
  for (const auto& s : report.suites)
    std::printf("  [%s] %-26s measured = %-14s bound = %s%s%s\n", s.pass ? "PASS" : "FAIL",
                s.name.c_str(), qrmax::format_g12(s.measured).c_str(),
                qrmax::format_g12(s.bound).c_str(), s.note.empty() ? "" : "  -- ",
                s.note.c_str());
  for (const auto& n : report.notes) std::printf("note: %s\n", n.c_str());
  for (const auto& [name, sec] : report.timings_sec)
    std::printf("timing: %-10s %.3f s\n", name.c_str(), sec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasiregular maximum-modulus experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out-dir", out_dir, "override the output directory");

  for (const char* name : {"build", "maxmod", "mms", "distortion", "verify", "all"})
    app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);
  std::string cmd = app.get_subcommands().front()->get_name();

  try {
    qrmax::ExperimentConfig cfg = qrmax::ExperimentConfig::from_file(config_path);
    if (cmd == "build") {
      auto oracle = cfg.build_oracle();
      std::printf("config ok: n = %d, set = %s (%s), map = %s, workers = %d\n", cfg.dimension,
                  cfg.set.kind.c_str(),
                  oracle.distance_mode() == qrmax::DistanceMode::ExactFormula ? "exact" : "cloud",
                  cfg.map.type.c_str(), qrmax::worker_count());
      std::fputs(cfg.to_json_text().c_str(), stdout);
      return 0;
    }
    if (cmd == "distortion" && cfg.verify.distortion_samples <= 0)
      cfg.verify.distortion_samples = 256;

    qrmax::RunReport report = qrmax::run_experiment(cfg);
    print_summary(report);

    if (cmd != "verify" && cmd != "distortion") {
      auto emitted = qrmax::emit_outputs(report, out_dir);
      for (const auto& p : emitted.paths) std::printf("wrote %s\n", p.c_str());
      if (!emitted.svg_written) std::printf("svg omitted (n != 2); noted in JSON\n");
    }
    if (cmd == "maxmod" || cmd == "mms") return 0;
    return report.pass ? 0 : 1;
  } catch (const qrmax::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const qrmax::ScopeError& e) {
    std::fprintf(stderr, "scope error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
