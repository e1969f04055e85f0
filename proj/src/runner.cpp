#include "qrmax/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qrmax/map_expr.hpp"
#include "qrmax/shrink.hpp"

namespace qrmax {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    auto t1 = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

struct Pipeline {
  ClosedSetOracle oracle;
  std::optional<GrowthSchedule> schedule;
  std::optional<AnnulusGluing> gluing;
  std::optional<H1Map> h1;
  std::optional<PowerMap> power;
  MapExpr map;
  bool compare = false;           // compare argmax sets against T
  bool exclude_exceptional = false;
  std::vector<std::string> notes;
};

GrowthSchedule build_schedule(const MapConfig& mc) {
  if (!mc.radii_list.empty()) return GrowthSchedule::from_radii(mc.radii_list, mc.epsilon);
  return GrowthSchedule::exp_exp(mc.radii_count, mc.epsilon);
}

PullbackSet build_pullback(const ExperimentConfig& cfg, const ClosedSetOracle& T,
                           const ZorichMap& Z, std::optional<ExceptionalBands> bands,
                           std::vector<std::string>& notes) {
  const PullbackConfig& pc = cfg.verify.pullback;
  bool analytic_ok = T.distance_mode() == DistanceMode::ExactFormula &&
                     PullbackSet::analytic_supported(T);
  std::string mode = pc.mode;
  if (mode == "analytic" && !analytic_ok)
    throw ConfigError("verify.pullback.mode: no analytic pullback for this set");
  if (mode == "auto") mode = analytic_ok ? "analytic" : "sampled";
  if (mode == "analytic") return PullbackSet::analytic(T, Z, pc.cap, bands);

  auto radii = cfg.verify.r_grid.radii();
  double r_lo = 0, r_hi = 0;
  for (double r : radii)
    if (r > 0) {
      r_lo = r_lo == 0 ? r : std::min(r_lo, r);
      r_hi = std::max(r_hi, r);
    }
  if (r_hi == 0) throw ConfigError("verify.r_grid: sampled pullback needs positive radii");
  PullbackSet::SampledParams sp;
  sp.t_min = std::log(r_lo);
  sp.t_max = std::log(r_hi);
  sp.t_step = pc.t_step;
  sp.section_count = pc.section_count;
  notes.push_back(
      "sampled pullback: the implemented map realizes the inverted section samples (lift "
      "resolution reported in tolerances), not T itself, as its exact fixed set");
  return PullbackSet::sampled(T, Z, sp, pc.cap, bands);
}

Pipeline build_pipeline(const ExperimentConfig& cfg) {
  Pipeline p{cfg.build_oracle(), {}, {}, {}, {}, {}, false, false, {}};
  ZorichMap Z(cfg.dimension);
  const std::string& type = cfg.map.type;
  if (cfg.set.mode == "cloud" || p.oracle.distance_mode() == DistanceMode::CloudApproximate)
    p.notes.push_back(
        "point-cloud target: reports compare against the cloud closure at the declared "
        "resolution");

  if (type == "polynomial") {
    PullbackSet ps = build_pullback(cfg, p.oracle, Z, std::nullopt, p.notes);
    p.h1 = H1Map(ShrinkMap(std::move(ps)));
    p.power = PowerMap(Z, cfg.map.degree);
    p.map = polynomial_composite(*p.power, *p.h1);
    p.compare = true;
  } else if (type == "transcendental") {
    p.schedule = build_schedule(cfg.map);
    p.gluing = AnnulusGluing(*p.schedule);
    ExceptionalBands bands{p.schedule->exceptional_bands_log()};
    PullbackSet ps = build_pullback(cfg, p.oracle, Z, bands, p.notes);
    p.h1 = H1Map(ShrinkMap(std::move(ps)));
    p.map = transcendental_composite(*p.gluing, *p.h1);
    p.compare = true;
    p.exclude_exceptional = true;
  } else {  // raw building blocks
    const std::string& block = cfg.map.block;
    if (block == "identity") {
      p.map = identity_map(cfg.dimension);
    } else if (block == "zorich") {
      p.map = zorich_expr(Z);
    } else if (block == "power") {
      p.power = PowerMap(Z, cfg.map.degree);
      p.map = power_expr(*p.power);
    } else if (block == "gluing") {
      p.schedule = build_schedule(cfg.map);
      p.gluing = AnnulusGluing(*p.schedule);
      p.map = gluing_expr(*p.gluing);
    } else {  // h1
      PullbackSet ps = build_pullback(cfg, p.oracle, Z, std::nullopt, p.notes);
      p.h1 = H1Map(ShrinkMap(std::move(ps)));
      p.map = h1_expr(*p.h1);
      p.compare = true;
    }
  }
  return p;
}

std::vector<double> spread_subset(const std::vector<double>& grid, std::size_t want) {
  std::vector<double> out;
  if (grid.empty()) return out;
  if (grid.size() <= want) return grid;
  for (std::size_t i = 0; i < want; ++i)
    out.push_back(grid[i * (grid.size() - 1) / (want - 1)]);
  return out;
}

void run_suites(const ExperimentConfig& cfg, const Pipeline& p, const MMSExtract& extract,
                const std::optional<TargetComparison>& cmp, RunReport& report) {
  Rng rng(cfg.seed);
  auto grid = extract.grid;
  auto add = [&](SuiteResult s) {
    report.pass = report.pass && s.pass;
    report.suites.push_back(std::move(s));
  };

  if (p.compare) {
    // target meets every sphere (includes the r = 0 origin convention)
    auto sub = spread_subset(grid, 9);
    auto coverage = validate_meets_every_sphere(p.oracle, sub,
                                                std::min(1024, cfg.verify.samples_per_sphere));
    SuiteResult s{"meets-every-sphere", coverage.pass, 0.0,
                  p.oracle.tolerance() + 1e-9, ""};
    for (const auto& row : coverage.rows) s.measured = std::max(s.measured, row.achieved_min);
    if (!coverage.pass) {
      std::string radii;
      for (const auto& row : coverage.rows)
        if (!row.pass) radii += (radii.empty() ? "" : ", ") + format_g12(row.r);
      s.note = "failing radii: " + radii;
    }
    add(std::move(s));
  }

  if (p.h1) {
    const H1Map& h1 = *p.h1;
    // modulus law |h1(x)| = |x| exp(-p/2)
    double r_lo = grid.empty() ? 0.5 : std::max(1e-3, grid.front());
    double r_hi = grid.empty() ? 2.0 : std::max(grid.back(), r_lo * 1.0000001);
    std::vector<Vec> pts;
    for (int i = 0; i < 2000; ++i) {
      double r = r_lo * std::pow(r_hi / r_lo, uniform(rng, 0.0, 1.0));
      pts.push_back(r * random_unit(rng, cfg.dimension));
    }
    double worst = 0.0;
    for (const auto& x : pts) {
      double expect = x.norm() * h1.modulus_factor(x);
      double got = h1.eval(x).norm();
      worst = std::max(worst, std::abs(got - expect) / std::max(expect, 1e-300));
    }
    add({"h1-modulus-law", worst <= 1e-10, worst, 1e-10, ""});

    // identity exactly on T (analytic pullbacks only)
    if (h1.shrink().pullback().exact() &&
        p.oracle.distance_mode() == DistanceMode::ExactFormula) {
      double worst_id = 0.0;
      for (double r : spread_subset(grid, 16)) {
        if (p.exclude_exceptional && p.schedule && p.schedule->in_exceptional(r)) continue;
        SphereSection sec = p.oracle.sphere_section(r, 64);
        for (const auto& x : sec.samples) {
          double err = (h1.eval(x) - x).norm() / std::max(1.0, x.norm());
          worst_id = std::max(worst_id, err);
        }
      }
      add({"h1-identity-on-T", worst_id <= 1e-9, worst_id, 1e-9, ""});
    } else {
      add({"h1-identity-on-T", true, 0.0, 1e-9,
           "skipped: sampled/cloud pullback realizes the sample set, not T"});
    }
  }

  if (p.power) {
    const PowerMap& P = *p.power;
    const ZorichMap& Z = P.zorich();
    double worst_s = 0.0, worst_m = 0.0;
    for (int i = 0; i < 500; ++i) {
      Vec x = random_point(rng, cfg.dimension, 6.0);
      x[cfg.dimension - 1] = uniform(rng, -3.0, 3.0);
      Vec lhs = P.eval(Z.eval(x));
      Vec rhs = Z.eval(P.degree() * x);
      worst_s = std::max(worst_s, (lhs - rhs).norm() / rhs.norm());
      Vec y = Z.eval(x);  // arbitrary nonzero point
      double expect = std::pow(y.norm(), P.degree());
      worst_m = std::max(worst_m, std::abs(P.eval(y).norm() - expect) / expect);
    }
    add({"schroder-identity", worst_s <= 1e-9, worst_s, 1e-9, ""});
    add({"power-sphere-law", worst_m <= 1e-9, worst_m, 1e-9, ""});
  }

  if (cmp) {
    SuiteResult s{"mms-hausdorff", cmp->pass, cmp->max_hausdorff, cmp->max_bound, cmp->note};
    add(std::move(s));
  }

  // closed-form modulus gap off T (exact pipelines)
  if (p.h1 && p.h1->shrink().pullback().exact() && (p.power || p.gluing)) {
    double worst = 0.0;
    for (double r : spread_subset(grid, 8)) {
      if (r <= 0) continue;
      if (p.exclude_exceptional && p.schedule && p.schedule->in_exceptional(r)) continue;
      for (int i = 0; i < 64; ++i) {
        Vec x = r * random_unit(rng, cfg.dimension);
        double inner = x.norm() * p.h1->modulus_factor(x);
        double expect_log = p.power ? p.power->degree() * std::log(inner)
                                    : p.gluing->max_log_modulus(inner);
        if (p.gluing && p.gluing->in_blend(inner)) continue;  // modulus not circle-constant
        double got = p.map(x).norm();
        worst = std::max(worst, std::abs(std::log(got) - expect_log));
      }
    }
    add({"off-target-modulus", worst <= 1e-9, worst, 1e-9,
         "log-scale gap between measured |h| and the closed form"});
  }

  if (p.gluing) {
    const AnnulusGluing& D = *p.gluing;
    // circle-modulus constancy off E_eps
    double worst_c = 0.0;
    int used = 0;
    for (double r : grid) {
      if (r <= 0 || p.schedule->in_exceptional(r) || D.in_blend(r)) continue;
      if (++used > 8) break;
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& z : circle_grid(r, 2048)) {
        double m = D.eval(z).norm();
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      if (hi > 0) worst_c = std::max(worst_c, (hi - lo) / hi);
    }
    add({"circle-constancy-off-E", worst_c <= 1e-9, worst_c, 1e-9, ""});

    // max modulus strictly increasing
    double min_diff = std::numeric_limits<double>::infinity();
    double prev = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (double r : grid) {
      if (r <= 0) continue;
      double m = D.max_log_modulus(r);
      if (!first) min_diff = std::min(min_diff, m - prev);
      prev = m;
      first = false;
    }
    if (!std::isfinite(min_diff)) min_diff = 0.0;
    add({"maxmod-monotone", min_diff > 0.0, min_diff, 0.0,
         "min increment of log M(r) along the grid"});

    // winding degree increments by one across each blend annulus covered by
    // the grid (computed in log-polar form, overflow-free)
    auto gluing_winding = [&D](double r, int samples) {
      double total = 0.0, prev = 0.0;
      double lr = std::log(r);
      for (int i = 0; i <= samples; ++i) {
        double th = 2.0 * kPi * i / samples;
        double ang = D.eval_log_polar(lr, th).second;
        if (i > 0) {
          double d = ang - prev;
          while (d > kPi) d -= 2.0 * kPi;
          while (d <= -kPi) d += 2.0 * kPi;
          total += d;
        }
        prev = ang;
      }
      return total / (2.0 * kPi);
    };
    double worst_w = 0.0;
    bool ok_w = true;
    const auto& radii = p.schedule->radii();
    for (std::size_t k = 2; k <= radii.size(); ++k) {
      double blend_lo = p.schedule->epsilon() * radii[k - 1];
      double blend_hi = radii[k - 1];
      double w_before = gluing_winding(blend_lo * 0.98, 4096);
      double w_after = gluing_winding(blend_hi * 1.02, 4096);
      worst_w = std::max({worst_w, std::abs(w_before - std::round(w_before)),
                          std::abs(w_after - std::round(w_after))});
      ok_w = ok_w && std::lround(w_after) - std::lround(w_before) == 1 &&
             std::lround(w_before) == static_cast<long>(k) - 1;
    }
    add({"winding-increments", ok_w && worst_w <= 1e-6, worst_w, 1e-6,
         "integer windings, +1 across each blend annulus in range"});

    // logarithmic density of E_eps decreasing along the schedule radii
    if (radii.size() >= 3) {
      double min_drop = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k + 1 < std::min<std::size_t>(radii.size(), 4); ++k) {
        double d0 = p.schedule->log_density(radii[k]);
        double d1 = p.schedule->log_density(radii[k + 1]);
        min_drop = std::min(min_drop, d0 - d1);
      }
      add({"log-density-decreasing", min_drop > 0.0, min_drop, 0.0, ""});
    }
  }
}

void run_distortion(const ExperimentConfig& cfg, const Pipeline& p, RunReport& report) {
  if (cfg.verify.distortion_samples <= 0) return;
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  DistortionSummary sum;
  sum.probe_radius = cfg.verify.probe_radius;

  if (p.h1) {
    // roundness of the vertical shrink in lift coordinates (bound 3 + slack)
    const ShrinkMap& f = p.h1->shrink();
    MapExpr fmap;
    fmap.dimension = cfg.dimension;
    fmap.name = "shrink-f";
    fmap.fn = [f](const Vec& y) { return f.apply(y); };
    std::vector<Vec> pts;
    for (int i = 0; i < cfg.verify.distortion_samples; ++i)
      pts.push_back(random_point(rng, cfg.dimension, 4.0));
    auto rep = distortion_probe(fmap, pts, cfg.verify.probe_radius, DistortionMode::Roundness, 64);
    for (const auto& e : rep.entries)
      if (!e.degenerate) sum.shrink_roundness_max = std::max(sum.shrink_roundness_max, e.value);
    report.pass = report.pass && sum.shrink_roundness_max <= 3.05;
    report.suites.push_back({"shrink-roundness", sum.shrink_roundness_max <= 3.05,
                             sum.shrink_roundness_max, 3.05, ""});
  }

  // informational Jacobian conditioning of the final map on mid-grid circles
  std::vector<Vec> pts;
  double r_mid = 1.0;
  if (!report.rows.empty()) r_mid = report.rows[report.rows.size() / 2].r;
  for (int i = 0; i < cfg.verify.distortion_samples; ++i)
    pts.push_back(std::max(r_mid, 1e-3) * random_unit(rng, cfg.dimension));
  auto rep =
      distortion_probe(p.map, pts, cfg.verify.probe_radius, DistortionMode::Jacobian, 64);
  sum.map_h_min = rep.min;
  sum.map_h_median = rep.median;
  sum.map_h_p95 = rep.p95;
  sum.map_h_max = rep.max;
  sum.excluded_points = static_cast<long>(rep.excluded.size());
  report.distortion = sum;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport report;
  report.config = cfg;
  report.config_echo = cfg.to_json_text();
  Timer timer;

  Pipeline p = build_pipeline(cfg);
  report.notes = p.notes;
  report.timings_sec.push_back({"build", timer.lap()});

  MaxModBudget budget;
  budget.samples = cfg.verify.samples_per_sphere;
  budget.refine_iters = cfg.verify.refine_iters;
  MMSExtract extract = extract_mms(p.map, cfg.verify.r_grid.radii(), budget,
                                   p.schedule ? &*p.schedule : nullptr);
  report.extracted_points = extract.points;
  report.timings_sec.push_back({"extract", timer.lap()});

  std::optional<TargetComparison> cmp;
  int sections = cfg.verify.section_count > 0 ? cfg.verify.section_count
                                              : cfg.verify.samples_per_sphere;
  if (p.compare) {
    cmp = compare_to_target(extract, p.oracle, p.exclude_exceptional, sections);
    for (double r : extract.grid) {
      try {
        SphereSection sec = p.oracle.sphere_section(r, std::min(sections, 256));
        report.target_points.insert(report.target_points.end(), sec.samples.begin(),
                                    sec.samples.end());
      } catch (const EmptySectionError&) {
      }
    }
  }
  report.timings_sec.push_back({"compare", timer.lap()});

  for (std::size_t i = 0; i < extract.grid.size(); ++i) {
    ReportRow row;
    row.r = extract.grid[i];
    row.m_est = extract.per_radius[i].m_est;
    row.argmax_count = static_cast<long>(extract.per_radius[i].argmax.size());
    row.in_exceptional = extract.in_exceptional[i];
    if (cmp) row.hausdorff = cmp->rows[i].hausdorff;
    report.rows.push_back(row);
  }

  run_suites(cfg, p, extract, cmp, report);
  report.timings_sec.push_back({"suites", timer.lap()});
  run_distortion(cfg, p, report);
  report.timings_sec.push_back({"distortion", timer.lap()});
  return report;
}

// ---------------------------------------------------------------------------
// Renderers

std::string render_csv(const RunReport& report) {
  std::string out = "r,M_est,argmax_count,hausdorff,in_exceptional\n";
  for (const auto& row : report.rows) {
    out += format_g12(row.r);
    out += ',';
    out += format_g12(row.m_est);
    out += ',';
    out += std::to_string(row.argmax_count);
    out += ',';
    out += format_g12(row.hausdorff);
    out += ',';
    out += row.in_exceptional ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string render_json(const RunReport& report) {
  json j;
  j["config"] = json::parse(report.config_echo);
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["r"] = round_g12(row.r);
    r["M_est"] = round_g12(row.m_est);
    r["argmax_count"] = row.argmax_count;
    if (std::isnan(row.hausdorff))
      r["hausdorff"] = nullptr;
    else
      r["hausdorff"] = round_g12(row.hausdorff);
    r["in_exceptional"] = row.in_exceptional;
    rows.push_back(r);
  }
  j["table"] = rows;
  json suites = json::array();
  for (const auto& s : report.suites) {
    json e;
    e["name"] = s.name;
    e["pass"] = s.pass;
    e["measured"] = round_g12(s.measured);
    e["bound"] = round_g12(s.bound);
    if (!s.note.empty()) e["note"] = s.note;
    suites.push_back(e);
  }
  j["suites"] = suites;
  if (report.distortion) {
    const auto& d = *report.distortion;
    j["distortion"] = {{"probe_radius", round_g12(d.probe_radius)},
                       {"shrink_roundness_max", round_g12(d.shrink_roundness_max)},
                       {"map_H_min", round_g12(d.map_h_min)},
                       {"map_H_median", round_g12(d.map_h_median)},
                       {"map_H_p95", round_g12(d.map_h_p95)},
                       {"map_H_max", round_g12(d.map_h_max)},
                       {"excluded_points", d.excluded_points}};
  }
  j["notes"] = report.notes;
  j["pass"] = report.pass;
  j["svg_emitted"] = report.config.dimension == 2;
  return j.dump(2) + "\n";
}

std::string render_svg(const RunReport& report) {
  double R = 1.0;
  for (const auto& row : report.rows) R = std::max(R, row.r);
  for (const auto& p : report.extracted_points) R = std::max(R, p.norm());
  R *= 1.05;
  const double size = 800.0;
  auto sx = [&](double x) { return format_g12((x / R * 0.5 + 0.5) * size); };
  auto sy = [&](double y) { return format_g12((0.5 - y / R * 0.5) * size); };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
         "viewBox=\"0 0 800 800\">\n";
  svg << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  // faint circles at a few grid radii
  std::size_t step = std::max<std::size_t>(1, report.rows.size() / 8);
  for (std::size_t i = 0; i < report.rows.size(); i += step) {
    svg << "<circle cx=\"400\" cy=\"400\" r=\"" << format_g12(report.rows[i].r / R * 0.5 * size)
        << "\" fill=\"none\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto& p : report.target_points)
    svg << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1])
        << "\" r=\"2.5\" fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n";
  for (const auto& p : report.extracted_points)
    svg << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1])
        << "\" r=\"1.2\" fill=\"#d62728\"/>\n";
  svg << "<text x=\"12\" y=\"20\" font-family=\"monospace\" font-size=\"14\">target T "
         "(blue), extracted M-set (red)</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

EmitResult emit_outputs(const RunReport& report, const std::string& out_dir_override) {
  namespace fs = std::filesystem;
  EmitResult result;
  fs::path dir = out_dir_override.empty() ? report.config.output.dir : out_dir_override;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create " + dir.string());
  auto write = [&](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_outputs: cannot open " + path.string());
    out << content;
    if (!out) throw std::runtime_error("emit_outputs: write failed for " + path.string());
    result.paths.push_back(path.string());
  };
  write(dir / report.config.output.csv, render_csv(report));
  write(dir / report.config.output.json, render_json(report));
  if (report.config.dimension == 2) {
    write(dir / report.config.output.svg, render_svg(report));
    result.svg_written = true;
  }
  return result;
}

}  // namespace qrmax
