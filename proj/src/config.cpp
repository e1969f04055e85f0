#include "qrmax/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qrmax {

using nlohmann::json;

std::vector<double> GridSpec::radii() const {
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    double w = double(i) / (count - 1);
    if (scale == "linear")
      out.push_back(min + w * (max - min));
    else
      out.push_back(min * std::pow(max / min, w));
  }
  return out;
}

namespace {

void check_fields(const json& j, const std::string& where,
                  const std::vector<std::string>& allowed, std::vector<std::string>& errors) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      errors.push_back(where + ": unknown field '" + it.key() + "'");
  }
}

SetConfig parse_set(const json& j, const std::string& where, std::vector<std::string>& errors);

SetConfig parse_set(const json& j, const std::string& where, std::vector<std::string>& errors) {
  SetConfig s;
  if (!j.is_object()) {
    errors.push_back(where + ": must be an object");
    return s;
  }
  check_fields(j, where,
               {"kind", "mode", "direction", "omega", "phase", "half_angle", "csv", "resolution",
                "children"},
               errors);
  s.kind = j.value("kind", s.kind);
  s.mode = j.value("mode", s.mode);
  if (s.mode != "exact" && s.mode != "cloud")
    errors.push_back(where + ".mode: must be 'exact' or 'cloud'");
  const std::vector<std::string> kinds{"full-space", "radial-ray", "log-spiral",
                                       "cone",       "point-cloud", "union"};
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
    errors.push_back(where + ".kind: unknown set kind '" + s.kind + "'");
  if (j.contains("direction")) {
    if (!j["direction"].is_array())
      errors.push_back(where + ".direction: must be an array of numbers");
    else
      s.direction = j["direction"].get<std::vector<double>>();
  }
  s.omega = j.value("omega", s.omega);
  s.phase = j.value("phase", s.phase);
  s.half_angle = j.value("half_angle", s.half_angle);
  s.csv = j.value("csv", s.csv);
  s.resolution = j.value("resolution", s.resolution);
  if (j.contains("children")) {
    int i = 0;
    for (const auto& c : j["children"])
      s.children.push_back(parse_set(c, where + ".children[" + std::to_string(i++) + "]", errors));
  }
  if (s.kind == "union" && s.children.empty())
    errors.push_back(where + ".children: union needs at least one child");
  if (s.kind == "point-cloud" && s.csv.empty())
    errors.push_back(where + ".csv: point-cloud needs a CSV path");
  if (s.kind == "point-cloud" && !(s.resolution > 0))
    errors.push_back(where + ".resolution: must be > 0");
  return s;
}

json set_to_json(const SetConfig& s) {
  json j;
  j["kind"] = s.kind;
  j["mode"] = s.mode;
  if (!s.direction.empty()) j["direction"] = s.direction;
  if (s.kind == "log-spiral") {
    j["omega"] = round_g12(s.omega);
    j["phase"] = round_g12(s.phase);
  }
  if (s.kind == "cone") j["half_angle"] = round_g12(s.half_angle);
  if (s.kind == "point-cloud") {
    j["csv"] = s.csv;
    j["resolution"] = round_g12(s.resolution);
  }
  if (s.kind == "union") {
    json kids = json::array();
    for (const auto& c : s.children) kids.push_back(set_to_json(c));
    j["children"] = kids;
  }
  return j;
}

ClosedSetOracle build_oracle_from(const SetConfig& s, int n) {
  auto to_vec = [&](const std::vector<double>& v) {
    Vec x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i];
    return x;
  };
  if (s.kind == "full-space") return ClosedSetOracle::full_space(n);
  if (s.kind == "radial-ray") {
    Vec d = s.direction.empty() ? (Vec)Vec::Unit(n, 0) : to_vec(s.direction);
    return ClosedSetOracle::radial_ray(d);
  }
  if (s.kind == "log-spiral") return ClosedSetOracle::log_spiral(s.omega, s.phase);
  if (s.kind == "cone") {
    Vec d = s.direction.empty() ? (Vec)Vec::Unit(n, 0) : to_vec(s.direction);
    return ClosedSetOracle::cone(d, s.half_angle);
  }
  if (s.kind == "point-cloud")
    return ClosedSetOracle::point_cloud_from_csv(s.csv, s.resolution);
  if (s.kind == "union") {
    std::vector<ClosedSetOracle> kids;
    for (const auto& c : s.children) kids.push_back(build_oracle_from(c, n));
    return ClosedSetOracle::set_union(std::move(kids));
  }
  throw ConfigError("set.kind: unknown set kind '" + s.kind + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  std::vector<std::string> errors;
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  check_fields(j, "config", {"dimension", "seed", "set", "map", "verify", "output"}, errors);

  c.dimension = j.value("dimension", 2);
  if (c.dimension < 2) errors.push_back("dimension: must be >= 2");
  if (j.contains("seed") && j["seed"].is_number_unsigned()) {
    c.seed = j["seed"].get<std::uint64_t>();
    c.seed_set = true;
  } else if (j.contains("seed") && j["seed"].is_number_integer() &&
             j["seed"].get<long long>() >= 0) {
    c.seed = static_cast<std::uint64_t>(j["seed"].get<long long>());
    c.seed_set = true;
  } else if (j.contains("seed")) {
    errors.push_back("seed: must be a non-negative integer");
  } else {
    errors.push_back("seed: required (wall-clock seeding is not allowed)");
  }

  if (j.contains("set")) c.set = parse_set(j["set"], "set", errors);
  else errors.push_back("set: required");

  if (j.contains("map")) {
    const json& m = j["map"];
    check_fields(m, "map", {"type", "degree", "epsilon", "radii", "block"}, errors);
    c.map.type = m.value("type", c.map.type);
    if (c.map.type != "polynomial" && c.map.type != "transcendental" && c.map.type != "raw")
      errors.push_back("map.type: must be polynomial | transcendental | raw");
    if (m.contains("degree")) {
      if (!m["degree"].is_number_integer())
        errors.push_back("map.degree: must be an integer");
      else
        c.map.degree = m["degree"].get<int>();
    }
    if (c.map.type == "polynomial" && c.map.degree < 2)
      errors.push_back("map.degree: polynomial degree must be an integer >= 2");
    c.map.epsilon = m.value("epsilon", c.map.epsilon);
    if (c.map.type == "transcendental" && !(c.map.epsilon > 0 && c.map.epsilon < 1))
      errors.push_back("map.epsilon: must lie in (0,1)");
    if (m.contains("radii")) {
      const json& r = m["radii"];
      check_fields(r, "map.radii", {"rule", "count", "list"}, errors);
      c.map.radii_rule = r.value("rule", c.map.radii_rule);
      c.map.radii_count = r.value("count", c.map.radii_count);
      if (r.contains("list")) c.map.radii_list = r["list"].get<std::vector<double>>();
      if (c.map.radii_rule != "exp-exp" && c.map.radii_list.empty())
        errors.push_back("map.radii.rule: unknown rule '" + c.map.radii_rule + "'");
      if (c.map.radii_count < 1) errors.push_back("map.radii.count: must be >= 1");
    }
    c.map.block = m.value("block", c.map.block);
    const std::vector<std::string> blocks{"zorich", "power", "h1", "gluing", "identity"};
    if (c.map.type == "raw" &&
        std::find(blocks.begin(), blocks.end(), c.map.block) == blocks.end())
      errors.push_back("map.block: unknown block '" + c.map.block + "'");
  } else {
    errors.push_back("map: required");
  }
  if (c.map.type == "transcendental" && c.dimension != 2)
    errors.push_back(
        "map.type: transcendental requires dimension 2 (the interior construction is "
        "modelled in the plane only)");

  if (j.contains("verify")) {
    const json& v = j["verify"];
    check_fields(v, "verify",
                 {"r_grid", "samples_per_sphere", "refine_iters", "section_count",
                  "distortion", "pullback"},
                 errors);
    if (v.contains("r_grid")) {
      const json& g = v["r_grid"];
      check_fields(g, "verify.r_grid", {"scale", "min", "max", "count"}, errors);
      c.verify.r_grid.scale = g.value("scale", c.verify.r_grid.scale);
      c.verify.r_grid.min = g.value("min", c.verify.r_grid.min);
      c.verify.r_grid.max = g.value("max", c.verify.r_grid.max);
      c.verify.r_grid.count = g.value("count", c.verify.r_grid.count);
    } else {
      errors.push_back("verify.r_grid: required");
    }
    if (c.verify.r_grid.scale != "linear" && c.verify.r_grid.scale != "geometric")
      errors.push_back("verify.r_grid.scale: must be linear | geometric");
    if (c.verify.r_grid.count < 1) errors.push_back("verify.r_grid.count: must be >= 1");
    if (!(c.verify.r_grid.min <= c.verify.r_grid.max))
      errors.push_back("verify.r_grid: min must be <= max");
    if (c.verify.r_grid.scale == "geometric" && !(c.verify.r_grid.min > 0))
      errors.push_back("verify.r_grid.min: geometric grids need min > 0");
    if (c.verify.r_grid.scale == "linear" && c.verify.r_grid.min < 0)
      errors.push_back("verify.r_grid.min: radii must be >= 0");
    c.verify.samples_per_sphere = v.value("samples_per_sphere", c.verify.samples_per_sphere);
    if (c.verify.samples_per_sphere < 4)
      errors.push_back("verify.samples_per_sphere: must be >= 4");
    c.verify.refine_iters = v.value("refine_iters", c.verify.refine_iters);
    c.verify.section_count = v.value("section_count", c.verify.section_count);
    if (v.contains("distortion")) {
      const json& d = v["distortion"];
      check_fields(d, "verify.distortion", {"samples", "probe_radius"}, errors);
      c.verify.distortion_samples = d.value("samples", 0);
      c.verify.probe_radius = d.value("probe_radius", c.verify.probe_radius);
      if (!(c.verify.probe_radius > 0))
        errors.push_back("verify.distortion.probe_radius: must be > 0");
    }
    if (v.contains("pullback")) {
      const json& p = v["pullback"];
      check_fields(p, "verify.pullback", {"mode", "cap", "t_step", "section_count"}, errors);
      c.verify.pullback.mode = p.value("mode", c.verify.pullback.mode);
      if (c.verify.pullback.mode != "auto" && c.verify.pullback.mode != "analytic" &&
          c.verify.pullback.mode != "sampled")
        errors.push_back("verify.pullback.mode: must be auto | analytic | sampled");
      c.verify.pullback.cap = p.value("cap", c.verify.pullback.cap);
      if (!(c.verify.pullback.cap > 0)) errors.push_back("verify.pullback.cap: must be > 0");
      c.verify.pullback.t_step = p.value("t_step", c.verify.pullback.t_step);
      c.verify.pullback.section_count = p.value("section_count", c.verify.pullback.section_count);
    }
  } else {
    errors.push_back("verify: required");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    check_fields(o, "output", {"dir", "csv", "json", "svg"}, errors);
    c.output.dir = o.value("dir", c.output.dir);
    c.output.csv = o.value("csv", c.output.csv);
    c.output.json = o.value("json", c.output.json);
    c.output.svg = o.value("svg", c.output.svg);
  }

  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["dimension"] = dimension;
  j["seed"] = seed;
  j["set"] = set_to_json(set);
  json m;
  m["type"] = map.type;
  if (map.type == "polynomial") m["degree"] = map.degree;
  if (map.type == "transcendental") {
    m["epsilon"] = round_g12(map.epsilon);
    json r;
    if (!map.radii_list.empty()) {
      json list = json::array();
      for (double v : map.radii_list) list.push_back(round_g12(v));
      r["list"] = list;
    } else {
      r["rule"] = map.radii_rule;
      r["count"] = map.radii_count;
    }
    m["radii"] = r;
  }
  if (map.type == "raw") m["block"] = map.block;
  if (map.type == "raw" && (map.block == "power")) m["degree"] = map.degree;
  if (map.type == "raw" && map.block == "gluing") {
    m["epsilon"] = round_g12(map.epsilon);
    json r;
    r["rule"] = map.radii_rule;
    r["count"] = map.radii_count;
    m["radii"] = r;
  }
  j["map"] = m;
  json v;
  v["r_grid"] = {{"scale", verify.r_grid.scale},
                 {"min", round_g12(verify.r_grid.min)},
                 {"max", round_g12(verify.r_grid.max)},
                 {"count", verify.r_grid.count}};
  v["samples_per_sphere"] = verify.samples_per_sphere;
  v["refine_iters"] = verify.refine_iters;
  if (verify.section_count > 0) v["section_count"] = verify.section_count;
  if (verify.distortion_samples > 0)
    v["distortion"] = {{"samples", verify.distortion_samples},
                       {"probe_radius", round_g12(verify.probe_radius)}};
  v["pullback"] = {{"mode", verify.pullback.mode},
                   {"cap", round_g12(verify.pullback.cap)},
                   {"t_step", round_g12(verify.pullback.t_step)},
                   {"section_count", verify.pullback.section_count}};
  j["verify"] = v;
  j["output"] = {{"dir", output.dir},
                 {"csv", output.csv},
                 {"json", output.json},
                 {"svg", output.svg}};
  return j.dump(2) + "\n";
}

ClosedSetOracle ExperimentConfig::build_oracle() const {
  ClosedSetOracle base = build_oracle_from(set, dimension);
  if (base.dimension() != dimension)
    throw ConfigError("set: oracle dimension " + std::to_string(base.dimension()) +
                      " does not match config dimension " + std::to_string(dimension));
  if (set.mode == "cloud" && set.kind != "point-cloud") {
    // cloud twin: sample sections over the verification grid
    std::vector<Vec> pts;
    for (double r : verify.r_grid.radii()) {
      try {
        SphereSection sec = base.sphere_section(r, std::max(64, verify.samples_per_sphere / 4));
        pts.insert(pts.end(), sec.samples.begin(), sec.samples.end());
      } catch (const EmptySectionError&) {
      }
    }
    if (pts.empty()) throw ConfigError("set.mode=cloud: no section samples on the grid");
    return ClosedSetOracle::point_cloud(std::move(pts), set.resolution);
  }
  return base;
}

}  // namespace qrmax
