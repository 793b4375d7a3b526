#include "curvtomo/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "curvtomo/errors.hpp"
#include "json.hpp"

namespace curvtomo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!ok.count(key)) fail(path + "." + key, "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) fail(path, "expected a positive number");
  return v;
}

std::uint64_t count(const json& j, const std::string& path, std::uint64_t min) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    fail(path, "expected a non-negative integer");
  const auto v = j.get<std::uint64_t>();
  if (v < min) fail(path, "expected an integer >= " + std::to_string(min));
  return v;
}

Eigen::Vector3d vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) v[k] = number(j[k], path + "[" + std::to_string(k) + "]");
  return v;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

ShapeSpec parse_shape(const json& j, const std::string& path, std::size_t index) {
  only_keys(j, path, {"id", "axes", "rotation", "coupling"});
  if (!j.contains("axes")) fail(path + ".axes", "required");
  const Eigen::Vector3d axes = vec3(j["axes"], path + ".axes");
  for (int k = 0; k < 3; ++k)
    if (!(axes[k] > 0.0)) fail(path + ".axes[" + std::to_string(k) + "]", "expected a positive number");
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
  if (j.contains("rotation")) {
    const auto& r = j["rotation"];
    only_keys(r, path + ".rotation", {"axis", "angle"});
    if (r.contains("axis")) axis = vec3(r["axis"], path + ".rotation.axis");
    if (r.contains("angle")) angle = number(r["angle"], path + ".rotation.angle");
    if (angle != 0.0 && axis.norm() == 0.0) fail(path + ".rotation.axis", "zero axis with nonzero angle");
  }
  const double coupling = j.contains("coupling") ? positive(j["coupling"], path + ".coupling") : 1.0;
  const std::string id = j.contains("id") ? text(j["id"], path + ".id") : "shape" + std::to_string(index);
  return {id, DetectorShape::from_axis_angle(axes, axis, angle, coupling)};
}

const std::array<std::string, 4> kCatalogNames = {"minkowski", "de_sitter",
                                                  "constant_spatial_curvature",
                                                  "schwarzschild_static"};

CurvaturePoint parse_curvature(const json& j, const std::string& path, std::string& label) {
  only_keys(j, path, {"catalog", "h", "k", "mass", "radius", "components", "accel", "omega0"});
  const bool has_catalog = j.contains("catalog");
  const bool has_components = j.contains("components");
  if (has_catalog == has_components) fail(path, "exactly one of 'catalog' or 'components' is required");

  CurvaturePoint point;
  if (has_catalog) {
    label = text(j["catalog"], path + ".catalog");
    CatalogEntry e;
    auto need = [&](const char* key) {
      if (!j.contains(key)) fail(path + "." + key, "required for catalog '" + label + "'");
      return number(j[key], path + "." + key);
    };
    auto forbid_except = [&](std::initializer_list<const char*> allowed) {
      for (const char* key : {"h", "k", "mass", "radius"}) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return std::string(a) == key; }) != allowed.end())
          continue;
        if (j.contains(key)) fail(path + "." + key, "not a parameter of catalog '" + label + "'");
      }
    };
    if (label == "minkowski") {
      forbid_except({});
      e.kind = CatalogEntry::Kind::Minkowski;
    } else if (label == "de_sitter") {
      forbid_except({"h"});
      e.kind = CatalogEntry::Kind::DeSitter;
      e.h = need("h");
    } else if (label == "constant_spatial_curvature") {
      forbid_except({"k"});
      e.kind = CatalogEntry::Kind::ConstantSpatialCurvature;
      e.k = need("k");
    } else if (label == "schwarzschild_static") {
      forbid_except({"mass", "radius"});
      e.kind = CatalogEntry::Kind::SchwarzschildStaticFrame;
      e.mass = need("mass");
      e.radius = need("radius");
    } else {
      std::string names;
      for (const auto& n : kCatalogNames) names += (names.empty() ? "" : ", ") + n;
      fail(path + ".catalog", "unknown catalog entry '" + label + "' (expected one of " + names + ")");
    }
    try {
      point = catalog(e);
    } catch (const std::exception& ex) {
      fail(path, ex.what());
    }
  } else {
    label = "components";
    for (const char* key : {"h", "k", "mass", "radius"})
      if (j.contains(key)) fail(path + "." + key, "only valid together with 'catalog'");
    const auto& c = j["components"];
    const std::string cpath = path + ".components";
    if (!c.is_object()) fail(cpath, "expected an object keyed by independent component names");
    const auto& names = RiemannTensor::independent_names();
    Vector20d values = Vector20d::Zero();
    for (const auto& [key, value] : c.items()) {
      const auto it = std::find(names.begin(), names.end(), key);
      if (it == names.end()) fail(cpath + "." + key, "not an independent Riemann component name");
      values[it - names.begin()] = number(value, cpath + "." + key);
    }
    point.riemann = RiemannTensor::from_independent(values);
  }
  if (j.contains("accel")) point.accel = vec3(j["accel"], path + ".accel");
  if (j.contains("omega0")) point.omega0 = number(j["omega0"], path + ".omega0");
  return point;
}

DesignSpec parse_design(const json& j, const std::string& path) {
  only_keys(j, path, {"pool", "count", "size", "coupling", "select"});
  DesignSpec d;
  if (j.contains("pool")) {
    const auto& p = j["pool"];
    if (p.is_string()) {
      const auto s = p.get<std::string>();
      if (s == "canonical") d.pool = DesignSpec::Pool::Canonical;
      else if (s == "shapes") d.pool = DesignSpec::Pool::Shapes;
      else fail(path + ".pool", "expected 'canonical', 'shapes' or a list of shape ids");
    } else if (p.is_array()) {
      d.pool = DesignSpec::Pool::Listed;
      for (std::size_t k = 0; k < p.size(); ++k)
        d.listed.push_back(text(p[k], path + ".pool[" + std::to_string(k) + "]"));
    } else {
      fail(path + ".pool", "expected 'canonical', 'shapes' or a list of shape ids");
    }
  }
  if (j.contains("count")) d.count = count(j["count"], path + ".count", 13);
  if (j.contains("size")) d.size = positive(j["size"], path + ".size");
  if (j.contains("coupling")) d.coupling = positive(j["coupling"], path + ".coupling");
  if (j.contains("select")) {
    const auto s = text(j["select"], path + ".select");
    if (s == "greedy") d.greedy = true;
    else if (s == "all") d.greedy = false;
    else fail(path + ".select", "expected 'greedy' or 'all'");
  }
  return d;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Config parse_config(const std::string& source) {
  json root;
  try {
    root = json::parse(source);
  } catch (const json::parse_error& e) {
    // byte points one past the offending character.
    const auto [line, col] = line_column(source, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": malformed JSON (" + e.what() + ")");
  }

  only_keys(root, "$", {"shapes", "curvature", "design", "campaign", "frames", "measurements",
                        "oracle", "output"});
  Config cfg;

  if (root.contains("shapes")) {
    const auto& s = root["shapes"];
    if (!s.is_array()) fail("$.shapes", "expected an array");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::string path = "$.shapes[" + std::to_string(k) + "]";
      auto spec = parse_shape(s[k], path, k);
      if (!ids.insert(spec.id).second) fail(path + ".id", "duplicate id '" + spec.id + "'");
      cfg.shapes.push_back(std::move(spec));
    }
  }

  if (root.contains("curvature"))
    cfg.curvature = parse_curvature(root["curvature"], "$.curvature", cfg.curvature_label);

  if (root.contains("design")) {
    cfg.design = parse_design(root["design"], "$.design");
    for (std::size_t k = 0; k < cfg.design->listed.size(); ++k) {
      const auto& id = cfg.design->listed[k];
      if (std::none_of(cfg.shapes.begin(), cfg.shapes.end(),
                       [&](const ShapeSpec& s) { return s.id == id; }))
        fail("$.design.pool[" + std::to_string(k) + "]", "no shape with id '" + id + "'");
    }
  }

  if (root.contains("campaign")) {
    const auto& c = root["campaign"];
    only_keys(c, "$.campaign", {"shots", "seed"});
    CampaignSpec spec;
    if (c.contains("shots")) spec.shots = count(c["shots"], "$.campaign.shots", 1);
    if (c.contains("seed")) spec.seed = count(c["seed"], "$.campaign.seed", 0);
    cfg.campaign = spec;
  }

  if (root.contains("frames")) {
    const auto& f = root["frames"];
    if (!f.is_array()) fail("$.frames", "expected an array");
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::string path = "$.frames[" + std::to_string(k) + "]";
      only_keys(f[k], path, {"direction", "speed"});
      const double speed = f[k].contains("speed") ? number(f[k]["speed"], path + ".speed") : 0.0;
      const Eigen::Vector3d dir = f[k].contains("direction")
                                      ? vec3(f[k]["direction"], path + ".direction")
                                      : Eigen::Vector3d::UnitX();
      try {
        cfg.frames.push_back(BoostSpec::make(dir, speed));
      } catch (const std::exception& e) {
        fail(path, e.what());
      }
    }
  }

  if (root.contains("measurements")) {
    const auto& m = root["measurements"];
    if (!m.is_array()) fail("$.measurements", "expected an array");
    for (std::size_t k = 0; k < m.size(); ++k) {
      const std::string path = "$.measurements[" + std::to_string(k) + "]";
      only_keys(m[k], path, {"p", "sigma"});
      if (!m[k].contains("p")) fail(path + ".p", "required");
      const double p = number(m[k]["p"], path + ".p");
      if (p < 0.0 || p > 1.0) fail(path + ".p", "probability outside [0, 1]");
      const double sigma = m[k].contains("sigma") ? positive(m[k]["sigma"], path + ".sigma") : 1.0;
      cfg.measurements.push_back({p, sigma});
    }
  }

  if (root.contains("oracle")) {
    const auto& o = root["oracle"];
    only_keys(o, "$.oracle", {"angular_tolerance", "mc_samples", "seed"});
    if (o.contains("angular_tolerance"))
      cfg.oracle.angular_tolerance = positive(o["angular_tolerance"], "$.oracle.angular_tolerance");
    if (o.contains("mc_samples"))
      cfg.oracle.mc_samples = count(o["mc_samples"], "$.oracle.mc_samples", 1);
    if (o.contains("seed")) cfg.oracle.seed = count(o["seed"], "$.oracle.seed", 0);
  }

  if (root.contains("output")) {
    const auto& o = root["output"];
    only_keys(o, "$.output", {"dir", "format"});
    if (o.contains("dir")) cfg.output.dir = text(o["dir"], "$.output.dir");
    if (o.contains("format")) {
      cfg.output.format = text(o["format"], "$.output.format");
      if (cfg.output.format != "json" && cfg.output.format != "csv")
        fail("$.output.format", "expected 'json' or 'csv'");
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace curvtomo
