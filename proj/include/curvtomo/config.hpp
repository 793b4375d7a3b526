#pragma once

// JSON run configuration. Units: lengths in an arbitrary user unit, axis
// parameters and curvature in inverse powers of it, coupling in the length
// unit; c = hbar = 1.
//
// {
//   "shapes":   [{"id": "s0", "axes": [a, b, c],
//                 "rotation": {"axis": [x, y, z], "angle": rad}, "coupling": lambda}],
//   "curvature": {"catalog": "minkowski" | "de_sitter" | "constant_spatial_curvature"
//                            | "schwarzschild_static",
//                 "h": ..., "k": ..., "mass": ..., "radius": ...,
//                 "components": {"0101": ..., ...},     // instead of "catalog"
//                 "accel": [ax, ay, az], "omega0": w},
//   "design":   {"pool": "canonical" | "shapes" | ["s0", "s3", ...],
//                "count": 13, "size": 1.0, "coupling": 1.0, "select": "greedy" | "all"},
//   "campaign": {"shots": n, "seed": s},
//   "frames":   [{"direction": [x, y, z], "speed": v}],
//   "measurements": [{"p": p, "sigma": s}],
//   "oracle":   {"angular_tolerance": t, "mc_samples": n, "seed": s},
//   "output":   {"dir": "path", "format": "json" | "csv"}
// }
//
// Every section is optional at parse time; commands check what they need.
// Unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvtomo/geometry.hpp"
#include "curvtomo/oracle.hpp"
#include "curvtomo/shape.hpp"
#include "curvtomo/tomography.hpp"

namespace curvtomo {

struct ShapeSpec {
  std::string id;
  DetectorShape shape;
};

struct DesignSpec {
  enum class Pool { Canonical, Shapes, Listed };
  Pool pool = Pool::Canonical;
  std::vector<std::string> listed;
  std::size_t count = 13;
  double size = 1.0;
  double coupling = 1.0;
  bool greedy = true;
};

struct CampaignSpec {
  std::uint64_t shots = 1000000;
  std::uint64_t seed = 1;
};

struct OutputSpec {
  std::string dir;
  std::string format = "json";
};

struct Config {
  std::vector<ShapeSpec> shapes;
  std::optional<CurvaturePoint> curvature;
  std::string curvature_label;
  std::optional<DesignSpec> design;
  std::optional<CampaignSpec> campaign;
  std::vector<BoostSpec> frames;
  std::vector<Measurement> measurements;
  OracleConfig oracle;
  OutputSpec output;
};

// Throws ConfigError with a key path (and line/column for syntax errors).
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

}  // namespace curvtomo
