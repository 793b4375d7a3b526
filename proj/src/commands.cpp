#include "curvtomo/commands.hpp"

#include <Eigen/Geometry>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "curvtomo/coefficients.hpp"
#include "curvtomo/errors.hpp"
#include "curvtomo/forward_model.hpp"
#include "curvtomo/measurement_sim.hpp"
#include "curvtomo/oracle.hpp"
#include "curvtomo/rng.hpp"
#include "curvtomo/tomography.hpp"

namespace curvtomo {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr int kPairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
const char* const kPairNames[6] = {"11", "22", "33", "12", "13", "23"};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number_or_null(m(i, j)));
    out.push_back(row);
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v[i]));
  return out;
}

json shape_json(const DetectorShape& s) {
  const Eigen::AngleAxisd aa(s.rotation());
  return {{"axes", vector_json(s.axes())},
          {"rotation", {{"axis", vector_json(aa.axis())}, {"angle", aa.angle()}}},
          {"coupling", s.coupling()}};
}

std::vector<std::string> symmetric_cells(const Eigen::Matrix3d& m) {
  std::vector<std::string> out;
  for (const auto& p : kPairs) out.push_back(format_double(m(p[0], p[1])));
  return out;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

std::vector<std::string> symmetric_header(const std::string& prefix) {
  std::vector<std::string> out;
  for (const char* n : kPairNames) out.push_back(prefix + n);
  return out;
}

std::vector<ShapeSpec> pool_of(const Config& cfg, const DesignSpec& d) {
  switch (d.pool) {
    case DesignSpec::Pool::Canonical: {
      std::vector<ShapeSpec> out;
      const auto pool = canonical_pool(d.size, d.coupling);
      for (std::size_t k = 0; k < pool.size(); ++k)
        out.push_back({"canonical" + std::to_string(k), pool[k]});
      return out;
    }
    case DesignSpec::Pool::Shapes:
      if (cfg.shapes.empty()) throw ConfigError("$.design.pool: 'shapes' selected but $.shapes is empty");
      return cfg.shapes;
    case DesignSpec::Pool::Listed: {
      std::vector<ShapeSpec> out;
      for (const auto& id : d.listed)
        for (const auto& s : cfg.shapes)
          if (s.id == id) out.push_back(s);
      return out;
    }
  }
  return {};
}

struct BuiltDesign {
  ExperimentDesign design;
  std::vector<std::string> ids;
};

BuiltDesign build_design(const Config& cfg) {
  const DesignSpec spec = cfg.design.value_or(DesignSpec{});
  const auto pool = pool_of(cfg, spec);
  std::vector<DetectorShape> shapes;
  for (const auto& s : pool) shapes.push_back(s.shape);
  BuiltDesign out;
  out.design = spec.greedy ? design_experiment(shapes, spec.count) : make_design(shapes);
  for (const auto& p : out.design.probes) out.ids.push_back(pool[p.pool_index].id);
  return out;
}

const CurvaturePoint& need_curvature(const Config& cfg, const std::string& command) {
  if (!cfg.curvature) throw ConfigError("$.curvature: required by '" + command + "'");
  return *cfg.curvature;
}

json design_json(const BuiltDesign& b) {
  json probes = json::array();
  for (std::size_t k = 0; k < b.design.probes.size(); ++k) {
    const auto& p = b.design.probes[k];
    json j = shape_json(p.shape);
    j["id"] = b.ids[k];
    j["pool_index"] = p.pool_index;
    j["boost"] = {{"direction", vector_json(p.boost.direction)}, {"speed", p.boost.speed}};
    probes.push_back(j);
  }
  return {{"columns", parameter_names()},
          {"probes", probes},
          {"matrix", matrix_json(b.design.matrix)},
          {"rank", b.design.rank},
          {"condition_number", number_or_null(b.design.condition_number)}};
}

json recovery_json(const RecoveryResult& r, const CurvaturePoint* truth) {
  json params = json::object();
  for (int k = 0; k < kUnknowns; ++k) params[parameter_names()[k]] = r.parameters[k];
  json derived = json::object();
  for (int k = 0; k < kDerived; ++k) derived[derived_names()[k]] = r.derived[k];
  json sd = json::object();
  for (int k = 0; k < kDerived; ++k) sd[derived_names()[k]] = std::sqrt(r.derived_covariance(k, k));
  json out = {{"parameters", params},
              {"derived", derived},
              {"derived_std", sd},
              {"m", matrix_json(r.m)},
              {"n", matrix_json(r.n)},
              {"r_scalar", r.r_scalar},
              {"ricci_spatial", matrix_json(r.ricci_spatial)},
              {"riemann_tautau_block", matrix_json(r.riemann_tautau_block)},
              {"omega0", r.omega0},
              {"r_tautau", r.r_tautau},
              {"covariance", matrix_json(r.covariance)},
              {"residual_norm", r.residual_norm},
              {"condition_number", r.condition_number}};
  if (truth) {
    const Vector15d t = derived_of(*truth);
    json tj = json::object();
    for (int k = 0; k < kDerived; ++k) tj[derived_names()[k]] = t[k];
    out["truth"] = tj;
    out["max_abs_error"] = (r.derived - t).cwiseAbs().maxCoeff();
  }
  return out;
}

std::vector<std::string> recovery_row_header() {
  return {"quantity", "value", "std", "truth"};
}

void recovery_rows(CommandResult& res, const RecoveryResult& r, const CurvaturePoint* truth) {
  res.csv_header = recovery_row_header();
  const Vector15d t = truth ? derived_of(*truth) : Vector15d::Constant(std::nan(""));
  for (int k = 0; k < kDerived; ++k)
    res.csv_rows.push_back({derived_names()[k], format_double(r.derived[k]),
                            format_double(std::sqrt(r.derived_covariance(k, k))),
                            format_double(t[k])});
}

std::vector<ShapeSpec> shapes_or_fail(const Config& cfg, const std::string& command) {
  if (cfg.shapes.empty()) throw ConfigError("$.shapes: '" + command + "' needs at least one shape");
  return cfg.shapes;
}

OracleConfig oracle_of(const Config& cfg, const RunOptions& opt) {
  OracleConfig o = cfg.oracle;
  if (opt.seed) o.seed = *opt.seed;
  o.validate();
  return o;
}

json checks_json(const ValidationReport& rep) {
  json out = json::array();
  for (const auto& c : rep.checks) {
    out.push_back({{"name", c.name},
                   {"engine", c.engine},
                   {"oracle", c.oracle},
                   {"tolerance", c.tolerance},
                   {"engine_agrees", c.engine_agrees},
                   {"tabulated", number_or_null(c.tabulated.value)},
                   {"tabulated_defined", c.tabulated.defined},
                   {"tabulated_note", c.tabulated.note},
                   {"tabulated_over_oracle", number_or_null(c.tabulated_over_oracle)}});
  }
  return out;
}

// ---- commands ----

CommandResult cmd_coeffs(const Config& cfg, const RunOptions& opt) {
  const auto shapes = shapes_or_fail(cfg, "coeffs");
  std::vector<DetectorShape> list;
  for (const auto& s : shapes) list.push_back(s.shape);
  const auto sets = full_set_batch(list);

  CommandResult res;
  res.csv_header = {"id", "a", "b", "c", "coupling", "L0"};
  append(res.csv_header, symmetric_header("Q"));
  append(res.csv_header, {"D1", "D2", "D3"});
  append(res.csv_header, symmetric_header("L"));
  append(res.csv_header, {"LR", "Lomega", "prov_L0", "prov_Q", "prov_D", "prov_L", "prov_LR",
                          "prov_Lomega"});

  std::vector<ValidationReport> reports;
  if (opt.validate) {
    const auto oc = oracle_of(cfg, opt);
    for (const auto& s : list) reports.push_back(validate_coefficients(s, oc));
    for (const auto& c : reports.front().checks) {
      res.csv_header.push_back("oracle_" + c.name);
      res.csv_header.push_back("agrees_" + c.name);
    }
  }

  json rows = json::array();
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const auto& c = sets[k];
    const auto& s = shapes[k].shape;
    json j = shape_json(s);
    j["id"] = shapes[k].id;
    j["L0"] = c.l0;
    j["Q"] = matrix_json(c.q);
    j["D"] = vector_json(c.d);
    j["L"] = matrix_json(c.lij);
    j["LR"] = c.lr;
    j["Lomega"] = c.lomega;
    j["provenance"] = {{"L0", to_string(c.provenance.l0)},   {"Q", to_string(c.provenance.q)},
                       {"D", to_string(c.provenance.d)},     {"L", to_string(c.provenance.lij)},
                       {"LR", to_string(c.provenance.lr)},   {"Lomega", to_string(c.provenance.lomega)}};

    std::vector<std::string> row = {shapes[k].id, format_double(s.a()), format_double(s.b()),
                                    format_double(s.c()), format_double(s.coupling()),
                                    format_double(c.l0)};
    append(row, symmetric_cells(c.q));
    for (int i = 0; i < 3; ++i) row.push_back(format_double(c.d[i]));
    append(row, symmetric_cells(c.lij));
    append(row, {format_double(c.lr), format_double(c.lomega), to_string(c.provenance.l0),
                 to_string(c.provenance.q), to_string(c.provenance.d),
                 to_string(c.provenance.lij), to_string(c.provenance.lr),
                 to_string(c.provenance.lomega)});
    if (opt.validate) {
      j["validation"] = {{"all_engine_agree", reports[k].all_engine_agree()},
                         {"checks", checks_json(reports[k])}};
      for (const auto& ch : reports[k].checks) {
        row.push_back(format_double(ch.oracle));
        row.push_back(ch.engine_agrees ? "true" : "false");
      }
      if (!reports[k].all_engine_agree())
        res.warnings.push_back("shape " + shapes[k].id + ": engine disagrees with oracle");
    }
    rows.push_back(j);
    res.csv_rows.push_back(row);
  }
  res.report = {{"rows", rows}};
  return res;
}

CommandResult cmd_forward(const Config& cfg, const RunOptions&) {
  const auto& truth = need_curvature(cfg, "forward");
  std::vector<ShapeSpec> shapes = cfg.shapes;
  if (shapes.empty()) {
    const auto pool = canonical_pool();
    for (std::size_t k = 0; k < pool.size(); ++k)
      shapes.push_back({"canonical" + std::to_string(k), pool[k]});
  }
  CommandResult res;
  res.csv_header = {"id",         "p0",        "volume",          "accel",  "vanvleck", "scalar",
                    "state",      "p",         "out_of_validity", "clamped", "shots_for_5sigma"};
  json rows = json::array();
  for (const auto& s : shapes) {
    const auto b = excitation_probability(full_set(s.shape), truth);
    const double shots = shots_for_5sigma(b);
    rows.push_back({{"id", s.id},
                    {"p0", b.p0},
                    {"corrections",
                     {{"volume", b.correction_volume},
                      {"accel", b.correction_accel},
                      {"vanvleck", b.correction_vanvleck},
                      {"scalar", b.correction_scalar},
                      {"state", b.correction_state}}},
                    {"p", b.p},
                    {"out_of_validity", b.out_of_validity},
                    {"clamped", b.clamped},
                    {"shots_for_5sigma", number_or_null(shots)}});
    res.csv_rows.push_back({s.id, format_double(b.p0), format_double(b.correction_volume),
                            format_double(b.correction_accel), format_double(b.correction_vanvleck),
                            format_double(b.correction_scalar), format_double(b.correction_state),
                            format_double(b.p), b.out_of_validity ? "true" : "false",
                            b.clamped ? "true" : "false", format_double(shots)});
    if (b.out_of_validity)
      res.warnings.push_back("shape " + s.id +
                             ": curvature correction exceeds 10% of p0; expansion out of validity");
    if (b.clamped) res.warnings.push_back("shape " + s.id + ": probability clamped to [0, 1]");
  }
  res.report = {{"curvature", cfg.curvature_label}, {"rows", rows}};
  return res;
}

CommandResult cmd_design(const Config& cfg, const RunOptions&) {
  const auto built = build_design(cfg);
  CommandResult res;
  res.report = design_json(built);
  res.csv_header = {"id"};
  for (const auto& n : parameter_names()) res.csv_header.push_back(n);
  for (Eigen::Index k = 0; k < built.design.matrix.rows(); ++k) {
    std::vector<std::string> row = {built.ids[static_cast<std::size_t>(k)]};
    for (int c = 0; c < kUnknowns; ++c) row.push_back(format_double(built.design.matrix(k, c)));
    res.csv_rows.push_back(row);
  }
  return res;
}

std::vector<double> p0s_of(const ExperimentDesign& d) {
  std::vector<double> out;
  for (const auto& p : d.probes) out.push_back(p0_of(p.coeffs.l0));
  return out;
}

CommandResult cmd_recover(const Config& cfg, const RunOptions&) {
  const auto built = build_design(cfg);
  const CurvaturePoint* truth = cfg.curvature ? &*cfg.curvature : nullptr;
  std::vector<Measurement> meas = cfg.measurements;
  std::string source = "measurements";
  if (meas.empty()) {
    if (!truth) throw ConfigError("$.measurements: required by 'recover' when $.curvature is absent");
    for (const auto& b : forward_design(built.design, *truth)) meas.push_back({b.p, 1.0});
    source = "noiseless_forward";
  } else if (meas.size() != built.design.probes.size()) {
    throw ConfigError("$.measurements: " + std::to_string(meas.size()) +
                      " entries for a design of " + std::to_string(built.design.probes.size()) +
                      " probes");
  }
  const auto r = solve(built.design, meas, p0s_of(built.design));
  CommandResult res;
  res.report = {{"source", source}, {"design", design_json(built)},
                {"recovery", recovery_json(r, truth)}};
  recovery_rows(res, r, truth);
  return res;
}

CampaignSpec campaign_of(const Config& cfg, const RunOptions& opt, const std::string& command) {
  if (!cfg.campaign) throw ConfigError("$.campaign: required by '" + command + "'");
  CampaignSpec c = *cfg.campaign;
  if (opt.seed) c.seed = *opt.seed;
  return c;
}

CommandResult cmd_simulate(const Config& cfg, const RunOptions& opt) {
  const auto& truth = need_curvature(cfg, "simulate");
  const auto spec = campaign_of(cfg, opt, "simulate");
  const auto built = build_design(cfg);
  const auto out = run_campaign({built.design, truth, spec.shots, spec.seed});

  CommandResult res;
  res.csv_header = {"id", "p_truth", "clicks", "p_hat", "sigma"};
  json probes = json::array();
  for (const auto& p : out.probes) {
    const auto& id = built.ids[p.probe];
    probes.push_back({{"id", id},
                      {"p_truth", p.p_truth},
                      {"p0", p.p0},
                      {"clicks", p.clicks},
                      {"p_hat", p.measured.p},
                      {"sigma", p.measured.sigma},
                      {"shots_for_5sigma", number_or_null(shots_for_5sigma(p.breakdown))}});
    res.csv_rows.push_back({id, format_double(p.p_truth), std::to_string(p.clicks),
                            format_double(p.measured.p), format_double(p.measured.sigma)});
  }
  res.report = {{"shots_per_probe", spec.shots},
                {"seed", spec.seed},
                {"probes", probes},
                {"recovery", recovery_json(out.recovery, &truth)}};
  return res;
}

CommandResult cmd_boost_recover(const Config& cfg, const RunOptions& opt) {
  const auto& truth = need_curvature(cfg, "boost-recover");
  if (cfg.frames.empty()) throw ConfigError("$.frames: 'boost-recover' needs at least one frame");
  const auto built = build_design(cfg);
  std::optional<CampaignSpec> spec;
  if (cfg.campaign) spec = campaign_of(cfg, opt, "boost-recover");

  std::vector<FrameMeasurement> frames;
  json frame_reports = json::array();
  for (std::size_t f = 0; f < cfg.frames.size(); ++f) {
    const ExperimentDesign d = built.design.in_frame(cfg.frames[f]);
    RecoveryResult r;
    if (spec) {
      r = run_campaign({d, truth, spec->shots, stream_key({spec->seed, f})}).recovery;
    } else {
      std::vector<Measurement> meas;
      for (const auto& b : forward_design(d, truth)) meas.push_back({b.p, 1.0});
      r = solve(d, meas, p0s_of(d));
    }
    frames.push_back({cfg.frames[f], r});
    frame_reports.push_back({{"direction", vector_json(cfg.frames[f].direction)},
                             {"speed", cfg.frames[f].speed},
                             {"r_tautau", r.r_tautau},
                             {"ricci_spatial", matrix_json(r.ricci_spatial)},
                             {"riemann_tautau_block", matrix_json(r.riemann_tautau_block)}});
  }
  const auto mf = multi_frame_recovery(frames);
  const Vector20d got = mf.riemann.independent();
  const Vector20d want = truth.riemann.independent();

  CommandResult res;
  res.csv_header = {"component", "value", "truth"};
  json comps = json::object(), truth_comps = json::object();
  const auto& names = RiemannTensor::independent_names();
  for (int k = 0; k < RiemannTensor::kIndependent; ++k) {
    comps[names[k]] = got[k];
    truth_comps[names[k]] = want[k];
    res.csv_rows.push_back({names[k], format_double(got[k]), format_double(want[k])});
  }
  res.report = {{"mode", spec ? "simulated" : "noiseless"},
                {"frames", frame_reports},
                {"riemann", comps},
                {"truth", truth_comps},
                {"max_abs_error", (got - want).cwiseAbs().maxCoeff()},
                {"rank", mf.rank},
                {"condition_number", mf.condition_number},
                {"residual_norm", mf.residual_norm},
                {"symmetry_defect", mf.riemann.symmetry_defect()}};
  return res;
}

CommandResult cmd_validate(const Config& cfg, const RunOptions& opt) {
  std::vector<ShapeSpec> shapes = cfg.shapes;
  if (shapes.empty()) shapes.push_back({"unit_sphere", DetectorShape::sphere(1.0)});
  const auto oc = oracle_of(cfg, opt);
  const std::array<KernelKind, 6> kernels = {
      KernelKind::one(),           KernelKind::linear(0),       KernelKind::quadratic(0, 1),
      KernelKind::diff_quadratic(0, 1), KernelKind::diff_squared_log(), KernelKind::diff_squared()};

  CommandResult res;
  res.csv_header = {"id", "check", "engine", "oracle", "engine_agrees", "tabulated_over_oracle"};
  json rows = json::array();
  bool all_ok = true;
  for (const auto& s : shapes) {
    const auto rep = validate_coefficients(s.shape, oc);
    json mc = json::array();
    for (const auto& k : kernels) {
      const double quad = b_functional(s.shape, k, oc);
      const auto est = b_functional_mc(s.shape, k, oc);
      const double z = est.std_error > 0.0 ? (est.estimate - quad) / est.std_error : 0.0;
      mc.push_back({{"kernel", k.name()},
                    {"quadrature", quad},
                    {"monte_carlo", est.estimate},
                    {"std_error", est.std_error},
                    {"z", z}});
      if (std::abs(z) > 4.0) res.warnings.push_back("shape " + s.id + ": Monte Carlo kernel " + k.name() + " off by " + format_double(z) + " standard errors");
    }
    for (const auto& c : rep.checks)
      res.csv_rows.push_back({s.id, c.name, format_double(c.engine), format_double(c.oracle),
                              c.engine_agrees ? "true" : "false",
                              format_double(c.tabulated_over_oracle)});
    all_ok = all_ok && rep.all_engine_agree();
    rows.push_back(json{{"id", s.id},
                        {"shape", shape_json(s.shape)},
                        {"all_engine_agree", rep.all_engine_agree()},
                        {"checks", checks_json(rep)},
                        {"monte_carlo", mc}});
  }
  res.report = {{"rows", rows}, {"all_engine_agree", all_ok}};
  if (!all_ok) {
    res.exit_code = kExitRuntime;
    res.error = "coefficient engine disagrees with the quadrature oracle";
  }
  return res;
}

using Handler = std::function<CommandResult(const Config&, const RunOptions&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"coeffs", cmd_coeffs},   {"forward", cmd_forward},
      {"design", cmd_design},   {"recover", cmd_recover},
      {"simulate", cmd_simulate}, {"boost-recover", cmd_boost_recover},
      {"validate", cmd_validate}};
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"coeffs",   "forward",       "design",  "recover",
                                                 "simulate", "boost-recover", "validate"};
  return names;
}

CommandResult run_command(const std::string& name, const Config& cfg, const RunOptions& opt) {
  const auto it = handlers().find(name);
  CommandResult res;
  if (it == handlers().end()) {
    res.exit_code = kExitUsage;
    res.error = "unknown command '" + name + "'";
  } else {
    try {
      res = it->second(cfg, opt);
    } catch (const ConfigError& e) {
      res = {};
      res.exit_code = kExitUsage;
      res.error = e.what();
    } catch (const std::exception& e) {
      res = {};
      res.exit_code = kExitRuntime;
      res.error = e.what();
    }
  }
  res.report["command"] = name;
  res.report["status"] = res.exit_code == kExitOk ? "ok" : "error";
  if (!res.error.empty()) res.report["error"] = res.error;
  res.report["warnings"] = res.warnings;
  return res;
}

std::string to_csv(const CommandResult& r) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + quote(cells[k]);
    out += "\n";
  };
  line(r.csv_header);
  for (const auto& row : r.csv_rows) line(row);
  return out;
}

std::string write_outputs(const std::string& command, const CommandResult& r,
                          const std::string& dir, const std::string& format) {
  const std::string body = format == "csv" ? to_csv(r) : r.report.dump(2) + "\n";
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / (command + "." + format)).string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
  return path;
}

}  // namespace curvtomo
