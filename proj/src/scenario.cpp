// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "porocontact/gmsh_io.hpp"
#include "porocontact/outputs.hpp"

namespace porocontact {

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

const char* friction_model_name(FrictionSpec::Model m) {
  switch (m) {
    case FrictionSpec::Model::Constant: return "constant";
    case FrictionSpec::Model::TipGaussian: return "tip_gaussian";
    case FrictionSpec::Model::RimExponential: return "rim_exponential";
  }
  return "constant";
}

FrictionSpec::Model friction_model_from(const std::string& s) {
  if (s == "constant") return FrictionSpec::Model::Constant;
  if (s == "tip_gaussian") return FrictionSpec::Model::TipGaussian;
  if (s == "rim_exponential") return FrictionSpec::Model::RimExponential;
  throw ValidationError("unknown friction model '" + s + "'");
}

} // namespace

std::string to_json_string(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["dimension"] = c.dim;

  json mesh;
  mesh["type"] = c.mesh.type;
  if (c.mesh.type == "structured") {
    const auto& s = c.mesh.structured;
    mesh["lo"] = vec_to_json(s.lo);
    mesh["hi"] = vec_to_json(s.hi);
    mesh["divisions"] = {s.divisions[0], s.divisions[1], s.divisions[2]};
    mesh["pattern"] = s.pattern == StructuredMeshSpec::Pattern::Crossed ? "crossed" : "diagonal";
    mesh["jitter"] = s.jitter;
    mesh["seed"] = s.seed;
    json fr = json::array();
    for (const auto& f : s.fractures) {
      json g;
      g["name"] = f.name;
      if (!f.polyline.empty()) {
        json pl = json::array();
        for (const auto& p : f.polyline) pl.push_back(vec_to_json(p));
        g["polyline"] = pl;
      } else {
        g["point"] = vec_to_json(f.point);
        g["normal"] = vec_to_json(f.normal);
        g["half_u"] = f.half_u;
        g["half_v"] = f.half_v;
      }
      fr.push_back(g);
    }
    mesh["fractures"] = fr;
  } else {
    mesh["path"] = c.mesh.path;
    mesh["fracture_groups"] = c.mesh.fracture_groups;
  }
  j["mesh"] = mesh;

  json mat;
  mat["shear_modulus"] = c.shear_modulus;
  mat["lame_lambda"] = c.lame_lambda;
  mat["biot_alpha"] = c.biot_alpha;
  mat["storage"] = c.storage;
  mat["permeability"] = c.permeability;
  if (c.body_force.size() > 0) mat["body_force"] = vec_to_json(c.body_force);
  mat["fluid_source"] = c.fluid_source;
  j["material"] = mat;
  j["flow"] = c.with_flow;

  json bcs;
  for (const auto& [name, group] : c.boundary) {
    json g;
    if (group.mech) {
      json m;
      m["type"] = group.mech->type;
      m["value"] = vec_to_json(group.mech->value);
      if (group.mech->ramp.ramp_end > 0) m["ramp_end"] = group.mech->ramp.ramp_end;
      g["mechanics"] = m;
    }
    if (group.flow) {
      json fjson;
      fjson["type"] = group.flow->type;
      fjson["value"] = group.flow->value;
      if (group.flow->ramp.ramp_end > 0) fjson["ramp_end"] = group.flow->ramp.ramp_end;
      g["flow"] = fjson;
    }
    bcs[name] = g;
  }
  j["boundary_conditions"] = bcs;

  json fr;
  fr["model"] = friction_model_name(c.friction.model);
  fr["base"] = c.friction.base;
  fr["amplitude"] = c.friction.amplitude;
  fr["width"] = c.friction.width;
  fr["scale"] = c.friction.scale;
  fr["radius"] = c.friction.radius;
  fr["cap"] = c.friction.cap;
  j["friction"] = fr;
  j["gap"] = c.gap;

  json contact;
  contact["c"] = c.contact_c;
  contact["mode"] = c.dynamic_friction ? "dynamic" : "static";
  contact["initial_normal_traction"] = c.initial_lambda_n;
  j["contact"] = contact;

  if (c.time.steps > 0) {
    json t;
    t["dt"] = c.time.dt;
    t["steps"] = c.time.steps;
    j["time"] = t;
  }

  json newton;
  newton["tolerance"] = c.newton.tolerance;
  newton["max_iterations"] = c.newton.max_iterations;
  newton["linear_solver"] = c.newton.linear_solver.empty() ? "direct" : c.newton.linear_solver;
  newton["gate_on_pressure"] = c.newton.gate_on_pressure;
  newton["gate_on_multiplier"] = c.newton.gate_on_multiplier;
  j["newton"] = newton;

  json out;
  out["directory"] = c.output.directory;
  out["vtk"] = c.output.vtk;
  out["fracture_csv"] = c.output.fracture_csv;
  out["every"] = c.output.every;
  j["output"] = out;

  return j.dump(2);
}

ScenarioConfig scenario_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("malformed scenario document: ") + e.what());
  }
  auto require = [&](const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return j.at(key);
  };

  ScenarioConfig c;
  c.schema_version = require("schema_version").get<int>();
  if (c.schema_version != 1)
    throw ValidationError("unsupported schema_version " + std::to_string(c.schema_version));
  c.name = j.value("name", "scenario");
  c.dim = require("dimension").get<int>();

  const json mesh = require("mesh");
  c.mesh.type = mesh.value("type", "structured");
  if (c.mesh.type == "structured") {
    auto& s = c.mesh.structured;
    s.dim = c.dim;
    s.lo = vec_from_json(mesh.at("lo"));
    s.hi = vec_from_json(mesh.at("hi"));
    const auto d = mesh.at("divisions");
    s.divisions = {d.at(0).get<int>(), d.at(1).get<int>(),
                   d.size() > 2 ? d.at(2).get<int>() : 1};
    s.pattern = mesh.value("pattern", std::string("crossed")) == "diagonal"
                    ? StructuredMeshSpec::Pattern::Diagonal
                    : StructuredMeshSpec::Pattern::Crossed;
    s.jitter = mesh.value("jitter", 0.0);
    s.seed = mesh.value("seed", 20260810u);
    if (mesh.contains("fractures"))
      for (const auto& g : mesh.at("fractures")) {
        StructuredFracture f;
        f.name = g.at("name").get<std::string>();
        if (g.contains("polyline"))
          for (const auto& p : g.at("polyline")) f.polyline.push_back(vec_from_json(p));
        else {
          f.point = vec_from_json(g.at("point"));
          f.normal = vec_from_json(g.at("normal"));
          f.half_u = g.at("half_u").get<double>();
          f.half_v = g.at("half_v").get<double>();
        }
        s.fractures.push_back(std::move(f));
      }
  } else if (c.mesh.type == "file") {
    c.mesh.path = mesh.at("path").get<std::string>();
    if (mesh.contains("fracture_groups"))
      for (const auto& g : mesh.at("fracture_groups"))
        c.mesh.fracture_groups.push_back(g.get<std::string>());
  } else {
    throw ValidationError("unknown mesh source type '" + c.mesh.type + "'");
  }

  const json mat = require("material");
  if (mat.contains("youngs_modulus") || mat.contains("poisson_ratio")) {
    const double E = mat.at("youngs_modulus").get<double>();
    const double nu = mat.at("poisson_ratio").get<double>();
    c.shear_modulus = shear_from_young(E, nu);
    c.lame_lambda = lambda_from_young(E, nu);
  }
  if (mat.contains("shear_modulus")) c.shear_modulus = mat.at("shear_modulus").get<double>();
  if (mat.contains("lame_lambda")) c.lame_lambda = mat.at("lame_lambda").get<double>();
  c.biot_alpha = mat.value("biot_alpha", 0.0);
  c.storage = mat.value("storage", 0.0);
  c.permeability = mat.value("permeability", 1e-8);
  if (mat.contains("body_force")) c.body_force = vec_from_json(mat.at("body_force"));
  c.fluid_source = mat.value("fluid_source", 0.0);
  c.with_flow = j.value("flow", false);

  if (j.contains("boundary_conditions"))
    for (const auto& [name, g] : j.at("boundary_conditions").items()) {
      BcGroupConfig group;
      if (g.contains("mechanics")) {
        MechBcConfig m;
        m.type = g.at("mechanics").value("type", "neumann");
        if (m.type != "dirichlet" && m.type != "neumann" && m.type != "roller")
          throw ValidationError("unknown mechanics boundary type '" + m.type + "'");
        m.value = g.at("mechanics").contains("value")
                      ? vec_from_json(g.at("mechanics").at("value"))
                      : Vec(Vec::Zero(c.dim));
        m.ramp.ramp_end = g.at("mechanics").value("ramp_end", 0.0);
        group.mech = m;
      }
      if (g.contains("flow")) {
        FlowBcConfig f;
        f.type = g.at("flow").value("type", "neumann");
        if (f.type != "dirichlet" && f.type != "neumann")
          throw ValidationError("unknown flow boundary type '" + f.type + "'");
        f.value = g.at("flow").value("value", 0.0);
        f.ramp.ramp_end = g.at("flow").value("ramp_end", 0.0);
        group.flow = f;
      }
      c.boundary[name] = group;
    }

  if (j.contains("friction")) {
    const json fr = j.at("friction");
    c.friction.model = friction_model_from(fr.value("model", "constant"));
    c.friction.base = fr.value("base", 0.5);
    c.friction.amplitude = fr.value("amplitude", 1.0);
    c.friction.width = fr.value("width", 0.005);
    c.friction.scale = fr.value("scale", 10.0);
    c.friction.radius = fr.value("radius", 150.0);
    c.friction.cap = fr.value("cap", 1e3);
  }
  c.gap = j.value("gap", 0.0);

  if (j.contains("contact")) {
    const json contact = j.at("contact");
    c.contact_c = contact.value("c", 1e11);
    const std::string mode = contact.value("mode", "static");
    if (mode != "static" && mode != "dynamic")
      throw ValidationError("contact mode must be 'static' or 'dynamic'");
    c.dynamic_friction = mode == "dynamic";
    c.initial_lambda_n = contact.value("initial_normal_traction", -100.0);
  }

  if (j.contains("time")) {
    c.time.dt = j.at("time").at("dt").get<double>();
    c.time.steps = j.at("time").at("steps").get<int>();
  }

  if (j.contains("newton")) {
    const json newton = j.at("newton");
    c.newton.tolerance = newton.value("tolerance", 1e-10);
    c.newton.max_iterations = newton.value("max_iterations", 50);
    c.newton.linear_solver = newton.value("linear_solver", "direct");
    c.newton.gate_on_pressure = newton.value("gate_on_pressure", false);
    c.newton.gate_on_multiplier = newton.value("gate_on_multiplier", false);
  }

  if (j.contains("output")) {
    const json out = j.at("output");
    c.output.directory = out.value("directory", "out");
    c.output.vtk = out.value("vtk", true);
    c.output.fracture_csv = out.value("fracture_csv", true);
    c.output.every = out.value("every", 1);
  }
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scenario_from_json_string(text);
}

void save_scenario_file(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file '" + path + "'");
  out << to_json_string(config) << "\n";
}

bool scenario_equal(const ScenarioConfig& a, const ScenarioConfig& b) {
  return to_json_string(a) == to_json_string(b);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

void elastic_defaults(ScenarioConfig& c) {
  c.shear_modulus = shear_from_young(4e9, 0.2);
  c.lame_lambda = lambda_from_young(4e9, 0.2);
  c.biot_alpha = 0;
  c.storage = 0;
  c.with_flow = false;
  c.contact_c = 1e11; // 100 GPa/m
  c.gap = 0;
}

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

MechBcConfig dirichlet(const Vec& value, double ramp_end = 0) {
  MechBcConfig m;
  m.type = "dirichlet";
  m.value = value;
  m.ramp.ramp_end = ramp_end;
  return m;
}
MechBcConfig neumann(const Vec& value) {
  MechBcConfig m;
  m.type = "neumann";
  m.value = value;
  return m;
}
MechBcConfig roller(int dim) {
  MechBcConfig m;
  m.type = "roller";
  m.value = Vec::Zero(dim);
  return m;
}

// Six grid-conforming fractures on the 2 m x 1 m domain: a kinked one, a
// long horizontal one, one reaching the right boundary, one aligned with the
// compressive principal direction (sticks), and one across it (opens).
std::vector<StructuredFracture> example1_fractures() {
  std::vector<StructuredFracture> fr(6);
  fr[0].name = "fracture_1";
  fr[0].polyline = {v2(0.25, 0.5), v2(0.625, 0.5), v2(0.8125, 0.6875)};
  fr[1].name = "fracture_2";
  fr[1].polyline = {v2(0.25, 0.25), v2(0.9375, 0.25)};
  fr[2].name = "fracture_3";
  fr[2].polyline = {v2(1.125, 0.75), v2(1.5, 0.75)};
  fr[3].name = "fracture_4";
  fr[3].polyline = {v2(1.125, 0.3125), v2(1.3125, 0.5)};
  fr[4].name = "fracture_5";
  fr[4].polyline = {v2(1.5625, 0.5), v2(2.0, 0.5)};
  fr[5].name = "fracture_6";
  fr[5].polyline = {v2(0.875, 0.9375), v2(1.0625, 0.75)};
  return fr;
}

ScenarioConfig example1() {
  ScenarioConfig c;
  c.name = "example1";
  c.dim = 2;
  elastic_defaults(c);
  auto& s = c.mesh.structured;
  s.dim = 2;
  s.lo = v2(0, 0);
  s.hi = v2(2, 1);
  s.divisions = {32, 16, 1};
  s.pattern = StructuredMeshSpec::Pattern::Crossed;
  s.fractures = example1_fractures();
  c.boundary["bottom"].mech = dirichlet(v2(0, 0));
  c.boundary["top"].mech = dirichlet(v2(0.005, -0.002));
  c.boundary["left"].mech = neumann(v2(0, 0));
  c.boundary["right"].mech = neumann(v2(0, 0));
  c.friction.model = FrictionSpec::Model::TipGaussian;
  c.friction.base = 0.5;
  c.friction.amplitude = 1.0;
  c.friction.width = 0.005;
  c.output.directory = "out/example1";
  return c;
}

ScenarioConfig example2() {
  ScenarioConfig c;
  c.name = "example2";
  c.dim = 3;
  elastic_defaults(c);
  auto& s = c.mesh.structured;
  s.dim = 3;
  s.lo = v3(-200, -200, -300);
  s.hi = v3(300, 300, 300);
  s.divisions = {10, 10, 12};
  // Two 150 m fractures dipping 45 degrees on grid-diagonal planes.
  StructuredFracture f1, f2;
  f1.name = "fracture_1";
  f1.point = v3(-10, -30, -80);
  f1.normal = v3(0, 1, -1);
  f1.half_u = 150;
  f1.half_v = 150;
  f2.name = "fracture_2";
  f2.point = v3(15, 30, 80);
  f2.normal = v3(0, 1, -1);
  f2.half_u = 150;
  f2.half_v = 150;
  s.fractures = {f1, f2};
  c.boundary["bottom"].mech = dirichlet(v3(0, 0, 0));
  c.boundary["top"].mech = neumann(v3(0, 0, -4.5e6));
  for (const char* side : {"left", "right", "front", "back"}) c.boundary[side].mech = roller(3);
  c.friction.model = FrictionSpec::Model::RimExponential;
  c.friction.base = 0.5;
  c.friction.scale = 10.0;
  c.friction.radius = 150.0;
  c.output.directory = "out/example2";
  return c;
}

ScenarioConfig example3() {
  ScenarioConfig c = example1();
  c.name = "example3";
  c.with_flow = true;
  c.biot_alpha = 1.0;
  c.storage = 1e-10;
  c.permeability = 1e-8;
  const double H = 1.0;
  const double T = 5.0 * c.storage * H * H / c.permeability; // 0.05 s
  c.boundary["top"].mech = dirichlet(v2(0.005, -0.002), T / 2);
  c.boundary["left"].flow = FlowBcConfig{"dirichlet", 0.0, {}};
  // Remaining sides sealed (zero Neumann default).
  c.dynamic_friction = true;
  c.time.dt = T / 20;
  c.time.steps = 20;
  c.output.directory = "out/example3";
  return c;
}

ScenarioConfig example4() {
  ScenarioConfig c = example2();
  c.name = "example4";
  c.with_flow = true;
  c.biot_alpha = 1.0;
  c.storage = 1e-10;
  c.permeability = 1e-8;
  c.boundary["top"].flow = FlowBcConfig{"dirichlet", 0.0, {}};
  c.dynamic_friction = true;
  c.initial_lambda_n = 0.0; // starts open, all load on the fluid
  c.time.dt = 37500.0 / 20; // 625 minutes in 20 steps
  c.time.steps = 20;
  c.output.directory = "out/example4";
  return c;
}

// Single straight fracture in the Example-1 domain; used for the tip
// convergence studies with constant or tip-regularized friction.
ScenarioConfig tipslip(bool regularized) {
  ScenarioConfig c;
  c.name = regularized ? "tipslip-reg" : "tipslip";
  c.dim = 2;
  elastic_defaults(c);
  auto& s = c.mesh.structured;
  s.dim = 2;
  s.lo = v2(0, 0);
  s.hi = v2(2, 1);
  s.divisions = {32, 16, 1};
  s.pattern = StructuredMeshSpec::Pattern::Crossed;
  StructuredFracture f;
  f.name = "fracture_1";
  f.polyline = {v2(0.5, 0.5), v2(1.5, 0.5)};
  s.fractures = {f};
  c.boundary["bottom"].mech = dirichlet(v2(0, 0));
  c.boundary["top"].mech = dirichlet(v2(0.005, -0.002));
  c.boundary["left"].mech = neumann(v2(0, 0));
  c.boundary["right"].mech = neumann(v2(0, 0));
  if (regularized) {
    c.friction.model = FrictionSpec::Model::TipGaussian;
    c.friction.base = 0.5;
    c.friction.amplitude = 10.0;
    c.friction.width = 0.005;
  } else {
    c.friction.model = FrictionSpec::Model::Constant;
    c.friction.base = 0.5;
  }
  c.output.directory = regularized ? "out/tipslip-reg" : "out/tipslip";
  return c;
}

ScenarioConfig terzaghi() {
  ScenarioConfig c;
  c.name = "terzaghi";
  c.dim = 2;
  elastic_defaults(c);
  c.with_flow = true;
  c.biot_alpha = 1.0;
  c.storage = 1e-10;
  c.permeability = 1e-8;
  auto& s = c.mesh.structured;
  s.dim = 2;
  s.lo = v2(0, 0);
  s.hi = v2(0.04, 1.0);
  s.divisions = {2, 50, 1};
  s.pattern = StructuredMeshSpec::Pattern::Crossed;
  c.boundary["bottom"].mech = roller(2);
  c.boundary["left"].mech = roller(2);
  c.boundary["right"].mech = roller(2);
  c.boundary["top"].mech = neumann(v2(0, -4.5e6));
  c.boundary["top"].flow = FlowBcConfig{"dirichlet", 0.0, {}};
  // Sealed elsewhere. Consolidation time scale H^2/c_v with
  // c_v = K / (c0 + alpha^2/(lambda + 2G)).
  const double cv = c.permeability / (c.storage + 1.0 / (c.lame_lambda + 2 * c.shear_modulus));
  c.time.dt = 1e-3 / cv;
  c.time.steps = 100;
  c.output.directory = "out/terzaghi";
  return c;
}

} // namespace

std::vector<std::string> preset_names() {
  return {"example1", "example2", "example3", "example4", "tipslip", "tipslip-reg", "terzaghi"};
}

ScenarioConfig preset_scenario(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "example3") return example3();
  if (name == "example4") return example4();
  if (name == "tipslip") return tipslip(false);
  if (name == "tipslip-reg") return tipslip(true);
  if (name == "terzaghi") return terzaghi();
  throw ValidationError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Loading and running
// ---------------------------------------------------------------------------

namespace {

// Tip points (2d) or rim segments (3d) of one fracture, excluding parts on
// the domain boundary: slip may reach the boundary there and the friction
// law does not blow up.
struct FractureMargin {
  std::vector<Vec> tips;                    // 2d
  std::vector<std::pair<Vec, Vec>> rim;     // 3d segments
};

FractureMargin fracture_margin(const Mesh& mesh, int frac) {
  FractureMargin margin;
  std::vector<char> on_boundary(mesh.n_vertices(), 0);
  for (Index f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face_kind[f] == FaceKind::Boundary)
      for (int k = 0; k < mesh.dim; ++k) on_boundary[mesh.face_vertices[f][k]] = 1;

  if (mesh.dim == 2) {
    std::map<Index, int> count;
    for (Index f = 0; f < mesh.n_faces(); ++f)
      if (mesh.face_fracture[f] == frac && mesh.face_kind[f] == FaceKind::FracturePositive)
        for (int k = 0; k < 2; ++k) count[mesh.face_vertices[f][k]]++;
    for (const auto& [v, n] : count)
      if (n == 1 && !on_boundary[v]) margin.tips.push_back(mesh.vertex_coords.col(v));
  } else {
    std::map<std::array<Index, 2>, int> edges;
    for (Index f = 0; f < mesh.n_faces(); ++f)
      if (mesh.face_fracture[f] == frac && mesh.face_kind[f] == FaceKind::FracturePositive) {
        const auto& fv = mesh.face_vertices[f];
        for (int e = 0; e < 3; ++e) {
          std::array<Index, 2> key{fv[e], fv[(e + 1) % 3]};
          if (key[0] > key[1]) std::swap(key[0], key[1]);
          edges[key]++;
        }
      }
    for (const auto& [edge, n] : edges)
      if (n == 1 && !(on_boundary[edge[0]] && on_boundary[edge[1]]))
        margin.rim.emplace_back(mesh.vertex_coords.col(edge[0]), mesh.vertex_coords.col(edge[1]));
  }
  return margin;
}

double distance_to_margin(const FractureMargin& margin, const Vec& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& tip : margin.tips) d = std::min(d, (x - tip).norm());
  for (const auto& [a, b] : margin.rim) {
    const Vec ab = b - a;
    const double t = std::clamp(ab.dot(x - a) / ab.squaredNorm(), 0.0, 1.0);
    d = std::min(d, (x - (a + t * ab)).norm());
  }
  return d;
}

} // namespace

Vec evaluate_friction(const FrictionSpec& spec, const Mesh& mesh, const SubGrid& sub,
                      const FracturePairing& pairing) {
  Vec friction(pairing.n_pairs());
  std::vector<FractureMargin> margins;
  for (int i = 0; i < mesh.n_fractures(); ++i) margins.push_back(fracture_margin(mesh, i));

  for (Index r = 0; r < pairing.n_pairs(); ++r) {
    const Vec x = sub.subface_point.col(pairing.positive[r]);
    const double d = distance_to_margin(margins[pairing.fracture[r]], x);
    switch (spec.model) {
      case FrictionSpec::Model::Constant:
        friction(r) = spec.base;
        break;
      case FrictionSpec::Model::TipGaussian:
        friction(r) = std::isfinite(d)
                          ? spec.base * (1.0 + spec.amplitude * std::exp(-d * d / spec.width))
                          : spec.base;
        break;
      case FrictionSpec::Model::RimExponential: {
        if (!std::isfinite(d) || d <= 1e-12) {
          friction(r) = std::isfinite(d) ? spec.cap : spec.base;
          break;
        }
        const double f =
            spec.base * std::exp(spec.scale / d - spec.scale / spec.radius);
        friction(r) = std::min(f, spec.cap);
        break;
      }
    }
  }
  return friction;
}

LoadedScenario load_scenario(const ScenarioConfig& config) {
  LoadedScenario sc;
  sc.config = config;

  RawMesh raw;
  std::set<std::string> fracture_tags;
  if (config.mesh.type == "structured") {
    StructuredMeshSpec spec = config.mesh.structured;
    spec.dim = config.dim;
    raw = generate_structured_mesh(spec);
    fracture_tags = fracture_tag_set(spec);
  } else {
    raw = read_msh(config.mesh.path);
    if (raw.dim != config.dim)
      throw ValidationError("mesh file dimension does not match the scenario");
    fracture_tags.insert(config.mesh.fracture_groups.begin(), config.mesh.fracture_groups.end());
  }
  sc.mesh = build_mesh(raw, fracture_tags);
  sc.sub = build_subgrid(sc.mesh);
  const double gap = config.gap;
  sc.pairing = pair_fracture_sides(sc.mesh, sc.sub, GapField([gap](const Vec&) { return gap; }));

  sc.material = MaterialField::uniform(sc.mesh, config.shear_modulus, config.lame_lambda,
                                       config.biot_alpha, config.storage, config.permeability);
  if (config.body_force.size() == config.dim)
    sc.material.body_force.colwise() = config.body_force;
  sc.material.fluid_source.setConstant(config.fluid_source);

  // Boundary conditions by group name; every referenced tag must exist.
  for (const auto& [name, group] : config.boundary) {
    const int gid = sc.mesh.group_id(name);
    if (gid < 0) throw ValidationError("unknown boundary tag '" + name + "'");
    const bool is_fracture =
        std::find(sc.mesh.fracture_names.begin(), sc.mesh.fracture_names.end(), name) !=
        sc.mesh.fracture_names.end();
    if (is_fracture)
      throw ValidationError("boundary conditions cannot target fracture '" + name + "'");
    if (group.mech) {
      const MechBcConfig m = *group.mech;
      if (m.value.size() != config.dim)
        throw ValidationError("mechanics value for '" + name + "' has wrong dimension");
      if (m.ramp.ramp_end > 0 && config.time.steps == 0)
        throw ValidationError("ramped boundary condition on '" + name +
                              "' requires time stepping");
      MechBcSpec spec;
      spec.type = m.type == "dirichlet" ? MechBcType::Dirichlet
                  : m.type == "roller" ? MechBcType::Roller
                                       : MechBcType::Neumann;
      const Vec value = m.value;
      const double ramp_end = m.ramp.ramp_end;
      spec.value = [value, ramp_end](const Vec&, double t) {
        return Vec(value * (ramp_end > 0 ? std::min(t / ramp_end, 1.0) : 1.0));
      };
      sc.bcs.mech[gid] = spec;
    }
    if (group.flow) {
      if (!config.with_flow)
        throw ValidationError("flow condition on '" + name + "' without flow enabled");
      const FlowBcConfig f = *group.flow;
      FlowBcSpec spec;
      spec.type = f.type == "dirichlet" ? FlowBcType::Dirichlet : FlowBcType::Neumann;
      const double value = f.value;
      const double ramp_end = f.ramp.ramp_end;
      spec.value = [value, ramp_end](const Vec&, double t) {
        return value * (ramp_end > 0 ? std::min(t / ramp_end, 1.0) : 1.0);
      };
      sc.bcs.flow[gid] = spec;
    }
  }
  if (config.with_flow && config.time.steps <= 0)
    throw ValidationError("flow scenarios require time stepping");

  sc.friction = evaluate_friction(config.friction, sc.mesh, sc.sub, sc.pairing);

  sc.options.with_flow = config.with_flow;
  sc.options.dt = config.time.dt;
  sc.options.contact.c = config.contact_c;
  sc.options.contact.dynamic = config.dynamic_friction;
  sc.options.newton = config.newton;
  sc.options.initial_lambda_n = config.initial_lambda_n;
  return sc;
}

RunReport run_scenario(LoadedScenario& sc) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;

  const auto& out = sc.config.output;
  if (out.vtk || out.fracture_csv) fs::create_directories(out.directory);

  FractureSimulator sim(sc.mesh, sc.sub, sc.pairing, sc.material, sc.bcs, sc.friction,
                        sc.options);

  auto record = [&](const ConvergenceReport& r) {
    StepRecord rec;
    rec.step = sim.step();
    rec.time = sim.time();
    rec.iterations = r.iterations;
    rec.sets = r.sets;
    const ContactState st = sim.contact_state();
    for (Index i = 0; i < st.size(); ++i) {
      const double jn = st.jump_n(i);
      const double jt = (st.jump.col(i) - jn * st.normal.col(i)).norm();
      rec.max_slip = std::max(rec.max_slip, jt);
      rec.max_opening = std::max(rec.max_opening, jn - st.gap(i));
    }
    report.steps.push_back(rec);

    if ((rec.step % std::max(1, out.every)) == 0) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_%04d", rec.step);
      if (out.vtk)
        write_vtk_cells(out.directory + "/" + sc.config.name + suffix + ".vtk", sc.mesh,
                        sim.displacement(), sim.pressure());
      if (out.fracture_csv && sc.pairing.n_pairs() > 0) {
        const auto sets = classify_subfaces(st);
        const auto data = aggregate_fracture_faces(sc.mesh, sc.sub, sc.pairing, st.lambda,
                                                   st.jump, &sets);
        write_fracture_csv(out.directory + "/" + sc.config.name + suffix + "_fractures.csv",
                           sc.mesh, data, sc.pairing);
      }
    }
  };

  try {
    if (sc.config.time.steps <= 0) {
      record(sim.solve_static());
    } else {
      for (int step = 0; step < sc.config.time.steps; ++step) record(sim.advance_time_step());
    }
  } catch (const Error& e) {
    report.failed = true;
    report.failure = e.what();
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.vtk || out.fracture_csv)
    write_report_text(out.directory + "/" + sc.config.name + "_report.txt", report);
  return report;
}

} // namespace porocontact
