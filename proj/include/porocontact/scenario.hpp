// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "porocontact/solver.hpp"
#include "porocontact/structured_mesh.hpp"

namespace porocontact {

/// Friction-coefficient law on the fracture surfaces.
///   constant:  F = base
///   tip_gaussian: F = base * (1 + amplitude * exp(-D^2 / width)), D the
///     distance to the fracture tips (boundary-touching ends excluded)
///   rim_exponential: F = base * exp(scale/d_rim - scale/radius), d_rim the
///     in-plane distance to the fracture rim, capped at `cap`
struct FrictionSpec {
  enum class Model : char { Constant, TipGaussian, RimExponential };
  Model model = Model::Constant;
  double base = 0.5;
  double amplitude = 1.0;
  double width = 0.005; // m^2
  double scale = 10.0;  // m
  double radius = 150.0; // m
  double cap = 1e3;
};

struct RampSpec {
  // value(t) = value * min(t / ramp_end, 1); no ramp when ramp_end <= 0.
  double ramp_end = 0;
};

struct MechBcConfig {
  std::string type = "neumann"; // dirichlet | neumann | roller
  Vec value;                    // sized dim (zero default)
  RampSpec ramp;
};

struct FlowBcConfig {
  std::string type = "neumann"; // dirichlet | neumann
  double value = 0;
  RampSpec ramp;
};

struct BcGroupConfig {
  std::optional<MechBcConfig> mech;
  std::optional<FlowBcConfig> flow;
};

struct MeshSourceConfig {
  std::string type = "structured"; // structured | file
  StructuredMeshSpec structured;
  std::string path;                          // file source
  std::vector<std::string> fracture_groups;  // file source
};

struct TimeSpec {
  double dt = 0;
  int steps = 0; // 0: single static solve
};

struct OutputSpec {
  std::string directory = "out";
  bool vtk = true;
  bool fracture_csv = true;
  int every = 1;
};

/// Full scenario document; serializable to/from JSON with schema_version.
struct ScenarioConfig {
  int schema_version = 1;
  std::string name = "scenario";
  int dim = 2;
  MeshSourceConfig mesh;

  double shear_modulus = shear_from_young(4e9, 0.2);
  double lame_lambda = lambda_from_young(4e9, 0.2);
  double biot_alpha = 0;
  double storage = 0;
  double permeability = 1e-8;
  Vec body_force;      // sized dim, optional
  double fluid_source = 0;
  bool with_flow = false;

  std::map<std::string, BcGroupConfig> boundary; // by group name
  FrictionSpec friction;
  double gap = 0;

  double contact_c = 1e11; // Pa/m, the paper's default 100 GPa/m
  bool dynamic_friction = false;
  double initial_lambda_n = -100.0;

  TimeSpec time;
  NewtonConfig newton;
  OutputSpec output;
};

std::string to_json_string(const ScenarioConfig& config);
ScenarioConfig scenario_from_json_string(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);
void save_scenario_file(const ScenarioConfig& config, const std::string& path);

bool scenario_equal(const ScenarioConfig& a, const ScenarioConfig& b);

/// Built-in presets: example1..example4, tipslip, tipslip-reg, terzaghi.
ScenarioConfig preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

/// Scenario materialized into the mesh bundle a simulator needs.
struct LoadedScenario {
  ScenarioConfig config;
  Mesh mesh;
  SubGrid sub;
  FracturePairing pairing;
  MaterialField material;
  BoundaryConditions bcs;
  Vec friction; // per positive subface
  SimulatorOptions options;
};

LoadedScenario load_scenario(const ScenarioConfig& config);

/// Friction coefficient field evaluated at arbitrary points on a fracture.
Vec evaluate_friction(const FrictionSpec& spec, const Mesh& mesh, const SubGrid& sub,
                      const FracturePairing& pairing);

struct StepRecord {
  int step = 0;
  double time = 0;
  int iterations = 0;
  std::array<Index, 3> sets{0, 0, 0}; // |I_n|, |I_tau|, |A|
  double max_slip = 0;                // max tangential jump norm
  double max_opening = 0;             // max normal jump
};

struct RunReport {
  std::vector<StepRecord> steps;
  double wall_seconds = 0;
  bool failed = false;
  std::string failure;
};

/// Executes the time loop (or a single static solve), writing selected
/// outputs each step. Deterministic given identical inputs; on solver
/// failure the partial outputs are kept and the report carries the marker.
RunReport run_scenario(LoadedScenario& scenario);

} // namespace porocontact
