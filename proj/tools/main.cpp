// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>

#include "porocontact/convergence.hpp"
#include "porocontact/gmsh_io.hpp"
#include "porocontact/oracle.hpp"
#include "porocontact/scenario.hpp"

namespace pc = porocontact;

namespace {

struct CommonOptions {
  std::string preset;
  std::string config_path;
  std::string output_dir;
  double delta = -1;
  double dt = -1;
  double contact_c = -1;
  std::string dump_config;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--preset", opt.preset, "built-in scenario preset");
  cmd->add_option("--config", opt.config_path, "scenario configuration file (JSON)");
  cmd->add_option("--out", opt.output_dir, "output directory override");
  cmd->add_option("--delta", opt.delta, "Newton stopping tolerance override");
  cmd->add_option("--dt", opt.dt, "time step override");
  cmd->add_option("--c", opt.contact_c, "contact numeric parameter override (Pa/m)");
  cmd->add_option("--dump-config", opt.dump_config, "write the resolved configuration and exit");
}

pc::ScenarioConfig resolve_config(const CommonOptions& opt) {
  if (opt.preset.empty() == opt.config_path.empty())
    throw pc::ValidationError("select exactly one of --preset and --config");
  pc::ScenarioConfig config = opt.preset.empty() ? pc::load_scenario_file(opt.config_path)
                                                 : pc::preset_scenario(opt.preset);
  if (!opt.output_dir.empty()) config.output.directory = opt.output_dir;
  if (opt.delta > 0) config.newton.tolerance = opt.delta;
  if (opt.dt > 0) config.time.dt = opt.dt;
  if (opt.contact_c > 0) config.contact_c = opt.contact_c;
  return config;
}

int run_command(const CommonOptions& opt) {
  pc::ScenarioConfig config = resolve_config(opt);
  if (!opt.dump_config.empty()) {
    pc::save_scenario_file(config, opt.dump_config);
    return 0;
  }
  pc::LoadedScenario scenario = pc::load_scenario(config);
  std::printf("scenario %s: %lld cells, %lld fracture subface pairs\n", config.name.c_str(),
              static_cast<long long>(scenario.mesh.n_cells()),
              static_cast<long long>(scenario.pairing.n_pairs()));
  const pc::RunReport report = pc::run_scenario(scenario);
  for (const auto& s : report.steps)
    std::printf("step %3d  t=%-12.6g  newton=%2d  open/stick/slide=%lld/%lld/%lld  "
                "max_slip=%-10.4g max_open=%-10.4g\n",
                s.step, s.time, s.iterations, static_cast<long long>(s.sets[0]),
                static_cast<long long>(s.sets[1]), static_cast<long long>(s.sets[2]), s.max_slip,
                s.max_opening);
  std::printf("wall time %.2f s, outputs in %s\n", report.wall_seconds,
              config.output.directory.c_str());
  if (report.failed) {
    std::fprintf(stderr, "FAILED: %s\n", report.failure.c_str());
    return 2;
  }
  return 0;
}

int convergence_command(const CommonOptions& opt, int n_meshes) {
  pc::ScenarioConfig config = resolve_config(opt);
  const pc::StudyResult result = pc::run_convergence_study(config, n_meshes);
  namespace fs = std::filesystem;
  fs::create_directories(config.output.directory);
  const std::string csv = config.output.directory + "/" + config.name + "_convergence.csv";
  pc::write_convergence_csv(csv, result);
  std::printf("levels (cells):");
  for (auto c : result.cells) std::printf(" %lld", static_cast<long long>(c));
  std::printf("\n");
  std::printf("eps_u:");
  for (pc::Index i = 0; i < result.eps_u.size(); ++i) std::printf(" %.4g", result.eps_u(i));
  std::printf("   order(slope) %.3f\n", pc::order_slope(result.eps_u));
  for (int i = 0; i < result.n_fractures; ++i) {
    std::printf("fracture %d: eps_lambda", i + 1);
    for (pc::Index k = 0; k < result.eps_lambda.cols(); ++k)
      std::printf(" %.4g", result.eps_lambda(i, k));
    std::printf(" (order %.3f), eps_jump", pc::order_slope(result.eps_lambda.row(i).transpose()));
    for (pc::Index k = 0; k < result.eps_jump.cols(); ++k)
      std::printf(" %.4g", result.eps_jump(i, k));
    std::printf(" (order %.3f)\n", pc::order_slope(result.eps_jump.row(i).transpose()));
  }
  std::printf("table written to %s\n", csv.c_str());
  return 0;
}

int mesh_info_command(const CommonOptions& opt, const std::string& mesh_path) {
  pc::Mesh mesh;
  if (!mesh_path.empty()) {
    mesh = pc::build_mesh(pc::read_msh(mesh_path), {});
  } else {
    pc::LoadedScenario scenario = pc::load_scenario(resolve_config(opt));
    mesh = std::move(scenario.mesh);
  }
  std::printf("dimension  %d\n", mesh.dim);
  std::printf("cells      %lld\n", static_cast<long long>(mesh.n_cells()));
  std::printf("faces      %lld\n", static_cast<long long>(mesh.n_faces()));
  std::printf("vertices   %lld\n", static_cast<long long>(mesh.n_vertices()));
  std::printf("volume     %.17g\n", mesh.cell_volumes.sum());
  std::printf("fractures  %d\n", mesh.n_fractures());
  for (int i = 0; i < mesh.n_fractures(); ++i) {
    pc::Index faces = 0;
    double area = 0;
    for (pc::Index f = 0; f < mesh.n_faces(); ++f)
      if (mesh.face_fracture[f] == i && mesh.face_kind[f] == pc::FaceKind::FracturePositive) {
        faces++;
        area += mesh.face_areas(f);
      }
    std::printf("  %-16s %lld faces, area %.6g\n", mesh.fracture_names[i].c_str(),
                static_cast<long long>(faces), area);
  }
  std::printf("groups    ");
  for (const auto& g : mesh.group_names) std::printf(" %s", g.c_str());
  std::printf("\n");
  return 0;
}

int verify_command(const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::FILE* csv = std::fopen((out_dir + "/verify_metrics.csv").c_str(), "w");
  if (!csv) throw pc::IoError("cannot write verification metrics");
  std::fprintf(csv, "check,metric\n");
  int failures = 0;
  auto gate = [&](const char* name, double value, double bound) {
    const bool pass = value <= bound;
    std::printf("%-44s %10.3e <= %-8.0e %s\n", name, value, bound, pass ? "PASS" : "FAIL");
    std::fprintf(csv, "%s,%.17g\n", name, value);
    failures += !pass;
  };

  // Affine patch tests on jittered 2d and 3d meshes.
  {
    pc::StructuredMeshSpec spec;
    spec.dim = 2;
    spec.lo = pc::Vec(2);
    spec.hi = pc::Vec(2);
    spec.lo << 0, 0;
    spec.hi << 1, 1;
    spec.divisions = {7, 7, 1};
    spec.jitter = 0.15;
    const pc::Mesh mesh = pc::build_mesh(pc::generate_structured_mesh(spec), {});
    const auto material = pc::MaterialField::uniform(mesh, 1.5, 0.8, 1.0, 0.0, 2.0);
    pc::Mat A(2, 2);
    A << 0.6, -0.2, 0.3, 1.1;
    pc::Vec u0(2), gp(2);
    u0 << 0.1, -0.2;
    gp << 2.0, -1.0;
    const auto field = pc::AnalyticField::affine(A, u0, 1.5, 0.8, gp, 0.5, 2.0);
    const auto result = pc::patch_test(mesh, material, field, true);
    gate("patch_2d_flux", result.flux_error, 1e-10);
    gate("patch_2d_traction", result.traction_error, 1e-10);
  }
  {
    pc::StructuredMeshSpec spec;
    spec.dim = 3;
    spec.lo = pc::Vec(3);
    spec.hi = pc::Vec(3);
    spec.lo << 0, 0, 0;
    spec.hi << 1, 1, 1;
    spec.divisions = {4, 4, 4};
    spec.jitter = 0.1;
    const pc::Mesh mesh = pc::build_mesh(pc::generate_structured_mesh(spec), {});
    const auto material = pc::MaterialField::uniform(mesh, 2.0, 1.0, 0.7, 0.0, 1.3);
    pc::Mat A(3, 3);
    A << 0.5, 0.2, -0.1, -0.3, 0.8, 0.25, 0.15, -0.4, 1.2;
    pc::Vec u0 = pc::Vec::Zero(3), gp(3);
    gp << 1.0, -0.5, 0.25;
    const auto field = pc::AnalyticField::affine(A, u0, 2.0, 1.0, gp, 0.0, 1.3);
    const auto result = pc::patch_test(mesh, material, field, true);
    gate("patch_3d_flux", result.flux_error, 1e-10);
    gate("patch_3d_traction", result.traction_error, 1e-10);
  }

  // Consolidation column versus the analytic series.
  {
    pc::ScenarioConfig config = pc::preset_scenario("terzaghi");
    config.output.vtk = false;
    config.output.fracture_csv = false;
    pc::LoadedScenario sc = pc::load_scenario(config);
    pc::FractureSimulator sim(sc.mesh, sc.sub, sc.pairing, sc.material, sc.bcs, sc.friction,
                              sc.options);
    const auto series = pc::make_terzaghi(4.5e6, config.biot_alpha, config.storage,
                                          config.shear_modulus, config.lame_lambda,
                                          config.permeability, 1.0, 1.0);
    double overshoot = 0;
    for (int step = 0; step < config.time.steps; ++step) {
      sim.advance_time_step();
      if (step == 0) overshoot = sim.pressure().maxCoeff() / series.p0 - 1.0;
    }
    const double err = pc::terzaghi_l2_error(sc.mesh, sim.pressure(), series, sim.time());
    gate("terzaghi_l2_error", err, 0.02);
    gate("terzaghi_first_step_overshoot", std::max(overshoot, 0.0), 0.05);
  }

  // Contact solve: complementarity residual at convergence plus the
  // linearization audit per set type.
  {
    pc::ScenarioConfig config = pc::preset_scenario("tipslip-reg");
    config.output.vtk = false;
    config.output.fracture_csv = false;
    config.mesh.structured.divisions = {16, 8, 1};
    pc::LoadedScenario sc = pc::load_scenario(config);
    pc::FractureSimulator sim(sc.mesh, sc.sub, sc.pairing, sc.material, sc.bcs, sc.friction,
                              sc.options);
    sim.solve_static();
    const auto kkt = pc::kkt_residual(sim.contact_state());
    const double scale =
        std::max(sim.multiplier().size() ? sim.multiplier().cwiseAbs().maxCoeff() : 0.0, 1.0);
    gate("kkt_residual_scaled", kkt.max_scaled(sc.options.contact.c) / scale, 1e-8);

    sc.options.contact.c = 1e8; // tame the multiplier feedback in the audit states
    pc::FractureSimulator audit(sc.mesh, sc.sub, sc.pairing, sc.material, sc.bcs, sc.friction,
                                sc.options);
    for (auto [target, name] : {std::pair{pc::ContactSet::Open, "fd_jacobian_open"},
                                {pc::ContactSet::Stick, "fd_jacobian_stick"},
                                {pc::ContactSet::Slide, "fd_jacobian_slide"}}) {
      const auto fd = pc::fd_audit_random_states(audit, target, 5, 2026);
      gate(name, fd.max_mismatch, 1e-5);
    }
  }

  std::fclose(csv);
  std::printf(failures == 0 ? "all checks passed\n" : "%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"porocontact: finite-volume poroelasticity with frictional fracture contact"};
  app.require_subcommand(1);

  CommonOptions run_opt, conv_opt, info_opt;
  int n_meshes = 4;
  std::string mesh_path, verify_out = "out/verify";

  CLI::App* run = app.add_subcommand("run", "run a scenario");
  add_common(run, run_opt);
  CLI::App* conv = app.add_subcommand("convergence", "refinement study against the finest mesh");
  add_common(conv, conv_opt);
  conv->add_option("--meshes", n_meshes, "number of meshes including the reference");
  CLI::App* verify = app.add_subcommand("verify", "run the verification oracle suite");
  verify->add_option("--out", verify_out, "output directory");
  CLI::App* info = app.add_subcommand("mesh-info", "print mesh statistics");
  add_common(info, info_opt);
  info->add_option("--mesh", mesh_path, "mesh interchange file to inspect");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_opt);
    if (conv->parsed()) return convergence_command(conv_opt, n_meshes);
    if (verify->parsed()) return verify_command(verify_out);
    if (info->parsed()) return mesh_info_command(info_opt, mesh_path);
  } catch (const pc::NonConvergenceError& e) {
    std::fprintf(stderr, "solver did not converge: %s\n", e.what());
    return 2;
  } catch (const pc::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const pc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
