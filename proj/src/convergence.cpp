// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/convergence.hpp"

#include <cinttypes>
#include <cstdio>

namespace porocontact {

namespace {

bool in_simplex(const Mesh& mesh, Index c, const Vec& x, double tol) {
  const int dim = mesh.dim;
  Mat edges(dim, dim);
  const Vec x0 = mesh.vertex_coords.col(mesh.cell_vertices(0, c));
  for (int k = 0; k < dim; ++k)
    edges.col(k) = mesh.vertex_coords.col(mesh.cell_vertices(k + 1, c)) - x0;
  const Vec bary = edges.partialPivLu().solve(x - x0);
  double sum = 0;
  for (int k = 0; k < dim; ++k) {
    if (bary(k) < -tol) return false;
    sum += bary(k);
  }
  return sum <= 1.0 + tol;
}

} // namespace

CellLocator::CellLocator(const Mesh& mesh) : mesh_(mesh) {
  const int dim = mesh.dim;
  lo_ = mesh.vertex_coords.rowwise().minCoeff();
  hi_ = mesh.vertex_coords.rowwise().maxCoeff();
  const double target = std::pow(static_cast<double>(mesh.n_cells()), 1.0 / dim);
  for (int k = 0; k < dim; ++k) bins_[k] = std::max(1, static_cast<int>(target / 2));
  Index total = 1;
  for (int k = 0; k < dim; ++k) total *= bins_[k];
  cells_.resize(total);

  for (Index c = 0; c < mesh.n_cells(); ++c) {
    Vec clo = mesh.vertex_coords.col(mesh.cell_vertices(0, c));
    Vec chi = clo;
    for (int k = 1; k <= dim; ++k) {
      clo = clo.cwiseMin(mesh.vertex_coords.col(mesh.cell_vertices(k, c)));
      chi = chi.cwiseMax(mesh.vertex_coords.col(mesh.cell_vertices(k, c)));
    }
    std::array<int, 3> blo{0, 0, 0}, bhi{0, 0, 0};
    for (int k = 0; k < dim; ++k) {
      const double w = (hi_(k) - lo_(k));
      blo[k] = std::clamp(static_cast<int>((clo(k) - lo_(k)) / w * bins_[k]), 0, bins_[k] - 1);
      bhi[k] = std::clamp(static_cast<int>((chi(k) - lo_(k)) / w * bins_[k]), 0, bins_[k] - 1);
    }
    for (int i = blo[0]; i <= bhi[0]; ++i)
      for (int j = blo[1]; j <= bhi[1]; ++j)
        for (int k = (dim == 3 ? blo[2] : 0); k <= (dim == 3 ? bhi[2] : 0); ++k)
          cells_[(k * bins_[1] + j) * bins_[0] + i].push_back(c);
  }
}

Index CellLocator::bin_of(const Vec& x) const {
  const int dim = mesh_.dim;
  std::array<int, 3> b{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    const double w = hi_(k) - lo_(k);
    b[k] = std::clamp(static_cast<int>((x(k) - lo_(k)) / w * bins_[k]), 0, bins_[k] - 1);
  }
  return (static_cast<Index>(b[2]) * bins_[1] + b[1]) * bins_[0] + b[0];
}

Index CellLocator::locate(const Vec& x) const {
  const auto& candidates = cells_[bin_of(x)];
  for (Index c : candidates)
    if (in_simplex(mesh_, c, x, 1e-10)) return c;
  // Roundoff on a cell interface: fall back to the nearest candidate center,
  // then to a global search.
  Index best = -1;
  double best_d = std::numeric_limits<double>::max();
  for (Index c : candidates) {
    const double d = (mesh_.cell_centers.col(c) - x).norm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best >= 0) return best;
  for (Index c = 0; c < mesh_.n_cells(); ++c) {
    const double d = (mesh_.cell_centers.col(c) - x).norm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double relative_error_cells(const Mesh& coarse, const Mat& coarse_field, const Mesh& ref,
                            const Mat& ref_field) {
  if (coarse_field.cols() != coarse.n_cells() || ref_field.cols() != ref.n_cells())
    throw ContractViolation("field sizes do not match the meshes");
  CellLocator locator(coarse);
  double num = 0, den = 0;
  for (Index c = 0; c < ref.n_cells(); ++c) {
    const Vec x = ref.cell_centers.col(c);
    const Index cc = locator.locate(x);
    const double m = ref.cell_volumes(c);
    num += m * (coarse_field.col(cc) - ref_field.col(c)).squaredNorm();
    den += m * ref_field.col(c).squaredNorm();
  }
  if (den <= 0) return num <= 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

Vec relative_error_fracture(const Mesh& coarse, const FractureFaceData& coarse_data,
                            const Mesh& ref, const FractureFaceData& ref_data,
                            int n_fractures, bool use_lambda) {
  Vec num = Vec::Zero(n_fractures), den = Vec::Zero(n_fractures);
  const Mat& cf = use_lambda ? coarse_data.lambda : coarse_data.jump;
  const Mat& rf = use_lambda ? ref_data.lambda : ref_data.jump;

  for (Index i = 0; i < static_cast<Index>(ref_data.faces.size()); ++i) {
    const int frac = ref_data.fracture[i];
    const Vec x = ref_data.centroid.col(i);
    // Nearest coarse face of the same fracture (the surfaces coincide
    // geometrically across the hierarchy).
    Index best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (Index j = 0; j < static_cast<Index>(coarse_data.faces.size()); ++j) {
      if (coarse_data.fracture[j] != frac) continue;
      const double d = (coarse_data.centroid.col(j) - x).norm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < 0) throw ContractViolation("reference fracture face has no coarse counterpart");
    const double m = ref_data.area(i);
    num(frac) += m * (cf.col(best) - rf.col(i)).squaredNorm();
    den(frac) += m * rf.col(i).squaredNorm();
  }
  Vec eps(n_fractures);
  for (int i = 0; i < n_fractures; ++i) {
    if (den(i) <= 0)
      eps(i) = num(i) <= 1e-28 ? 0.0 : std::numeric_limits<double>::infinity();
    else
      eps(i) = std::sqrt(num(i) / den(i));
  }
  return eps;
}

Vec pairwise_orders(const Vec& errors) {
  Vec orders(std::max<Index>(0, errors.size() - 1));
  for (Index i = 0; i + 1 < errors.size(); ++i)
    orders(i) = std::log2(errors(i) / errors(i + 1));
  return orders;
}

double order_slope(const Vec& errors) {
  const Index n = errors.size();
  if (n < 2) return 0;
  // log2(e_k) ~ -p k + c; least squares for p.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Index k = 0; k < n; ++k) {
    const double y = std::log2(std::max(errors(k), 1e-300));
    sx += k;
    sy += y;
    sxx += double(k) * k;
    sxy += k * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

StudyResult run_convergence_study(const ScenarioConfig& base, int n_meshes) {
  if (base.mesh.type != "structured")
    throw ValidationError("convergence studies need the structured mesh source");
  if (n_meshes < 2) throw ValidationError("a study needs at least two meshes");

  struct LevelData {
    Mesh mesh;
    Mat u;
    FractureFaceData faces;
    int iterations = 0;
  };
  std::vector<LevelData> levels;

  for (int level = 0; level < n_meshes; ++level) {
    ScenarioConfig config = base;
    config.output.vtk = false;
    config.output.fracture_csv = false;
    for (int k = 0; k < config.dim; ++k)
      config.mesh.structured.divisions[k] = base.mesh.structured.divisions[k] << level;
    LoadedScenario sc = load_scenario(config);
    FractureSimulator sim(sc.mesh, sc.sub, sc.pairing, sc.material, sc.bcs, sc.friction,
                          sc.options);
    LevelData data;
    if (config.time.steps <= 0) {
      data.iterations = sim.solve_static().iterations;
    } else {
      for (int step = 0; step < config.time.steps; ++step)
        data.iterations = std::max(data.iterations, sim.advance_time_step().iterations);
    }
    const int dim = sc.mesh.dim;
    data.u = Eigen::Map<const Mat>(sim.displacement().data(), dim, sc.mesh.n_cells());
    const ContactState st = sim.contact_state();
    const auto sets = classify_subfaces(st);
    data.faces = aggregate_fracture_faces(sc.mesh, sc.sub, sc.pairing, st.lambda, st.jump, &sets);
    data.mesh = std::move(sc.mesh);
    levels.push_back(std::move(data));
  }

  StudyResult result;
  const LevelData& ref = levels.back();
  result.n_fractures = ref.mesh.n_fractures();
  const int n_coarse = n_meshes - 1;
  result.eps_u.resize(n_coarse);
  result.eps_lambda.resize(result.n_fractures, n_coarse);
  result.eps_jump.resize(result.n_fractures, n_coarse);
  for (auto& level : levels) {
    result.cells.push_back(level.mesh.n_cells());
    result.iterations.push_back(level.iterations);
  }
  for (int level = 0; level < n_coarse; ++level) {
    result.eps_u(level) = relative_error_cells(levels[level].mesh, levels[level].u, ref.mesh, ref.u);
    result.eps_lambda.col(level) = relative_error_fracture(
        levels[level].mesh, levels[level].faces, ref.mesh, ref.faces, result.n_fractures, true);
    result.eps_jump.col(level) = relative_error_fracture(
        levels[level].mesh, levels[level].faces, ref.mesh, ref.faces, result.n_fractures, false);
  }
  return result;
}

void write_convergence_csv(const std::string& path, const StudyResult& result) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw IoError("cannot write '" + path + "'");
  std::fprintf(out, "level,cells,iterations,eps_u");
  for (int i = 0; i < result.n_fractures; ++i)
    std::fprintf(out, ",eps_lambda_%d,eps_jump_%d", i + 1, i + 1);
  std::fprintf(out, "\n");
  for (size_t level = 0; level < result.cells.size(); ++level) {
    std::fprintf(out, "%zu,%" PRId64 ",%d", level, result.cells[level],
                 result.iterations[level]);
    if (level + 1 < result.cells.size()) {
      std::fprintf(out, ",%.17g", result.eps_u(level));
      for (int i = 0; i < result.n_fractures; ++i)
        std::fprintf(out, ",%.17g,%.17g", result.eps_lambda(i, level),
                     result.eps_jump(i, level));
    } else {
      std::fprintf(out, ",reference");
    }
    std::fprintf(out, "\n");
  }
  auto print_orders = [&](const char* label, const Vec& errors) {
    const Vec orders = pairwise_orders(errors);
    std::fprintf(out, "order_%s", label);
    for (Index k = 0; k < orders.size(); ++k) std::fprintf(out, ",%.6g", orders(k));
    std::fprintf(out, ",slope,%.6g\n", order_slope(errors));
  };
  print_orders("u", result.eps_u);
  for (int i = 0; i < result.n_fractures; ++i) {
    print_orders(("lambda_" + std::to_string(i + 1)).c_str(), result.eps_lambda.row(i).transpose());
    print_orders(("jump_" + std::to_string(i + 1)).c_str(), result.eps_jump.row(i).transpose());
  }
  std::fclose(out);
}

} // namespace porocontact
