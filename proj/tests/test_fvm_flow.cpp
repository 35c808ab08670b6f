// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "porocontact/fvm_local.hpp"
#include "test_helpers.hpp"

using namespace porocontact;
using namespace porocontact::testing;

namespace {

// The classic four-unit-square interaction region around one vertex,
// constructed by hand (flow assembly never looks at the cell shapes, only at
// centers, faces and subfaces).
struct SquarePatch {
  Mesh mesh;
  SubGrid sub;
  BoundaryLayout layout;
  MaterialField material;
};

// xi is the distance of the continuity points from the central vertex along
// each half-face: 1/3 for the default construction, 1/2 for continuity at
// the face centers.
SquarePatch square_patch(double xi = 1.0 / 3.0) {
  SquarePatch p;
  Mesh& mesh = p.mesh;
  mesh.dim = 2;
  mesh.vertex_coords.resize(2, 5);
  mesh.vertex_coords.col(0) = vec2(0, 0);
  mesh.vertex_coords.col(1) = vec2(1, 0);
  mesh.vertex_coords.col(2) = vec2(0, 1);
  mesh.vertex_coords.col(3) = vec2(-1, 0);
  mesh.vertex_coords.col(4) = vec2(0, -1);
  mesh.cell_vertices.resize(3, 4);
  mesh.cell_vertices.col(0) << 0, 1, 2;
  mesh.cell_vertices.col(1) << 0, 2, 3;
  mesh.cell_vertices.col(2) << 0, 3, 4;
  mesh.cell_vertices.col(3) << 0, 4, 1;
  mesh.cell_centers.resize(2, 4);
  mesh.cell_centers.col(0) = vec2(0.5, 0.5);
  mesh.cell_centers.col(1) = vec2(-0.5, 0.5);
  mesh.cell_centers.col(2) = vec2(-0.5, -0.5);
  mesh.cell_centers.col(3) = vec2(0.5, -0.5);
  mesh.cell_volumes = Vec::Ones(4);
  // Faces meeting at the central vertex: E, N, W, S.
  mesh.face_vertices = {{0, 1, -1}, {0, 2, -1}, {0, 3, -1}, {0, 4, -1}};
  mesh.face_cells = {{0, 3}, {0, 1}, {1, 2}, {2, 3}};
  mesh.face_centroids.resize(2, 4);
  mesh.face_centroids.col(0) = vec2(0.5, 0);
  mesh.face_centroids.col(1) = vec2(0, 0.5);
  mesh.face_centroids.col(2) = vec2(-0.5, 0);
  mesh.face_centroids.col(3) = vec2(0, -0.5);
  mesh.face_normals.resize(2, 4);
  mesh.face_normals.col(0) = vec2(0, 1);
  mesh.face_normals.col(1) = vec2(1, 0);
  mesh.face_normals.col(2) = vec2(0, 1);
  mesh.face_normals.col(3) = vec2(1, 0);
  mesh.face_areas = Vec::Ones(4);
  mesh.face_kind.assign(4, FaceKind::Interior);
  mesh.face_group.assign(4, -1);
  mesh.face_fracture.assign(4, -1);
  mesh.fracture_partner.assign(4, -1);
  mesh.cell_faces = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  mesh.vertex_cells.assign(5, {});
  mesh.vertex_faces.assign(5, {});
  mesh.vertex_cells[0] = {0, 1, 2, 3};
  mesh.vertex_faces[0] = {0, 1, 2, 3};

  SubGrid& sub = p.sub;
  sub.dim = 2;
  sub.subface_area = Vec::Constant(8, 0.5);
  sub.subface_point.resize(2, 8);
  for (Index f = 0; f < 4; ++f)
    for (int k = 0; k < 2; ++k) {
      const Vec xf = mesh.face_centroids.col(f);
      const Vec v = mesh.vertex_coords.col(mesh.face_vertices[f][k]);
      sub.subface_point.col(2 * f + k) = v + 2.0 * xi * (xf - v);
    }
  sub.subcell_volume = Vec::Constant(12, 1.0 / 3.0);
  sub.subface_set.assign(8, static_cast<char>(SubfaceSet::Remaining));

  p.layout.with_flow = true;
  p.layout.flow_kind.assign(8, static_cast<char>(FlowRowKind::Interior));
  p.layout.flow_slot.assign(8, -1);
  p.layout.mech_kind.assign(8, static_cast<char>(MechRowKind::Interior));
  p.layout.mech_slot.assign(8, -1);
  p.layout.roller_axis.assign(8, -1);

  p.material = MaterialField::uniform(p.mesh, 1.0, 1.0, 0.0, 0.0, 1.0);
  return p;
}

struct FlowFixture {
  Mesh mesh;
  SubGrid sub;
  FracturePairing pairing;
  MaterialField material;
  BoundaryConditions bcs;
  BoundaryLayout layout;
  CondensedOperators ops;
  BoundaryValues bc;
};

FlowFixture make_flow_fixture(const StructuredMeshSpec& spec,
                              std::function<double(const Vec&)> p_exact,
                              const std::set<std::string>& tags = {}) {
  FlowFixture fx;
  fx.mesh = build_mesh(generate_structured_mesh(spec), tags);
  fx.sub = build_subgrid(fx.mesh);
  fx.pairing = pair_fracture_sides(fx.mesh, fx.sub);
  fx.material = MaterialField::uniform(fx.mesh, 1.0, 1.0, 0.0, 0.0, 1.0);
  fx.bcs = affine_dirichlet_bcs(fx.mesh, [](const Vec& x) { return Vec::Zero(x.size()); }, p_exact);
  fx.layout = build_boundary_layout(fx.mesh, fx.sub, fx.bcs, true);
  fx.ops = condense(fx.mesh, fx.sub, fx.pairing, fx.material, fx.layout);
  fx.bc = evaluate_boundary(fx.mesh, fx.sub, fx.layout, fx.bcs, 0.0);
  return fx;
}

} // namespace

namespace {

// Direct elimination of the eight interaction-region equations, written out
// independently of the library assembly. Returns the condensed stencil of
// the flux out of cell 0 across the subface towards cell 1.
Eigen::RowVectorXd square_patch_oracle(double xi) {
  Mat A = Mat::Zero(8, 8);
  Mat Rp = Mat::Zero(8, 4);
  const double m = 0.5;
  const Vec xs[4] = {vec2(xi, 0), vec2(0, xi), vec2(-xi, 0), vec2(0, -xi)};
  const Vec centers[4] = {vec2(0.5, 0.5), vec2(-0.5, 0.5), vec2(-0.5, -0.5), vec2(0.5, -0.5)};
  const int pairs[4][2] = {{0, 3}, {0, 1}, {1, 2}, {2, 3}};
  // Outward normal of the first cell of each pair.
  const Vec outward[4] = {vec2(0, -1), vec2(-1, 0), vec2(0, -1), vec2(1, 0)};
  for (int f = 0; f < 4; ++f) {
    const int a = pairs[f][0], b = pairs[f][1];
    for (int j = 0; j < 2; ++j) {
      A(f, 2 * a + j) += -m * outward[f](j);
      A(f, 2 * b + j) += -m * (-outward[f](j));
    }
    for (int j = 0; j < 2; ++j) {
      A(4 + f, 2 * a + j) += (xs[f] - centers[a])(j);
      A(4 + f, 2 * b + j) -= (xs[f] - centers[b])(j);
    }
    Rp(4 + f, a) += 1.0;
    Rp(4 + f, b) -= 1.0;
  }
  const Mat grad = Eigen::FullPivLU<Mat>(A).solve(-Rp);
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(8);
  w(2 * 0 + 0) = m; // -m K n_x with outward normal (-1, 0) of cell 0
  return w * grad;
}

Eigen::RowVectorXd square_patch_library(double xi) {
  SquarePatch p = square_patch(xi);
  FlowLocalSystem sys = assemble_flow_local(p.mesh, p.sub, p.material, p.layout, 0);
  REQUIRE(sys.A.rows() == 8);
  REQUIRE(sys.n_flux_rows == 4);
  REQUIRE(sys.n_continuity_rows == 4);
  const Mat grad = Eigen::PartialPivLU<Mat>(sys.A).solve(-sys.R_p);
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(8);
  w(2 * 0 + 0) = 0.5;
  return w * grad;
}

} // namespace

TEST_CASE("interaction region on a uniform orthogonal grid: two-point equivalence") {
  // With continuity enforced at the face centers the condensed coefficient
  // is exactly the two-point value m / (cell-center distance) = 0.5.
  const Eigen::RowVectorXd tpfa_oracle = square_patch_oracle(0.5);
  CHECK(tpfa_oracle(0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(tpfa_oracle(1) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(std::abs(tpfa_oracle(2)) < 1e-13);
  CHECK(std::abs(tpfa_oracle(3)) < 1e-13);
  CHECK((square_patch_library(0.5) - tpfa_oracle).norm() < 1e-12);

  // The default construction places the continuity points a third of the
  // way towards the vertex; direct elimination then yields 7/16 on the
  // neighbor pair plus a 1/16 transversal coupling (still exact on linear
  // fields: 7/16 + 1/16 recovers the two-point face total).
  const Eigen::RowVectorXd def_oracle = square_patch_oracle(1.0 / 3.0);
  CHECK(def_oracle(0) == doctest::Approx(0.4375).epsilon(1e-13));
  CHECK(def_oracle(1) == doctest::Approx(-0.4375).epsilon(1e-13));
  CHECK(def_oracle(2) == doctest::Approx(-0.0625).epsilon(1e-12));
  CHECK(def_oracle(3) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK((square_patch_library(1.0 / 3.0) - def_oracle).norm() < 1e-12);
}

TEST_CASE("local equation counts at a four-cell interior vertex") {
  // Crossed-pattern centers have exactly four cells and four faces.
  FlowFixture fx = make_flow_fixture(unit_square_spec(2, 2), [](const Vec&) { return 0.0; });
  bool found = false;
  for (Index v = 0; v < fx.mesh.n_vertices(); ++v) {
    if (fx.mesh.vertex_cells[v].size() != 4 || fx.mesh.vertex_faces[v].size() != 4) continue;
    bool interior = true;
    for (Index f : fx.mesh.vertex_faces[v]) interior = interior && fx.mesh.face_cells[f][1] >= 0;
    if (!interior) continue;
    FlowLocalSystem sys = assemble_flow_local(fx.mesh, fx.sub, fx.material, fx.layout, v);
    CHECK(sys.A.rows() == 8);
    CHECK(sys.n_flux_rows == 4);
    CHECK(sys.n_continuity_rows == 4);
    found = true;
    break;
  }
  CHECK(found);
}

TEST_CASE("constant pressure field produces zero fluxes") {
  FlowFixture fx = make_flow_fixture(unit_square_spec(3, 3), [](const Vec&) { return 7.5; });
  const Vec p = Vec::Constant(fx.mesh.n_cells(), 7.5);
  const Vec u = Vec::Zero(fx.ops.n_u());
  const Vec lam = Vec::Zero(0);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, p, lam, fx.bc);
  CHECK(q.flux.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("linear pressure fields are reproduced exactly") {
  auto p_exact = [](const Vec& x) { return 1.0 + 2.0 * x(0) - 3.0 * x(1); };
  const Vec grad_p = vec2(2.0, -3.0);
  StructuredMeshSpec spec = unit_square_spec(4, 4);
  spec.jitter = 0.15;
  FlowFixture fx = make_flow_fixture(spec, p_exact);

  Vec p(fx.mesh.n_cells());
  for (Index c = 0; c < fx.mesh.n_cells(); ++c) p(c) = p_exact(fx.mesh.cell_centers.col(c));
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, Vec::Zero(fx.ops.n_u()), p,
                                                Vec::Zero(0), fx.bc);
  double max_err = 0, scale = 0;
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    const Index f = fx.sub.face_of(s);
    for (int side = 0; side < 2; ++side) {
      const Index c = fx.mesh.face_cells[f][side];
      if (c < 0) continue;
      const double exact = -fx.sub.subface_area(s) * grad_p.dot(fx.mesh.outward_normal(c, f));
      max_err = std::max(max_err, std::abs(q.flux(2 * s + side) - exact));
      scale = std::max(scale, std::abs(exact));
    }
  }
  CHECK(max_err <= 1e-12 * scale);
}

TEST_CASE("unit flux across the midline for p = x on the unit square") {
  auto p_exact = [](const Vec& x) { return x(0); };
  FlowFixture fx = make_flow_fixture(unit_square_spec(4, 4), p_exact);
  Vec p(fx.mesh.n_cells());
  for (Index c = 0; c < fx.mesh.n_cells(); ++c) p(c) = fx.mesh.cell_centers(0, c);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, Vec::Zero(fx.ops.n_u()), p,
                                                Vec::Zero(0), fx.bc);
  // Faces on x = 0.5 with normal +-x: flux density one, signed by side.
  double total = 0;
  for (Index f = 0; f < fx.mesh.n_faces(); ++f) {
    if (std::abs(fx.mesh.face_centroids(0, f) - 0.5) > 1e-12) continue;
    if (std::abs(std::abs(fx.mesh.face_normals(0, f)) - 1.0) > 1e-12) continue;
    for (int k = 0; k < 2; ++k) {
      const Index s = fx.sub.subface_id(f, k);
      const Index c = fx.mesh.face_cells[f][0];
      const double sign = fx.mesh.outward_normal(c, f)(0) > 0 ? 1.0 : -1.0;
      total += sign * q.flux(2 * s + 0);
    }
  }
  CHECK(total == doctest::Approx(-1.0).epsilon(1e-12)); // q = -grad p
}

TEST_CASE("flux stencils carry no multiplier dependence") {
  StructuredMeshSpec spec = unit_square_spec(4, 4);
  StructuredFracture frac;
  frac.name = "crack";
  frac.polyline = {vec2(0.25, 0.5), vec2(0.75, 0.5)};
  spec.fractures.push_back(frac);
  FlowFixture fx = make_flow_fixture(spec, [](const Vec& x) { return x(0); }, {"crack"});
  REQUIRE(fx.pairing.n_pairs() > 0);

  Vec p = Vec::Random(fx.mesh.n_cells());
  Vec u = Vec::Zero(fx.ops.n_u());
  Vec lam1 = Vec::Random(fx.ops.n_lambda());
  Vec lam2 = 10.0 * Vec::Random(fx.ops.n_lambda());
  const auto qa = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                 fx.layout, fx.ops, u, p, lam1, fx.bc);
  const auto qb = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                 fx.layout, fx.ops, u, p, lam2, fx.bc);
  CHECK((qa.flux.array() == qb.flux.array()).all());

  // Impermeable fractures: exactly zero flux on fracture subfaces.
  for (Index r = 0; r < fx.pairing.n_pairs(); ++r) {
    CHECK(qa.flux(2 * fx.pairing.positive[r]) == 0.0);
    CHECK(qa.flux(2 * fx.pairing.negative_partner[r]) == 0.0);
  }
}

TEST_CASE("one-sided condensed fluxes of interior subfaces are negations") {
  StructuredMeshSpec spec = unit_square_spec(3, 3);
  spec.jitter = 0.1;
  FlowFixture fx = make_flow_fixture(spec, [](const Vec& x) { return x(0) * 2 - x(1); });
  Vec p = Vec::Random(fx.mesh.n_cells());
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, Vec::Zero(fx.ops.n_u()), p,
                                                Vec::Zero(0), fx.bc);
  const double scale = q.flux.cwiseAbs().maxCoeff();
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    if (fx.mesh.face_cells[fx.sub.face_of(s)][1] < 0) continue;
    CHECK(std::abs(q.flux(2 * s) + q.flux(2 * s + 1)) <= 1e-12 * scale);
  }
}
