// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "porocontact/fvm_local.hpp"
#include "test_helpers.hpp"

using namespace porocontact;
using namespace porocontact::testing;

namespace {

struct MechFixture {
  Mesh mesh;
  SubGrid sub;
  FracturePairing pairing;
  MaterialField material;
  BoundaryConditions bcs;
  BoundaryLayout layout;
  CondensedOperators ops;
  BoundaryValues bc;
  bool with_flow = false;

  Vec cellwise_u(std::function<Vec(const Vec&)> u_exact) const {
    Vec u(ops.n_u());
    for (Index c = 0; c < mesh.n_cells(); ++c)
      u.segment(c * mesh.dim, mesh.dim) = u_exact(mesh.cell_centers.col(c));
    return u;
  }
  Vec cellwise_p(std::function<double(const Vec&)> p_exact) const {
    Vec p(ops.n_p());
    for (Index c = 0; c < ops.n_p(); ++c) p(c) = p_exact(mesh.cell_centers.col(c));
    return p;
  }
};

MechFixture make_mech_fixture(const StructuredMeshSpec& spec,
                              std::function<Vec(const Vec&)> u_exact,
                              std::function<double(const Vec&)> p_exact = {},
                              double alpha = 0.0, const std::set<std::string>& tags = {},
                              double G = 1.0, double lambda = 1.0) {
  MechFixture fx;
  fx.with_flow = static_cast<bool>(p_exact);
  fx.mesh = build_mesh(generate_structured_mesh(spec), tags);
  fx.sub = build_subgrid(fx.mesh);
  fx.pairing = pair_fracture_sides(fx.mesh, fx.sub);
  fx.material = MaterialField::uniform(fx.mesh, G, lambda, alpha, 0.0, 1.0);
  fx.bcs = affine_dirichlet_bcs(fx.mesh, u_exact, p_exact);
  fx.layout = build_boundary_layout(fx.mesh, fx.sub, fx.bcs, fx.with_flow);
  fx.ops = condense(fx.mesh, fx.sub, fx.pairing, fx.material, fx.layout);
  fx.bc = evaluate_boundary(fx.mesh, fx.sub, fx.layout, fx.bcs, 0.0);
  return fx;
}

Mat affine_stress(const Mat& grad, double G, double lambda, int dim) {
  const Mat sym = 0.5 * (grad + grad.transpose());
  return 2.0 * G * sym + lambda * grad.trace() * Mat::Identity(dim, dim);
}

} // namespace

TEST_CASE("mechanics equation count at a four-cell interior vertex") {
  auto zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  MechFixture fx = make_mech_fixture(unit_square_spec(2, 2), zero);
  bool found = false;
  for (Index v = 0; v < fx.mesh.n_vertices(); ++v) {
    if (fx.mesh.vertex_cells[v].size() != 4 || fx.mesh.vertex_faces[v].size() != 4) continue;
    bool interior = true;
    for (Index f : fx.mesh.vertex_faces[v]) interior = interior && fx.mesh.face_cells[f][1] >= 0;
    if (!interior) continue;
    MechLocalSystem sys = assemble_mech_local(fx.mesh, fx.sub, fx.pairing, fx.material, fx.layout, v);
    CHECK(sys.A.rows() == 16);
    CHECK(sys.n_traction_rows == 8);
    CHECK(sys.n_continuity_rows == 8);
    found = true;
    break;
  }
  CHECK(found);
}

TEST_CASE("affine displacement fields give exact tractions (2d, jittered)") {
  Mat A(2, 2);
  A << 0.7, -0.3, 0.4, 1.1;
  auto u_exact = [A](const Vec& x) { return Vec(A * x + vec2(0.1, -0.2)); };
  StructuredMeshSpec spec = unit_square_spec(4, 4);
  spec.jitter = 0.15;
  MechFixture fx = make_mech_fixture(spec, u_exact);

  const Vec u = fx.cellwise_u(u_exact);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), Vec::Zero(0),
                                                fx.bc);
  const Mat sigma = affine_stress(A, 1.0, 1.0, 2);
  double max_err = 0, scale = 0;
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    const Index f = fx.sub.face_of(s);
    for (int side = 0; side < 2; ++side) {
      const Index c = fx.mesh.face_cells[f][side];
      if (c < 0) continue;
      const Vec exact = fx.sub.subface_area(s) * sigma * fx.mesh.outward_normal(c, f);
      max_err = std::max(max_err, (q.traction.col(2 * s + side) - exact).norm());
      scale = std::max(scale, exact.norm());
    }
  }
  CHECK(max_err <= 1e-12 * scale);
}

TEST_CASE("u = (x, 0) with G = Lambda = 1 gives traction density (3, 0)") {
  auto u_exact = [](const Vec& x) { return vec2(x(0), 0.0); };
  MechFixture fx = make_mech_fixture(unit_square_spec(3, 3), u_exact);
  const Vec u = fx.cellwise_u(u_exact);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), Vec::Zero(0),
                                                fx.bc);
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    const Index f = fx.sub.face_of(s);
    if (std::abs(std::abs(fx.mesh.face_normals(0, f)) - 1.0) > 1e-12) continue;
    const Index c = fx.mesh.face_cells[f][0];
    const double nx = fx.mesh.outward_normal(c, f)(0);
    CHECK(q.traction(0, 2 * s) ==
          doctest::Approx(3.0 * fx.sub.subface_area(s) * nx).epsilon(1e-12));
    CHECK(q.traction(1, 2 * s) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("zero displacement with uniform unit pressure: traction = -m n") {
  auto zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  auto p_one = [](const Vec&) { return 1.0; };
  MechFixture fx = make_mech_fixture(unit_square_spec(3, 3), zero, p_one, 1.0);
  const Vec u = Vec::Zero(fx.ops.n_u());
  const Vec p = Vec::Ones(fx.ops.n_p());
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, p, Vec::Zero(0), fx.bc);
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    const Index f = fx.sub.face_of(s);
    const Index c = fx.mesh.face_cells[f][0];
    const Vec expected = -fx.sub.subface_area(s) * fx.mesh.outward_normal(c, f);
    CHECK((q.traction.col(2 * s) - expected).norm() <= 1e-12 * fx.sub.subface_area(s));
  }
}

TEST_CASE("rigid translations produce zero traction") {
  auto u_exact = [](const Vec&) { return vec2(0.3, -0.7); };
  MechFixture fx = make_mech_fixture(unit_square_spec(3, 3), u_exact);
  const Vec u = fx.cellwise_u(u_exact);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), Vec::Zero(0),
                                                fx.bc);
  CHECK(q.traction.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("infinitesimal rotations produce zero weakly symmetrized traction") {
  Mat W(2, 2);
  W << 0, -0.01, 0.01, 0;
  auto u_exact = [W](const Vec& x) { return Vec(W * x); };
  StructuredMeshSpec spec = unit_square_spec(3, 3);
  spec.jitter = 0.1;
  MechFixture fx = make_mech_fixture(spec, u_exact);
  const Vec u = fx.cellwise_u(u_exact);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), Vec::Zero(0),
                                                fx.bc);
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    if (fx.mesh.face_cells[fx.sub.face_of(s)][1] < 0) continue;
    CHECK(q.traction.col(2 * s).norm() < 1e-14);
  }
}

TEST_CASE("3d affine patch: exact tractions on a jittered Kuhn mesh") {
  Mat A(3, 3);
  A << 0.5, 0.2, -0.1, -0.3, 0.8, 0.25, 0.15, -0.4, 1.2;
  auto u_exact = [A](const Vec& x) { return Vec(A * x + vec3(0.1, 0.0, -0.3)); };
  StructuredMeshSpec spec = unit_cube_spec(2);
  spec.jitter = 0.1;
  MechFixture fx = make_mech_fixture(spec, u_exact, {}, 0.0, {}, 2.0, 1.5);
  const Vec u = fx.cellwise_u(u_exact);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), Vec::Zero(0),
                                                fx.bc);
  const Mat sigma = affine_stress(A, 2.0, 1.5, 3);
  double max_err = 0, scale = 0;
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    const Index f = fx.sub.face_of(s);
    for (int side = 0; side < 2; ++side) {
      const Index c = fx.mesh.face_cells[f][side];
      if (c < 0) continue;
      const Vec exact = fx.sub.subface_area(s) * sigma * fx.mesh.outward_normal(c, f);
      max_err = std::max(max_err, (q.traction.col(2 * s + side) - exact).norm());
      scale = std::max(scale, exact.norm());
    }
  }
  CHECK(max_err <= 1e-11 * scale);
}

TEST_CASE("one-sided tractions of interior subfaces are negations") {
  StructuredMeshSpec spec = unit_square_spec(3, 3);
  spec.jitter = 0.1;
  auto zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  MechFixture fx = make_mech_fixture(spec, zero);
  std::srand(7);
  const Vec u = Vec::Random(fx.ops.n_u());
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), Vec::Zero(0),
                                                fx.bc);
  const double scale = q.traction.cwiseAbs().maxCoeff();
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    if (fx.mesh.face_cells[fx.sub.face_of(s)][1] < 0) continue;
    CHECK((q.traction.col(2 * s) + q.traction.col(2 * s + 1)).norm() <= 1e-12 * scale);
  }
}

TEST_CASE("weak symmetry: volume-weighted stress asymmetry vanishes per vertex") {
  StructuredMeshSpec spec = unit_square_spec(3, 3);
  spec.jitter = 0.12;
  auto zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  MechFixture fx = make_mech_fixture(spec, zero);
  const Vec u = Vec::Random(fx.ops.n_u());
  const Mat grads = reconstruct_displacement_gradients(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                       fx.layout, u, Vec::Zero(0), Vec::Zero(0),
                                                       fx.bc);
  const int dim = fx.mesh.dim;
  double max_asym = 0, scale = 0;
  for (Index v = 0; v < fx.mesh.n_vertices(); ++v) {
    if (fx.mesh.vertex_cells[v].empty()) continue;
    // theta_K^v = C_K : grad - skew(<C : grad>_v); the average of the skew
    // parts must vanish.
    Mat avg = Mat::Zero(dim, dim);
    double wsum = 0;
    std::vector<std::pair<double, Mat>> cellwise;
    for (Index c : fx.mesh.vertex_cells[v]) {
      int corner = -1;
      for (int k = 0; k <= dim; ++k)
        if (fx.mesh.cell_vertices(k, c) == v) corner = k;
      const double w = fx.sub.subcell_volume(fx.sub.subcell_id(c, corner));
      const Mat g = Eigen::Map<const Mat>(grads.col(fx.sub.subcell_id(c, corner)).data(), dim, dim)
                        .transpose(); // row-major storage
      const Mat cg = 2.0 * fx.material.shear_modulus(c) * g +
                     fx.material.lame_lambda(c) * g.trace() * Mat::Identity(dim, dim);
      avg += w * cg;
      wsum += w;
      cellwise.emplace_back(w, cg);
      scale = std::max(scale, cg.norm());
    }
    avg /= wsum;
    const Mat skew_avg = 0.5 * (avg - avg.transpose());
    Mat asym = Mat::Zero(dim, dim);
    for (auto& [w, cg] : cellwise) {
      const Mat theta = cg - skew_avg;
      asym += (w / wsum) * (theta - theta.transpose());
    }
    max_asym = std::max(max_asym, asym.norm());
  }
  CHECK(max_asym <= 1e-10 * std::max(scale, 1.0));
}

TEST_CASE("fracture subfaces: traction equals the multiplier times the area") {
  StructuredMeshSpec spec = unit_square_spec(4, 4);
  StructuredFracture frac;
  frac.name = "crack";
  frac.polyline = {vec2(0.25, 0.5), vec2(0.75, 0.5)};
  spec.fractures.push_back(frac);
  auto zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  MechFixture fx = make_mech_fixture(spec, zero, {}, 0.0, {"crack"});
  REQUIRE(fx.pairing.n_pairs() > 0);

  const Vec u = Vec::Random(fx.ops.n_u());
  const Vec lam = Vec::Random(fx.ops.n_lambda());
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), lam, fx.bc);
  for (Index r = 0; r < fx.pairing.n_pairs(); ++r) {
    const Index p = fx.pairing.positive[r];
    const Index nsub = fx.pairing.negative_partner[r];
    const Vec lam_r = lam.segment(r * 2, 2);
    CHECK((q.traction.col(2 * p) - fx.sub.subface_area(p) * lam_r).norm() == 0.0);
    CHECK((q.traction.col(2 * nsub) + fx.sub.subface_area(nsub) * lam_r).norm() == 0.0);
  }
}

TEST_CASE("Dirichlet subfaces reproduce the boundary displacement") {
  auto u_exact = [](const Vec& x) { return vec2(0.2 * x(1), -0.1 * x(0)); };
  MechFixture fx = make_mech_fixture(unit_square_spec(2, 3), u_exact);
  const Vec u = fx.cellwise_u(u_exact);
  const auto q = reconstruct_subface_quantities(fx.mesh, fx.sub, fx.pairing, fx.material,
                                                fx.layout, fx.ops, u, Vec::Zero(0), Vec::Zero(0),
                                                fx.bc);
  for (Index s = 0; s < fx.sub.n_subfaces(); ++s) {
    if (fx.layout.mech(s) != MechRowKind::Dirichlet) continue;
    const Vec g = u_exact(fx.sub.subface_point.col(s));
    CHECK((q.trace.col(s) - g).norm() <= 1e-12 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("condensation is deterministic and contact-state independent") {
  StructuredMeshSpec spec = unit_square_spec(3, 3);
  StructuredFracture frac;
  frac.name = "crack";
  frac.polyline = {vec2(1.0 / 3.0, 2.0 / 3.0), vec2(2.0 / 3.0, 2.0 / 3.0)};
  spec.fractures.push_back(frac);
  auto zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  MechFixture fx = make_mech_fixture(spec, zero, {}, 0.0, {"crack"});
  const CondensedOperators again =
      condense(fx.mesh, fx.sub, fx.pairing, fx.material, fx.layout);
  const SparseMat diff_u = SparseMat(fx.ops.trac_u) - SparseMat(again.trac_u);
  const SparseMat diff_l = SparseMat(fx.ops.trac_lam) - SparseMat(again.trac_lam);
  CHECK(diff_u.norm() == 0.0);
  CHECK(diff_l.norm() == 0.0);
}
