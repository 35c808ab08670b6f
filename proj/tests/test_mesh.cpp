// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "porocontact/mesh.hpp"
#include "test_helpers.hpp"

using namespace porocontact;
using namespace porocontact::testing;

TEST_CASE("mesh without fracture tags is topologically identical to the input") {
  auto raw = rhombus_raw();
  raw.face_groups.clear();
  const Mesh mesh = build_mesh(raw, {});
  CHECK(mesh.n_cells() == 4);
  CHECK(mesh.n_vertices() == 5);
  CHECK(mesh.n_faces() == 8); // 4 boundary + 4 interior
  CHECK(mesh.n_fractures() == 0);
  Index n_frac = 0;
  for (auto k : mesh.face_kind)
    n_frac += k == FaceKind::FracturePositive || k == FaceKind::FractureNegative;
  CHECK(n_frac == 0);
  mesh.validate(2.0);
}

TEST_CASE("splitting duplicates one face per fracture face") {
  StructuredMeshSpec spec = unit_square_spec(4, 4);
  StructuredFracture frac;
  frac.name = "crack";
  frac.polyline = {vec2(0.25, 0.5), vec2(0.75, 0.5)};
  spec.fractures.push_back(frac);
  const RawMesh raw = generate_structured_mesh(spec);

  RawMesh untagged = raw;
  untagged.face_groups.pop_back(); // drop the fracture group
  const Mesh plain = build_mesh(untagged, {});
  const Mesh split = build_mesh(raw, {"crack"});
  CHECK(split.n_faces() == plain.n_faces() + 2); // two tagged edges
  Index n_pos = 0, n_neg = 0;
  for (auto k : split.face_kind) {
    n_pos += k == FaceKind::FracturePositive;
    n_neg += k == FaceKind::FractureNegative;
  }
  CHECK(n_pos == 2);
  CHECK(n_neg == 2);
  split.validate(1.0);
}

TEST_CASE("hand-built four-triangle split: tips shared, interior vertex duplicated") {
  const RawMesh raw = rhombus_raw();
  const Mesh mesh = build_mesh(raw, {"midline"});

  // Only the middle vertex M is strictly interior to the fracture.
  CHECK(mesh.n_vertices() == 6);
  CHECK(mesh.n_faces() == 10); // 8 plus one duplicate per fracture face

  // The duplicate coincides with M geometrically.
  CHECK((mesh.vertex_coords.col(5) - mesh.vertex_coords.col(1)).norm() == 0.0);

  // The stored orientation of the first fracture edge (L to M) has its
  // normal pointing down, so the positive side is the lower half. Positive
  // copies keep the original vertex, negative copies reference the duplicate.
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.face_kind[f] == FaceKind::FracturePositive) {
      CHECK(mesh.face_cells[f][1] == -1);
      CHECK(mesh.cell_centers(1, mesh.face_cells[f][0]) < 0);
      const Index partner = mesh.fracture_partner[f];
      REQUIRE(partner >= 0);
      CHECK(mesh.face_kind[partner] == FaceKind::FractureNegative);
      CHECK(mesh.cell_centers(1, mesh.face_cells[partner][0]) > 0);
      // Contact normal points out of the positive side (upwards).
      CHECK(mesh.face_normals(1, f) == doctest::Approx(1.0));
    }
  }

  // Tip vertices L and R still appear in cells on both sides.
  for (Index tip : {Index(0), Index(2)}) {
    bool above = false, below = false;
    for (Index c : mesh.vertex_cells[tip]) {
      above = above || mesh.cell_centers(1, c) > 0;
      below = below || mesh.cell_centers(1, c) < 0;
    }
    CHECK(above);
    CHECK(below);
  }
  // The duplicated vertex only touches the negative-side cells (above).
  for (Index c : mesh.vertex_cells[5]) CHECK(mesh.cell_centers(1, c) > 0);
  for (Index c : mesh.vertex_cells[1]) CHECK(mesh.cell_centers(1, c) < 0);

  mesh.validate(2.0);
}

TEST_CASE("interior face normals are exact negations across sides") {
  StructuredMeshSpec spec = unit_square_spec(3, 3);
  spec.jitter = 0.15;
  const Mesh mesh = build_mesh(generate_structured_mesh(spec), {});
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.face_kind[f] != FaceKind::Interior) continue;
    const Vec n0 = mesh.outward_normal(mesh.face_cells[f][0], f);
    const Vec n1 = mesh.outward_normal(mesh.face_cells[f][1], f);
    CHECK((n0 + n1).norm() == 0.0);
  }
}

TEST_CASE("boundary-reaching fracture ends are split through") {
  // A fracture ending on the domain boundary must not pin the two sides
  // together there: the end vertex fan separates into two components.
  StructuredMeshSpec spec = unit_square_spec(4, 4);
  StructuredFracture frac;
  frac.name = "tofree";
  frac.polyline = {vec2(0.5, 0.5), vec2(1.0, 0.5)};
  spec.fractures.push_back(frac);
  const Mesh mesh = build_mesh(generate_structured_mesh(spec), {"tofree"});
  mesh.validate(1.0);
  // End vertex at (1.0, 0.5) is kept shared but the local fan is split by
  // the face copies; both sides still reference it.
  Index end_vertex = -1;
  for (Index v = 0; v < mesh.n_vertices(); ++v)
    if ((mesh.vertex_coords.col(v) - vec2(1.0, 0.5)).norm() < 1e-12) {
      CHECK(end_vertex == -1); // not duplicated
      end_vertex = v;
    }
  REQUIRE(end_vertex >= 0);
}

TEST_CASE("topology and validation errors") {
  SUBCASE("unknown fracture tag") {
    CHECK_THROWS_AS(build_mesh(rhombus_raw(), {"nope"}), ValidationError);
  }
  SUBCASE("fracture tag on boundary faces") {
    auto raw = rhombus_raw();
    raw.face_groups[0].faces = {{0, 3, -1}}; // boundary edge L-T
    CHECK_THROWS_AS(build_mesh(raw, {"midline"}), TopologyError);
  }
  SUBCASE("group referencing a non-existent face") {
    auto raw = rhombus_raw();
    raw.face_groups[0].faces.push_back({0, 2, -1}); // L-R is not an edge
    CHECK_THROWS_AS(build_mesh(raw, {"midline"}), TopologyError);
  }
  SUBCASE("non-simplex element count") {
    RawMesh raw;
    raw.dim = 2;
    raw.nodes.resize(2, 4);
    raw.nodes << 0, 1, 1, 0, 0, 0, 1, 1;
    raw.cells.resize(4, 1); // quadrilateral connectivity
    raw.cells << 0, 1, 2, 3;
    CHECK_THROWS_AS(build_mesh(raw, {}), ValidationError);
  }
  SUBCASE("degenerate cell") {
    RawMesh raw;
    raw.dim = 2;
    raw.nodes.resize(2, 3);
    raw.nodes << 0, 1, 2, 0, 0, 0; // collinear
    raw.cells.resize(3, 1);
    raw.cells << 0, 1, 2;
    CHECK_THROWS_AS(build_mesh(raw, {}), GeometryError);
  }
}

TEST_CASE("3d fracture splitting on a Kuhn grid") {
  StructuredMeshSpec spec = unit_cube_spec(4);
  StructuredFracture frac;
  frac.name = "plane";
  frac.point = vec3(0.5, 0.5, 0.5);
  frac.normal = vec3(0, 0, 1);
  frac.half_u = 0.25 + 1e-9;
  frac.half_v = 0.25 + 1e-9;
  spec.fractures.push_back(frac);
  const RawMesh raw = generate_structured_mesh(spec);
  RawMesh untagged = raw;
  untagged.face_groups.pop_back();
  const Mesh plain = build_mesh(untagged, {});
  const Mesh split = build_mesh(raw, {"plane"});
  // Central 2x2 patch of quads, two triangles each.
  Index n_pos = 0;
  for (auto k : split.face_kind) n_pos += k == FaceKind::FracturePositive;
  CHECK(n_pos == 8);
  CHECK(split.n_faces() == plain.n_faces() + n_pos);
  // Rim vertices stay shared: the 3x3 grid points minus the interior one.
  CHECK(split.n_vertices() == plain.n_vertices() + 1);
  split.validate(1.0);
}

TEST_CASE("45-degree diagonal fracture conforms to the Kuhn grid") {
  StructuredMeshSpec spec = unit_cube_spec(4);
  StructuredFracture frac;
  frac.name = "incline";
  frac.point = vec3(0.5, 0.5, 0.5);
  frac.normal = vec3(0, 1, -1);
  frac.half_u = 0.3;
  frac.half_v = 0.3;
  spec.fractures.push_back(frac);
  const Mesh mesh = build_mesh(generate_structured_mesh(spec), {"incline"});
  Index n_pos = 0;
  for (auto k : mesh.face_kind) n_pos += k == FaceKind::FracturePositive;
  CHECK(n_pos > 0);
  mesh.validate(1.0);
}
