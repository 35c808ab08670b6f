// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "porocontact/subgrid.hpp"
#include "test_helpers.hpp"

using namespace porocontact;
using namespace porocontact::testing;

TEST_CASE("continuity point sits a third of the way towards the vertex") {
  const Mesh mesh =
      build_mesh(generate_structured_mesh(unit_square_spec(1, 1, StructuredMeshSpec::Pattern::Diagonal)), {});
  const SubGrid sub = build_subgrid(mesh);
  // Face from (0,0) to (1,0): subface at the (0,0) corner.
  bool found = false;
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const Vec c = mesh.face_centroids.col(f);
    if (std::abs(c(0) - 0.5) > 1e-14 || std::abs(c(1)) > 1e-14) continue;
    for (int k = 0; k < 2; ++k) {
      if (mesh.vertex_coords.col(mesh.face_vertices[f][k]).norm() > 1e-14) continue;
      const Index s = sub.subface_id(f, k);
      CHECK(sub.subface_point(0, s) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
      CHECK(sub.subface_point(1, s) == doctest::Approx(0.0));
      CHECK(sub.subface_area(s) == doctest::Approx(0.5).epsilon(1e-14));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("3d triangular faces split into three equal-area subfaces") {
  const Mesh mesh = build_mesh(generate_structured_mesh(unit_cube_spec(1)), {});
  const SubGrid sub = build_subgrid(mesh);
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    for (int k = 0; k < 3; ++k)
      CHECK(sub.subface_area(sub.subface_id(f, k)) ==
            doctest::Approx(mesh.face_areas(f) / 3.0).epsilon(1e-14));
    // A boundary right triangle of the unit cube has area 1/2.
    if (mesh.face_kind[f] == FaceKind::Boundary && mesh.face_areas(f) == doctest::Approx(0.5))
      CHECK(sub.subface_area(sub.subface_id(f, 0)) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }
}

TEST_CASE("subface and subcell measures partition faces and cells") {
  for (int dim = 2; dim <= 3; ++dim) {
    StructuredMeshSpec spec = dim == 2 ? unit_square_spec(5, 4) : unit_cube_spec(3);
    spec.jitter = 0.12;
    const Mesh mesh = build_mesh(generate_structured_mesh(spec), {});
    const SubGrid sub = build_subgrid(mesh);
    for (Index f = 0; f < mesh.n_faces(); ++f) {
      double total = 0;
      for (int k = 0; k < dim; ++k) total += sub.subface_area(sub.subface_id(f, k));
      CHECK(std::abs(total - mesh.face_areas(f)) <= 1e-12 * mesh.face_areas(f));
    }
    for (Index c = 0; c < mesh.n_cells(); ++c) {
      double total = 0;
      for (int k = 0; k <= dim; ++k) total += sub.subcell_volume(sub.subcell_id(c, k));
      CHECK(std::abs(total - mesh.cell_volumes(c)) <= 1e-12 * mesh.cell_volumes(c));
    }
    for (Index s = 0; s < sub.n_subfaces(); ++s) {
      const Vec v = mesh.vertex_coords.col(subface_vertex(mesh, sub, s));
      CHECK((sub.subface_point.col(s) - v).norm() > 0);
    }
  }
}

TEST_CASE("subgrid construction is deterministic") {
  StructuredMeshSpec spec = unit_square_spec(4, 3);
  spec.jitter = 0.1;
  const Mesh mesh = build_mesh(generate_structured_mesh(spec), {});
  const SubGrid a = build_subgrid(mesh);
  const SubGrid b = build_subgrid(mesh);
  CHECK((a.subface_area.array() == b.subface_area.array()).all());
  CHECK((a.subface_point.array() == b.subface_point.array()).all());
  CHECK((a.subcell_volume.array() == b.subcell_volume.array()).all());
}

TEST_CASE("fracture pairing is an involution-consistent bijection with zero gap") {
  StructuredMeshSpec spec = unit_square_spec(8, 8);
  StructuredFracture frac;
  frac.name = "crack";
  frac.polyline = {vec2(0.25, 0.5), vec2(0.875, 0.5)};
  spec.fractures.push_back(frac);
  const Mesh mesh = build_mesh(generate_structured_mesh(spec), {"crack"});
  const SubGrid sub = build_subgrid(mesh);

  // P, N, R are disjoint and exhaustive.
  Index np = 0, nn = 0, nr = 0;
  for (char c : sub.subface_set) {
    np += c == static_cast<char>(SubfaceSet::Positive);
    nn += c == static_cast<char>(SubfaceSet::Negative);
    nr += c == static_cast<char>(SubfaceSet::Remaining);
  }
  CHECK(np == nn);
  CHECK(np + nn + nr == sub.n_subfaces());

  const FracturePairing pairing = pair_fracture_sides(mesh, sub);
  CHECK(pairing.n_pairs() == np);
  std::vector<char> used(sub.n_subfaces(), 0);
  for (Index r = 0; r < pairing.n_pairs(); ++r) {
    const Index p = pairing.positive[r];
    const Index q = pairing.negative_partner[r];
    CHECK(sub.subface_set[p] == static_cast<char>(SubfaceSet::Positive));
    CHECK(sub.subface_set[q] == static_cast<char>(SubfaceSet::Negative));
    CHECK(!used[q]);
    used[q] = 1;
    // R^{-1}(R(s)) = s through the shared rank.
    CHECK(pairing.rank_of_subface[p] == r);
    CHECK(pairing.rank_of_subface[q] == r);
    CHECK(pairing.gap(r) == 0.0);
    // Matching meshes: paired continuity points coincide.
    CHECK((sub.subface_point.col(p) - sub.subface_point.col(q)).norm() == 0.0);
  }

  SUBCASE("gap field overrides the geometric distance") {
    const auto pairing2 =
        pair_fracture_sides(mesh, sub, GapField([](const Vec&) { return 1e-3; }));
    CHECK((pairing2.gap.array() == 1e-3).all());
  }
}
