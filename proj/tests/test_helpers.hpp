// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/boundary.hpp"
#include "porocontact/material.hpp"
#include "porocontact/structured_mesh.hpp"

namespace porocontact::testing {

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

inline StructuredMeshSpec unit_square_spec(int nx, int ny,
                                           StructuredMeshSpec::Pattern pattern =
                                               StructuredMeshSpec::Pattern::Crossed) {
  StructuredMeshSpec spec;
  spec.dim = 2;
  spec.lo = vec2(0, 0);
  spec.hi = vec2(1, 1);
  spec.divisions = {nx, ny, 1};
  spec.pattern = pattern;
  return spec;
}

inline StructuredMeshSpec unit_cube_spec(int n) {
  StructuredMeshSpec spec;
  spec.dim = 3;
  spec.lo = vec3(0, 0, 0);
  spec.hi = vec3(1, 1, 1);
  spec.divisions = {n, n, n};
  return spec;
}

// Four triangles around an interior two-face fracture: the smallest mesh
// whose split can be enumerated by hand. Vertices L(0,0) M(1,0) R(2,0)
// T(1,1) B(1,-1); the fracture runs along L-M-R.
inline RawMesh rhombus_raw() {
  RawMesh raw;
  raw.dim = 2;
  raw.nodes.resize(2, 5);
  raw.nodes.col(0) = vec2(0, 0);  // L
  raw.nodes.col(1) = vec2(1, 0);  // M
  raw.nodes.col(2) = vec2(2, 0);  // R
  raw.nodes.col(3) = vec2(1, 1);  // T
  raw.nodes.col(4) = vec2(1, -1); // B
  raw.cells.resize(3, 4);
  raw.cells.col(0) << 0, 1, 3;
  raw.cells.col(1) << 1, 2, 3;
  raw.cells.col(2) << 0, 4, 1;
  raw.cells.col(3) << 1, 4, 2;
  RawMesh::FaceGroup frac;
  frac.name = "midline";
  frac.faces.push_back({0, 1, -1});
  frac.faces.push_back({1, 2, -1});
  raw.face_groups.push_back(frac);
  return raw;
}

/// All-Dirichlet mechanics plus optional all-Dirichlet flow matching given
/// affine fields.
inline BoundaryConditions affine_dirichlet_bcs(const Mesh& mesh,
                                               std::function<Vec(const Vec&)> u_exact,
                                               std::function<double(const Vec&)> p_exact = {}) {
  BoundaryConditions bcs;
  for (int g = 0; g < static_cast<int>(mesh.group_names.size()); ++g) {
    if (u_exact)
      bcs.mech[g] = {MechBcType::Dirichlet,
                     [u_exact](const Vec& x, double) { return u_exact(x); }};
    if (p_exact)
      bcs.flow[g] = {FlowBcType::Dirichlet,
                     [p_exact](const Vec& x, double) { return p_exact(x); }};
  }
  return bcs;
}

} // namespace porocontact::testing
