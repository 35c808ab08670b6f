// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/mesh.hpp"

namespace porocontact {

/// Embedded fracture for the structured generator. In 2d a polyline whose
/// segments follow grid lines or cell diagonals; in 3d a planar rectangle
/// (axis-aligned or on a 45-degree grid-diagonal plane).
struct StructuredFracture {
  std::string name;
  std::vector<Vec> polyline; // 2d
  Vec point;                 // 3d plane anchor
  Vec normal;                // 3d plane normal
  double half_u = 0, half_v = 0; // 3d in-plane half extents
};

/// Simplex triangulations of rectangles/boxes: crossed or single-diagonal
/// quads in 2d, six-tet Kuhn cubes in 3d. Interior vertices can be jittered
/// (relative to h) for unstructured test meshes; fracture and boundary
/// vertices stay put.
struct StructuredMeshSpec {
  int dim = 2;
  Vec lo, hi;
  std::array<int, 3> divisions{1, 1, 1};
  enum class Pattern : char { Diagonal, Crossed } pattern = Pattern::Crossed;
  double jitter = 0.0;
  unsigned seed = 20260810;
  std::vector<StructuredFracture> fractures;

  double volume() const;
  StructuredMeshSpec refined(int factor) const;
};

RawMesh generate_structured_mesh(const StructuredMeshSpec& spec);

/// Names of the fracture groups the generator emitted (one per fracture).
std::set<std::string> fracture_tag_set(const StructuredMeshSpec& spec);

} // namespace porocontact
