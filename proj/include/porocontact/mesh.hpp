// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "porocontact/core.hpp"

namespace porocontact {

/// Neutral in-memory mesh description: nodes, simplex connectivity and
/// named face groups (boundary patches and fracture surfaces).
struct RawMesh {
  int dim = 2;
  Mat nodes;              // dim x n_nodes
  Eigen::MatrixX<Index> cells; // (dim+1) x n_cells, simplices only

  struct FaceGroup {
    std::string name;
    // Vertex tuples, dim entries used (third is -1 in 2d).
    std::vector<std::array<Index, 3>> faces;
  };
  std::vector<FaceGroup> face_groups;
};

enum class FaceKind : char {
  Interior,
  Boundary,
  FracturePositive, // Gamma+
  FractureNegative, // Gamma-
};

/// Cell/face/vertex topology with fracture-conforming splitting applied.
/// Immutable after construction; safe to share read-only across threads.
struct Mesh {
  int dim = 2;

  Mat vertex_coords;            // dim x n_vertices
  Eigen::MatrixX<Index> cell_vertices; // (dim+1) x n_cells

  Mat cell_centers;  // dim x n_cells (centroids)
  Vec cell_volumes;  // n_cells
  Mat face_centroids; // dim x n_faces
  Mat face_normals;   // dim x n_faces, unit; for fracture faces oriented
                      // outward from the owning cell
  Vec face_areas;     // n_faces

  std::vector<std::array<Index, 3>> face_vertices; // dim entries used
  std::vector<std::array<Index, 2>> face_cells;    // second = -1 on boundary/fracture
  std::vector<std::vector<Index>> cell_faces;      // F_K
  std::vector<std::vector<Index>> vertex_cells;    // T_v
  std::vector<std::vector<Index>> vertex_faces;    // F_v

  std::vector<FaceKind> face_kind;
  std::vector<int> face_group;       // group id, -1 for untagged interior faces
  std::vector<int> face_fracture;    // fracture index, -1 if none
  std::vector<Index> fracture_partner; // opposite copy for fracture faces, else -1
  std::vector<std::string> group_names;
  std::vector<std::string> fracture_names;

  Index n_cells() const { return cell_vertices.cols(); }
  Index n_faces() const { return static_cast<Index>(face_vertices.size()); }
  Index n_vertices() const { return vertex_coords.cols(); }
  int n_fractures() const { return static_cast<int>(fracture_names.size()); }

  /// Outward unit normal of cell `cell` at face `face` (sign-adjusted copy
  /// of the stored face normal).
  Vec outward_normal(Index cell, Index face) const;
  /// +1 if the stored face normal points out of `cell`, else -1.
  double outward_sign(Index cell, Index face) const;

  int group_id(const std::string& name) const;

  /// Checks the structural invariants (neighbor counts, positive measures,
  /// partition sums). Throws TopologyError/GeometryError on violation.
  /// When domain_volume >= 0, also checks sum of cell volumes against it.
  void validate(double domain_volume = -1.0) const;
};

/// Builds the mesh from a raw description and splits it along the faces of
/// the named fracture groups. Each fracture face is duplicated into a
/// Gamma+/Gamma- pair; vertices strictly interior to a fracture surface are
/// duplicated, tip vertices stay shared.
Mesh build_mesh(const RawMesh& raw, const std::set<std::string>& fracture_tags);

} // namespace porocontact
