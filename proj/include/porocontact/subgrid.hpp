// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>

#include "porocontact/mesh.hpp"

namespace porocontact {

enum class SubfaceSet : char { Remaining, Positive, Negative };

/// Subcell/subface geometry on top of a Mesh. Subfaces are enumerated
/// face-major (face f owns subfaces [f*dim, (f+1)*dim)); subcells cell-major
/// (cell c owns subcells [c*(dim+1), (c+1)*(dim+1))).
struct SubGrid {
  int dim = 2;

  Vec subface_area;   // n_subfaces
  Mat subface_point;  // continuity points, dim x n_subfaces
  Vec subcell_volume; // n_subcells

  std::vector<char> subface_set;        // SubfaceSet per subface
  std::vector<Index> positive_subfaces; // members of P, ascending
  std::vector<Index> negative_subfaces; // members of N, ascending

  Index n_subfaces() const { return subface_area.size(); }
  Index n_subcells() const { return subcell_volume.size(); }

  Index subface_id(Index face, int corner) const { return face * dim + corner; }
  Index face_of(Index subface) const { return subface / dim; }
  int corner_of(Index subface) const { return static_cast<int>(subface % dim); }

  Index subcell_id(Index cell, int corner) const { return cell * (dim + 1) + corner; }
  Index cell_of_subcell(Index subcell) const { return subcell / (dim + 1); }
};

/// Splits every face into `dim` subfaces of equal measure (2d: at the
/// centroid, 3d: edge midpoints plus centroid) and every cell into dim+1
/// subcells of equal volume. Continuity points sit one third of the way from
/// the face centroid towards the vertex.
SubGrid build_subgrid(const Mesh& mesh);

/// Vertex of the mesh a subface is attached to.
Index subface_vertex(const Mesh& mesh, const SubGrid& sub, Index subface);

/// The bijection R between positive and negative fracture subfaces, with
/// per-subface gaps and contact normals (the positive side's outward normal).
struct FracturePairing {
  std::vector<Index> positive;          // = SubGrid::positive_subfaces
  std::vector<Index> negative_partner;  // R(p), aligned with `positive`
  std::vector<Index> rank_of_subface;   // subface -> index into `positive`;
                                        // for N subfaces the rank of R^{-1}; -1 otherwise
  Vec gap;                              // per positive subface, >= 0
  Mat contact_normal;                   // dim x |P|
  std::vector<int> fracture;            // fracture index per positive subface

  Index n_pairs() const { return static_cast<Index>(positive.size()); }
};

using GapField = std::function<double(const Vec&)>;

/// Pairs each positive subface with the negative subface of its partner face
/// whose continuity point is nearest in the fracture plane. The gap is taken
/// from `gap_field` when supplied, otherwise from the geometric separation.
FracturePairing pair_fracture_sides(const Mesh& mesh, const SubGrid& sub,
                                    const std::optional<GapField>& gap_field = std::nullopt);

} // namespace porocontact
