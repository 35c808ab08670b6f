// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/subgrid.hpp"

#include <cmath>
#include <limits>

namespace porocontact {

SubGrid build_subgrid(const Mesh& mesh) {
  const int dim = mesh.dim;
  SubGrid sub;
  sub.dim = dim;

  const Index nsf = mesh.n_faces() * dim;
  sub.subface_area.resize(nsf);
  sub.subface_point.resize(dim, nsf);
  sub.subface_set.assign(nsf, static_cast<char>(SubfaceSet::Remaining));

  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const Vec xf = mesh.face_centroids.col(f);
    for (int k = 0; k < dim; ++k) {
      const Index s = sub.subface_id(f, k);
      const Vec v = mesh.vertex_coords.col(mesh.face_vertices[f][k]);
      sub.subface_area(s) = mesh.face_areas(f) / dim;
      sub.subface_point.col(s) = xf - (xf - v) / 3.0;
      if ((sub.subface_point.col(s) - v).norm() <= 0)
        throw GeometryError("degenerate subface on face " + std::to_string(f));
      if (!(sub.subface_area(s) > 0))
        throw GeometryError("zero-measure subface on face " + std::to_string(f));
      switch (mesh.face_kind[f]) {
        case FaceKind::FracturePositive:
          sub.subface_set[s] = static_cast<char>(SubfaceSet::Positive);
          sub.positive_subfaces.push_back(s);
          break;
        case FaceKind::FractureNegative:
          sub.subface_set[s] = static_cast<char>(SubfaceSet::Negative);
          sub.negative_subfaces.push_back(s);
          break;
        default:
          break;
      }
    }
  }

  sub.subcell_volume.resize(mesh.n_cells() * (dim + 1));
  for (Index c = 0; c < mesh.n_cells(); ++c)
    for (int k = 0; k <= dim; ++k)
      sub.subcell_volume(sub.subcell_id(c, k)) = mesh.cell_volumes(c) / (dim + 1);

  return sub;
}

Index subface_vertex(const Mesh& mesh, const SubGrid& sub, Index subface) {
  return mesh.face_vertices[sub.face_of(subface)][sub.corner_of(subface)];
}

FracturePairing pair_fracture_sides(const Mesh& mesh, const SubGrid& sub,
                                    const std::optional<GapField>& gap_field) {
  const int dim = mesh.dim;
  FracturePairing pairing;
  pairing.positive = sub.positive_subfaces;
  const Index np = pairing.n_pairs();
  pairing.negative_partner.assign(np, -1);
  pairing.rank_of_subface.assign(sub.n_subfaces(), -1);
  pairing.gap.resize(np);
  pairing.contact_normal.resize(dim, np);
  pairing.fracture.resize(np);

  std::vector<char> taken(sub.n_subfaces(), 0);
  for (Index r = 0; r < np; ++r) {
    const Index p = pairing.positive[r];
    const Index fpos = sub.face_of(p);
    const Index fneg = mesh.fracture_partner[fpos];
    if (fneg < 0)
      throw TopologyError("positive fracture face " + std::to_string(fpos) + " has no partner");

    const Vec n = mesh.face_normals.col(fpos);
    const Vec xp = sub.subface_point.col(p);

    // Face diameter sets the matching tolerance.
    double diameter = 0;
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b)
        diameter = std::max(diameter, (mesh.vertex_coords.col(mesh.face_vertices[fpos][a]) -
                                       mesh.vertex_coords.col(mesh.face_vertices[fpos][b]))
                                          .norm());
    const double tol = 1e-8 * diameter;

    Index best = -1;
    double best_dist = std::numeric_limits<double>::max();
    double second_dist = std::numeric_limits<double>::max();
    for (int k = 0; k < dim; ++k) {
      const Index q = sub.subface_id(fneg, k);
      const Vec d = xp - sub.subface_point.col(q);
      const double in_plane = (d - d.dot(n) * n).norm();
      if (in_plane < best_dist) {
        second_dist = best_dist;
        best_dist = in_plane;
        best = q;
      } else if (in_plane < second_dist) {
        second_dist = in_plane;
      }
    }
    if (best < 0 || best_dist > tol)
      throw TopologyError("unpaired positive subface " + std::to_string(p));
    if (second_dist <= tol)
      throw TopologyError("ambiguous pairing for positive subface " + std::to_string(p));
    if (taken[best])
      throw TopologyError("negative subface " + std::to_string(best) + " paired twice");
    taken[best] = 1;

    pairing.negative_partner[r] = best;
    pairing.rank_of_subface[p] = r;
    pairing.rank_of_subface[best] = r;
    pairing.contact_normal.col(r) = n;
    pairing.fracture[r] = mesh.face_fracture[fpos];
    const double geometric = (xp - sub.subface_point.col(best)).norm();
    const double g = gap_field ? (*gap_field)(xp) : geometric;
    if (g < 0) throw ValidationError("negative gap at positive subface " + std::to_string(p));
    pairing.gap(r) = g;
  }

  if (sub.negative_subfaces.size() != pairing.positive.size())
    throw TopologyError("positive/negative subface counts differ");

  return pairing;
}

} // namespace porocontact
