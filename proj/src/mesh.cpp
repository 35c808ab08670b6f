// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

namespace porocontact {

namespace {

using FaceKey = std::array<Index, 3>;

FaceKey make_key(std::array<Index, 3> f, int dim) {
  if (dim == 2) {
    f[2] = -1;
    if (f[0] > f[1]) std::swap(f[0], f[1]);
  } else {
    std::sort(f.begin(), f.end());
  }
  return f;
}

double simplex_volume(const Mat& pts) {
  const int d = static_cast<int>(pts.rows());
  Mat edges(d, d);
  for (int i = 0; i < d; ++i) edges.col(i) = pts.col(i + 1) - pts.col(0);
  return std::abs(edges.determinant()) / (d == 2 ? 2.0 : 6.0);
}

struct FaceGeometry {
  Vec centroid;
  Vec normal;
  double area;
};

FaceGeometry face_geometry(const Mat& coords, const std::array<Index, 3>& fv, int dim) {
  FaceGeometry g;
  if (dim == 2) {
    Vec a = coords.col(fv[0]), b = coords.col(fv[1]);
    g.centroid = 0.5 * (a + b);
    Vec t = b - a;
    g.area = t.norm();
    g.normal = Vec(2);
    g.normal << t(1), -t(0);
    g.normal /= g.area;
  } else {
    Vec a = coords.col(fv[0]), b = coords.col(fv[1]), c = coords.col(fv[2]);
    g.centroid = (a + b + c) / 3.0;
    Eigen::Vector3d n = (Eigen::Vector3d(b - a)).cross(Eigen::Vector3d(c - a));
    double nn = n.norm();
    g.area = 0.5 * nn;
    g.normal = n / nn;
  }
  return g;
}

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  Index find(Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(Index a, Index b) { parent[find(a)] = find(b); }
};

} // namespace

double Mesh::outward_sign(Index cell, Index face) const {
  Vec d = face_centroids.col(face) - cell_centers.col(cell);
  return d.dot(face_normals.col(face)) > 0 ? 1.0 : -1.0;
}

Vec Mesh::outward_normal(Index cell, Index face) const {
  return outward_sign(cell, face) * face_normals.col(face);
}

int Mesh::group_id(const std::string& name) const {
  for (size_t i = 0; i < group_names.size(); ++i)
    if (group_names[i] == name) return static_cast<int>(i);
  return -1;
}

void Mesh::validate(double domain_volume) const {
  for (Index f = 0; f < n_faces(); ++f) {
    const bool split = face_kind[f] == FaceKind::FracturePositive ||
                       face_kind[f] == FaceKind::FractureNegative;
    const bool boundary = face_kind[f] == FaceKind::Boundary;
    const Index n_nb = (face_cells[f][1] >= 0) ? 2 : 1;
    if ((split || boundary) && n_nb != 1)
      throw TopologyError("face " + std::to_string(f) + ": boundary/fracture face with two neighbors");
    if (face_kind[f] == FaceKind::Interior && n_nb != 2)
      throw TopologyError("face " + std::to_string(f) + ": interior face without two neighbors");
    if (!(face_areas(f) > 0)) throw GeometryError("face " + std::to_string(f) + " has zero area");
  }
  for (Index c = 0; c < n_cells(); ++c)
    if (!(cell_volumes(c) > 0)) throw GeometryError("cell " + std::to_string(c) + " has zero volume");
  if (domain_volume >= 0) {
    const double total = cell_volumes.sum();
    if (std::abs(total - domain_volume) > 1e-10 * std::max(1.0, domain_volume))
      throw GeometryError("cell volumes sum to " + std::to_string(total) +
                          ", expected " + std::to_string(domain_volume));
  }
}

Mesh build_mesh(const RawMesh& raw, const std::set<std::string>& fracture_tags) {
  const int dim = raw.dim;
  if (dim != 2 && dim != 3) throw ValidationError("mesh dimension must be 2 or 3");
  if (raw.cells.rows() != dim + 1)
    throw ValidationError("unsupported element: expected simplices with " +
                          std::to_string(dim + 1) + " vertices");

  Mesh mesh;
  mesh.dim = dim;
  mesh.vertex_coords = raw.nodes;
  mesh.cell_vertices = raw.cells;

  const Index nc = mesh.n_cells();

  // Cell geometry.
  mesh.cell_centers.resize(dim, nc);
  mesh.cell_volumes.resize(nc);
  for (Index c = 0; c < nc; ++c) {
    Mat pts(dim, dim + 1);
    for (int i = 0; i <= dim; ++i) pts.col(i) = raw.nodes.col(raw.cells(i, c));
    mesh.cell_centers.col(c) = pts.rowwise().mean();
    mesh.cell_volumes(c) = simplex_volume(pts);
    if (!(mesh.cell_volumes(c) > 0))
      throw GeometryError("degenerate cell " + std::to_string(c));
  }

  // Enumerate faces as the facets of the cells.
  std::map<FaceKey, Index> face_ids;
  for (Index c = 0; c < nc; ++c) {
    for (int omit = 0; omit <= dim; ++omit) {
      std::array<Index, 3> fv{-1, -1, -1};
      int k = 0;
      for (int i = 0; i <= dim; ++i)
        if (i != omit) fv[k++] = raw.cells(i, c);
      const FaceKey key = make_key(fv, dim);
      auto it = face_ids.find(key);
      if (it == face_ids.end()) {
        const Index f = static_cast<Index>(mesh.face_vertices.size());
        face_ids.emplace(key, f);
        mesh.face_vertices.push_back(fv);
        mesh.face_cells.push_back({c, -1});
      } else {
        auto& nb = mesh.face_cells[it->second];
        if (nb[1] >= 0)
          throw TopologyError("face shared by more than two cells (vertices " +
                              std::to_string(key[0]) + "," + std::to_string(key[1]) + ")");
        nb[1] = c;
      }
    }
  }

  Index nf = mesh.n_faces();
  mesh.face_centroids.resize(dim, nf);
  mesh.face_normals.resize(dim, nf);
  mesh.face_areas.resize(nf);
  for (Index f = 0; f < nf; ++f) {
    FaceGeometry g = face_geometry(mesh.vertex_coords, mesh.face_vertices[f], dim);
    mesh.face_centroids.col(f) = g.centroid;
    mesh.face_normals.col(f) = g.normal;
    mesh.face_areas(f) = g.area;
  }

  mesh.face_kind.assign(nf, FaceKind::Interior);
  mesh.face_group.assign(nf, -1);
  mesh.face_fracture.assign(nf, -1);
  mesh.fracture_partner.assign(nf, -1);
  for (Index f = 0; f < nf; ++f)
    if (mesh.face_cells[f][1] < 0) mesh.face_kind[f] = FaceKind::Boundary;

  // Tag groups. Fracture groups are collected for splitting below.
  std::vector<std::vector<Index>> fracture_faces; // per fracture, original face ids
  for (const auto& group : raw.face_groups) {
    const bool is_fracture = fracture_tags.count(group.name) > 0;
    int gid = static_cast<int>(mesh.group_names.size());
    mesh.group_names.push_back(group.name);
    std::vector<Index> members;
    for (const auto& tuple : group.faces) {
      auto it = face_ids.find(make_key(tuple, dim));
      if (it == face_ids.end())
        throw TopologyError("group '" + group.name + "' references a non-existent face");
      const Index f = it->second;
      if (is_fracture && mesh.face_cells[f][1] < 0)
        throw TopologyError("fracture '" + group.name + "' includes boundary face " +
                            std::to_string(f) + "; not a conforming internal surface");
      if (!is_fracture && mesh.face_cells[f][1] >= 0)
        throw ValidationError("boundary group '" + group.name + "' tags interior face " +
                              std::to_string(f));
      if (mesh.face_group[f] >= 0)
        throw ValidationError("face " + std::to_string(f) + " tagged twice");
      mesh.face_group[f] = gid;
      members.push_back(f);
    }
    if (is_fracture) {
      mesh.fracture_names.push_back(group.name);
      fracture_faces.push_back(std::move(members));
    }
  }
  for (const auto& tag : fracture_tags) {
    bool found = false;
    for (const auto& g : raw.face_groups) found = found || g.name == tag;
    if (!found) throw ValidationError("fracture tag '" + tag + "' not present in the mesh");
  }

  // Intersecting fracture networks are out of scope: no vertex may belong
  // to two fracture groups.
  {
    std::map<Index, int> owner;
    for (int frac = 0; frac < static_cast<int>(fracture_faces.size()); ++frac)
      for (Index f : fracture_faces[frac])
        for (int k = 0; k < dim; ++k) {
          const Index v = mesh.face_vertices[f][k];
          auto [it, inserted] = owner.emplace(v, frac);
          if (!inserted && it->second != frac)
            throw TopologyError("vertex " + std::to_string(v) +
                                " shared by fractures '" + mesh.fracture_names[it->second] +
                                "' and '" + mesh.fracture_names[frac] + "'");
        }
  }

  // Orient each fracture surface coherently, then split its faces.
  {
    Index total_split = 0;
    for (const auto& members : fracture_faces) total_split += members.size();
    mesh.face_centroids.conservativeResize(dim, nf + total_split);
    mesh.face_normals.conservativeResize(dim, nf + total_split);
    mesh.face_areas.conservativeResize(nf + total_split);
  }
  for (int frac = 0; frac < static_cast<int>(fracture_faces.size()); ++frac) {
    const auto& members = fracture_faces[frac];
    if (members.empty())
      throw TopologyError("fracture '" + mesh.fracture_names[frac] + "' has no faces");

    // Adjacency: 2d via shared vertices, 3d via shared edges.
    std::map<FaceKey, std::vector<int>> link; // shared sub-entity -> local face ids
    for (int li = 0; li < static_cast<int>(members.size()); ++li) {
      const auto& fv = mesh.face_vertices[members[li]];
      if (dim == 2) {
        link[{fv[0], -1, -1}].push_back(li);
        link[{fv[1], -1, -1}].push_back(li);
      } else {
        for (int e = 0; e < 3; ++e) {
          std::array<Index, 3> edge{fv[e], fv[(e + 1) % 3], -1};
          if (edge[0] > edge[1]) std::swap(edge[0], edge[1]);
          link[edge].push_back(li);
        }
      }
    }
    for (const auto& [key, faces] : link)
      if (faces.size() > 2)
        throw TopologyError("fracture '" + mesh.fracture_names[frac] +
                            "' is non-manifold (three faces meet)");

    // BFS orientation. `order` holds the (possibly swapped) vertex tuple of
    // each member so the induced normals agree across the surface.
    std::vector<std::array<Index, 3>> order(members.size());
    std::vector<char> oriented(members.size(), 0);
    for (int seed = 0; seed < static_cast<int>(members.size()); ++seed) {
      if (oriented[seed]) continue;
      order[seed] = mesh.face_vertices[members[seed]];
      oriented[seed] = 1;
      std::queue<int> work;
      work.push(seed);
      while (!work.empty()) {
        const int li = work.front();
        work.pop();
        const auto& fv = order[li];
        auto visit = [&](const FaceKey& key, auto consistent) {
          for (int lj : link[key]) {
            if (lj == li) continue;
            std::array<Index, 3> cand = mesh.face_vertices[members[lj]];
            if (!oriented[lj]) {
              if (!consistent(cand)) {
                if (dim == 2) std::swap(cand[0], cand[1]);
                else std::swap(cand[1], cand[2]);
              }
              if (!consistent(cand))
                throw TopologyError("fracture '" + mesh.fracture_names[frac] +
                                    "' cannot be oriented");
              order[lj] = cand;
              oriented[lj] = 1;
              work.push(lj);
            }
          }
        };
        if (dim == 2) {
          for (int end = 0; end < 2; ++end) {
            const Index v = fv[end];
            visit({v, -1, -1}, [&](const std::array<Index, 3>& c) {
              // Directed edges must flow through the shared vertex.
              return (fv[1] == v && c[0] == v) || (fv[0] == v && c[1] == v);
            });
          }
        } else {
          for (int e = 0; e < 3; ++e) {
            const Index p = fv[e], q = fv[(e + 1) % 3];
            std::array<Index, 3> key{std::min(p, q), std::max(p, q), -1};
            visit(key, [&](const std::array<Index, 3>& c) {
              // The shared edge must be traversed in opposite directions.
              for (int k = 0; k < 3; ++k)
                if (c[k] == q && c[(k + 1) % 3] == p) return true;
              return false;
            });
          }
        }
      }
    }

    // Split each member face into a positive and a negative copy.
    for (int li = 0; li < static_cast<int>(members.size()); ++li) {
      const Index f = members[li];
      FaceGeometry g = face_geometry(mesh.vertex_coords, order[li], dim);
      const Vec nu = g.normal; // coherent surface orientation
      const Index k0 = mesh.face_cells[f][0], k1 = mesh.face_cells[f][1];
      const double s0 = (mesh.cell_centers.col(k0) - g.centroid).dot(nu);
      const double s1 = (mesh.cell_centers.col(k1) - g.centroid).dot(nu);
      if (s0 * s1 >= 0)
        throw TopologyError("fracture '" + mesh.fracture_names[frac] +
                            "': cells do not straddle face " + std::to_string(f));
      const Index pos = s0 > 0 ? k0 : k1;
      const Index neg = s0 > 0 ? k1 : k0;

      const Index fneg = static_cast<Index>(mesh.face_vertices.size());
      mesh.face_vertices.push_back(mesh.face_vertices[f]);
      mesh.face_cells.push_back({neg, -1});
      mesh.face_cells[f] = {pos, -1};

      mesh.face_kind[f] = FaceKind::FracturePositive;
      mesh.face_kind.push_back(FaceKind::FractureNegative);
      mesh.face_group.push_back(mesh.face_group[f]);
      mesh.face_fracture[f] = frac;
      mesh.face_fracture.push_back(frac);
      mesh.fracture_partner[f] = fneg;
      mesh.fracture_partner.push_back(f);

      // Contact normal n = n+ points out of the positive cell.
      mesh.face_centroids.col(fneg) = g.centroid;
      mesh.face_areas(fneg) = g.area;
      mesh.face_normals.col(f) = -nu;
      mesh.face_normals.col(fneg) = nu;
    }
  }
  nf = mesh.n_faces();

  // Duplicate vertices strictly interior to a fracture surface. Tip (rim)
  // vertices stay shared; there the cell fan either wraps around the tip or
  // decouples block-diagonally in the local systems.
  if (!fracture_faces.empty()) {
    std::vector<std::vector<Index>> vertex_faces(mesh.n_vertices());
    for (Index f = 0; f < nf; ++f)
      for (int k = 0; k < dim; ++k) vertex_faces[mesh.face_vertices[f][k]].push_back(f);

    for (int frac = 0; frac < static_cast<int>(fracture_faces.size()); ++frac) {
      // Positive copies carry the fracture topology of this group.
      std::vector<Index> pos_faces;
      for (Index f = 0; f < nf; ++f)
        if (mesh.face_fracture[f] == frac && mesh.face_kind[f] == FaceKind::FracturePositive)
          pos_faces.push_back(f);

      std::map<Index, int> frac_face_count; // vertex -> adjacent fracture faces
      std::map<FaceKey, int> edge_count;    // 3d rim detection
      for (Index f : pos_faces) {
        const auto& fv = mesh.face_vertices[f];
        for (int k = 0; k < dim; ++k) frac_face_count[fv[k]]++;
        if (dim == 3) {
          for (int e = 0; e < 3; ++e) {
            std::array<Index, 3> edge{fv[e], fv[(e + 1) % 3], -1};
            if (edge[0] > edge[1]) std::swap(edge[0], edge[1]);
            edge_count[edge]++;
          }
        }
      }
      std::set<Index> rim_vertices;
      if (dim == 3) {
        for (const auto& [edge, count] : edge_count)
          if (count == 1) {
            rim_vertices.insert(edge[0]);
            rim_vertices.insert(edge[1]);
          }
      }

      for (const auto& [v, count] : frac_face_count) {
        bool interior;
        if (dim == 2) {
          if (count > 2)
            throw TopologyError("fracture '" + mesh.fracture_names[frac] +
                                "' has a non-manifold vertex");
          interior = count == 2;
        } else {
          interior = rim_vertices.count(v) == 0;
        }
        if (!interior) continue;

        // Cells around v split into two components when fracture copies are
        // removed from the fan.
        std::vector<Index> cells_at_v;
        for (Index c = 0; c < nc; ++c)
          for (int k = 0; k <= dim; ++k)
            if (mesh.cell_vertices(k, c) == v) {
              cells_at_v.push_back(c);
              break;
            }
        std::map<Index, Index> local; // cell -> local id
        for (Index i = 0; i < static_cast<Index>(cells_at_v.size()); ++i)
          local[cells_at_v[i]] = i;
        DisjointSets sets(static_cast<Index>(cells_at_v.size()));
        for (Index f : vertex_faces[v]) {
          if (mesh.face_fracture[f] >= 0) continue;
          const Index a = mesh.face_cells[f][0], b = mesh.face_cells[f][1];
          if (a >= 0 && b >= 0 && local.count(a) && local.count(b))
            sets.unite(local[a], local[b]);
        }
        Index pos_root = -1, neg_root = -1;
        for (Index f : vertex_faces[v]) {
          if (mesh.face_fracture[f] != frac) continue;
          const Index cell = mesh.face_cells[f][0];
          if (!local.count(cell)) continue;
          const Index root = sets.find(local[cell]);
          if (mesh.face_kind[f] == FaceKind::FracturePositive) {
            if (pos_root >= 0 && pos_root != root)
              throw TopologyError("inconsistent positive side at fracture vertex " +
                                  std::to_string(v));
            pos_root = root;
          } else {
            if (neg_root >= 0 && neg_root != root)
              throw TopologyError("inconsistent negative side at fracture vertex " +
                                  std::to_string(v));
            neg_root = root;
          }
        }
        if (pos_root < 0 || neg_root < 0 || pos_root == neg_root)
          throw TopologyError("fracture vertex " + std::to_string(v) +
                              " does not separate the cell fan");

        const Index vnew = mesh.vertex_coords.cols();
        mesh.vertex_coords.conservativeResize(dim, vnew + 1);
        mesh.vertex_coords.col(vnew) = mesh.vertex_coords.col(v);
        vertex_faces.push_back({});

        auto on_negative = [&](Index cell) {
          auto it = local.find(cell);
          return it != local.end() && sets.find(it->second) == neg_root;
        };
        for (Index c : cells_at_v)
          if (on_negative(c))
            for (int k = 0; k <= dim; ++k)
              if (mesh.cell_vertices(k, c) == v) mesh.cell_vertices(k, c) = vnew;
        std::vector<Index> keep;
        for (Index f : vertex_faces[v]) {
          const Index owner = mesh.face_cells[f][0];
          if (on_negative(owner)) {
            for (int k = 0; k < dim; ++k)
              if (mesh.face_vertices[f][k] == v) mesh.face_vertices[f][k] = vnew;
            vertex_faces[vnew].push_back(f);
          } else {
            keep.push_back(f);
          }
        }
        vertex_faces[v] = keep;
      }
    }
  }

  // Final adjacency.
  const Index nv = mesh.n_vertices();
  mesh.cell_faces.assign(nc, {});
  mesh.vertex_cells.assign(nv, {});
  mesh.vertex_faces.assign(nv, {});
  for (Index f = 0; f < nf; ++f) {
    for (int s = 0; s < 2; ++s) {
      const Index c = mesh.face_cells[f][s];
      if (c >= 0) mesh.cell_faces[c].push_back(f);
    }
    for (int k = 0; k < dim; ++k) mesh.vertex_faces[mesh.face_vertices[f][k]].push_back(f);
  }
  for (Index c = 0; c < nc; ++c)
    for (int k = 0; k <= dim; ++k) mesh.vertex_cells[mesh.cell_vertices(k, c)].push_back(c);

  mesh.validate();
  return mesh;
}

} // namespace porocontact
