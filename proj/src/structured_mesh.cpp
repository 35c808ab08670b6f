// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/structured_mesh.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace porocontact {

double StructuredMeshSpec::volume() const {
  return (hi - lo).prod();
}

StructuredMeshSpec StructuredMeshSpec::refined(int factor) const {
  StructuredMeshSpec fine = *this;
  for (int k = 0; k < dim; ++k) fine.divisions[k] *= factor;
  return fine;
}

std::set<std::string> fracture_tag_set(const StructuredMeshSpec& spec) {
  std::set<std::string> tags;
  for (const auto& f : spec.fractures) tags.insert(f.name);
  return tags;
}

namespace {

using VKey = std::array<Index, 3>;

VKey face_key(std::array<Index, 3> f, int dim) {
  if (dim == 2) {
    f[2] = -1;
    if (f[0] > f[1]) std::swap(f[0], f[1]);
  } else {
    std::sort(f.begin(), f.end());
  }
  return f;
}

// All facets of the cells, each once, in deterministic order.
std::vector<std::array<Index, 3>> collect_faces(const Eigen::MatrixX<Index>& cells, int dim) {
  std::map<VKey, std::array<Index, 3>> faces;
  for (Index c = 0; c < cells.cols(); ++c)
    for (int omit = 0; omit <= dim; ++omit) {
      std::array<Index, 3> fv{-1, -1, -1};
      int k = 0;
      for (int i = 0; i <= dim; ++i)
        if (i != omit) fv[k++] = cells(i, c);
      faces.emplace(face_key(fv, dim), fv);
    }
  std::vector<std::array<Index, 3>> out;
  out.reserve(faces.size());
  for (const auto& [key, fv] : faces) out.push_back(fv);
  return out;
}

double point_segment_distance(const Vec& x, const Vec& a, const Vec& b, double* param) {
  const Vec d = b - a;
  const double t = d.dot(x - a) / d.squaredNorm();
  *param = t;
  const double tc = std::clamp(t, 0.0, 1.0);
  return (x - (a + tc * d)).norm();
}

} // namespace

RawMesh generate_structured_mesh(const StructuredMeshSpec& spec) {
  const int dim = spec.dim;
  if (dim != 2 && dim != 3) throw ValidationError("structured mesh dimension must be 2 or 3");
  for (int k = 0; k < dim; ++k) {
    if (spec.divisions[k] < 1) throw ValidationError("divisions must be at least 1");
    if (!(spec.hi(k) > spec.lo(k))) throw ValidationError("empty box");
  }

  RawMesh raw;
  raw.dim = dim;

  const int nx = spec.divisions[0];
  const int ny = spec.divisions[1];
  const int nz = dim == 3 ? spec.divisions[2] : 1;
  Vec h(dim);
  for (int k = 0; k < dim; ++k) h(k) = (spec.hi(k) - spec.lo(k)) / spec.divisions[k];
  const double tol = 1e-9 * (spec.hi - spec.lo).maxCoeff();

  std::vector<Vec> nodes;
  Eigen::MatrixX<Index> cells;

  if (dim == 2) {
    auto grid_id = [&](int i, int j) { return static_cast<Index>(j) * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        Vec x(2);
        x << spec.lo(0) + i * h(0), spec.lo(1) + j * h(1);
        nodes.push_back(x);
      }
    const Index center0 = static_cast<Index>(nodes.size());
    auto center_id = [&](int i, int j) { return center0 + static_cast<Index>(j) * nx + i; };
    if (spec.pattern == StructuredMeshSpec::Pattern::Crossed) {
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          Vec x(2);
          x << spec.lo(0) + (i + 0.5) * h(0), spec.lo(1) + (j + 0.5) * h(1);
          nodes.push_back(x);
        }
      cells.resize(3, 4 * static_cast<Index>(nx) * ny);
      Index c = 0;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const Index v00 = grid_id(i, j), v10 = grid_id(i + 1, j);
          const Index v11 = grid_id(i + 1, j + 1), v01 = grid_id(i, j + 1);
          const Index vc = center_id(i, j);
          cells.col(c++) << v00, v10, vc;
          cells.col(c++) << v10, v11, vc;
          cells.col(c++) << v11, v01, vc;
          cells.col(c++) << v01, v00, vc;
        }
    } else {
      cells.resize(3, 2 * static_cast<Index>(nx) * ny);
      Index c = 0;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const Index v00 = grid_id(i, j), v10 = grid_id(i + 1, j);
          const Index v11 = grid_id(i + 1, j + 1), v01 = grid_id(i, j + 1);
          cells.col(c++) << v00, v10, v11;
          cells.col(c++) << v00, v11, v01;
        }
    }
  } else {
    auto grid_id = [&](int i, int j, int k) {
      return (static_cast<Index>(k) * (ny + 1) + j) * (nx + 1) + i;
    };
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
          Vec x(3);
          x << spec.lo(0) + i * h(0), spec.lo(1) + j * h(1), spec.lo(2) + k * h(2);
          nodes.push_back(x);
        }
    // Kuhn subdivision: six path tets per cube, identical in every cube so
    // that faces (including the cube-diagonal ones) match across cubes.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    cells.resize(4, 6 * static_cast<Index>(nx) * ny * nz);
    Index c = 0;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          for (const auto& perm : perms) {
            int ijk[3] = {i, j, k};
            cells(0, c) = grid_id(ijk[0], ijk[1], ijk[2]);
            for (int step = 0; step < 3; ++step) {
              ijk[perm[step]] += 1;
              cells(step + 1, c) = grid_id(ijk[0], ijk[1], ijk[2]);
            }
            ++c;
          }
  }

  raw.nodes.resize(dim, static_cast<Index>(nodes.size()));
  for (Index i = 0; i < raw.nodes.cols(); ++i) raw.nodes.col(i) = nodes[i];
  raw.cells = cells;

  const auto faces = collect_faces(cells, dim);

  auto centroid = [&](const std::array<Index, 3>& fv) {
    Vec x = Vec::Zero(dim);
    for (int k = 0; k < dim; ++k) x += raw.nodes.col(fv[k]);
    return Vec(x / dim);
  };

  // Boundary groups by box side.
  const char* names2d[4] = {"left", "right", "bottom", "top"};
  const char* names3d[6] = {"left", "right", "front", "back", "bottom", "top"};
  const int n_sides = 2 * dim;
  std::vector<RawMesh::FaceGroup> side_groups(n_sides);
  for (int sg = 0; sg < n_sides; ++sg)
    side_groups[sg].name = dim == 2 ? names2d[sg] : names3d[sg];
  for (const auto& fv : faces) {
    for (int axis = 0; axis < dim; ++axis)
      for (int end = 0; end < 2; ++end) {
        const double plane = end == 0 ? spec.lo(axis) : spec.hi(axis);
        bool on = true;
        for (int k = 0; k < dim; ++k) on = on && std::abs(raw.nodes(axis, fv[k]) - plane) < tol;
        if (on) side_groups[2 * axis + end].faces.push_back(fv);
      }
  }

  // Fracture groups.
  std::vector<RawMesh::FaceGroup> frac_groups;
  for (const auto& frac : spec.fractures) {
    RawMesh::FaceGroup group;
    group.name = frac.name;
    double matched_measure = 0;
    if (dim == 2) {
      if (frac.polyline.size() < 2)
        throw ValidationError("fracture '" + frac.name + "' needs a polyline");
      for (const auto& fv : faces) {
        const Vec a = raw.nodes.col(fv[0]), b = raw.nodes.col(fv[1]);
        for (size_t seg = 0; seg + 1 < frac.polyline.size(); ++seg) {
          const Vec &p = frac.polyline[seg], &q = frac.polyline[seg + 1];
          double ta, tb;
          if (point_segment_distance(a, p, q, &ta) < tol &&
              point_segment_distance(b, p, q, &tb) < tol && ta > -1e-12 &&
              ta < 1 + 1e-12 && tb > -1e-12 && tb < 1 + 1e-12) {
            group.faces.push_back(fv);
            matched_measure += (b - a).norm();
            break;
          }
        }
      }
      double expected = 0;
      for (size_t seg = 0; seg + 1 < frac.polyline.size(); ++seg)
        expected += (frac.polyline[seg + 1] - frac.polyline[seg]).norm();
      if (std::abs(matched_measure - expected) > 1e-6 * expected)
        throw TopologyError("fracture '" + frac.name +
                            "' does not conform to the mesh (covered " +
                            std::to_string(matched_measure) + " of " + std::to_string(expected) + ")");
    } else {
      const Vec n = frac.normal.normalized();
      Vec axis_u(3);
      int smallest = 0;
      for (int k = 1; k < 3; ++k)
        if (std::abs(n(k)) < std::abs(n(smallest))) smallest = k;
      axis_u = Vec::Zero(3);
      axis_u(smallest) = 1.0;
      axis_u = (axis_u - axis_u.dot(n) * n).normalized();
      const Vec axis_v = Eigen::Vector3d(n).cross(Eigen::Vector3d(axis_u));
      for (const auto& fv : faces) {
        bool on = true;
        for (int k = 0; k < 3; ++k)
          on = on && std::abs((raw.nodes.col(fv[k]) - frac.point).dot(n)) < tol;
        if (!on) continue;
        const Vec d = centroid(fv) - frac.point;
        if (std::abs(d.dot(axis_u)) <= frac.half_u && std::abs(d.dot(axis_v)) <= frac.half_v)
          group.faces.push_back(fv);
      }
      if (group.faces.empty())
        throw TopologyError("fracture '" + frac.name + "' matches no mesh faces");
    }
    frac_groups.push_back(std::move(group));
  }

  for (auto& g : side_groups)
    if (!g.faces.empty()) raw.face_groups.push_back(std::move(g));
  for (auto& g : frac_groups) raw.face_groups.push_back(std::move(g));

  // Jitter interior vertices, keeping boundary and fracture geometry exact.
  if (spec.jitter > 0) {
    std::vector<char> frozen(nodes.size(), 0);
    for (const auto& fv : faces)
      for (int k = 0; k < dim; ++k) {
        const Index v = fv[k];
        for (int axis = 0; axis < dim; ++axis)
          if (std::abs(raw.nodes(axis, v) - spec.lo(axis)) < tol ||
              std::abs(raw.nodes(axis, v) - spec.hi(axis)) < tol)
            frozen[v] = 1;
      }
    for (const auto& g : frac_groups)
      for (const auto& fv : g.faces)
        for (int k = 0; k < dim; ++k) frozen[fv[k]] = 1;
    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> u(-spec.jitter, spec.jitter);
    for (Index v = 0; v < raw.nodes.cols(); ++v) {
      if (frozen[v]) continue;
      for (int axis = 0; axis < dim; ++axis) raw.nodes(axis, v) += u(rng) * h(axis);
    }
  }

  return raw;
}

} // namespace porocontact
