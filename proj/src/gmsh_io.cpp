// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/gmsh_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace porocontact {

namespace {

std::string next_line(std::istream& in, const std::string& label) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(label + ": unexpected end of file");
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  return line;
}

} // namespace

RawMesh read_msh(std::istream& in, const std::string& label) {
  std::map<int, std::string> physical_names;
  std::vector<Eigen::Vector3d> nodes;
  std::map<Index, Index> node_id; // file id -> dense id

  struct Element {
    int type;
    int physical;
    std::array<Index, 4> nodes;
  };
  std::vector<Element> elements;

  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line == "$MeshFormat") {
      std::istringstream fmt(next_line(in, label));
      double version = 0;
      fmt >> version;
      if (version < 2.0 || version >= 3.0)
        throw IoError(label + ": unsupported mesh format version " + std::to_string(version));
      if (next_line(in, label) != "$EndMeshFormat") throw IoError(label + ": bad $MeshFormat");
    } else if (line == "$PhysicalNames") {
      const int n = std::stoi(next_line(in, label));
      for (int i = 0; i < n; ++i) {
        std::istringstream row(next_line(in, label));
        int d = 0, id = 0;
        std::string name;
        row >> d >> id;
        std::getline(row, name);
        const auto first = name.find('"');
        const auto last = name.rfind('"');
        if (first == std::string::npos || last <= first)
          throw IoError(label + ": malformed physical name");
        physical_names[id] = name.substr(first + 1, last - first - 1);
      }
      if (next_line(in, label) != "$EndPhysicalNames") throw IoError(label + ": bad $PhysicalNames");
    } else if (line == "$Nodes") {
      const Index n = std::stoll(next_line(in, label));
      for (Index i = 0; i < n; ++i) {
        std::istringstream row(next_line(in, label));
        Index id;
        double x, y, z;
        if (!(row >> id >> x >> y >> z)) throw IoError(label + ": malformed node line");
        node_id[id] = static_cast<Index>(nodes.size());
        nodes.emplace_back(x, y, z);
      }
      if (next_line(in, label) != "$EndNodes") throw IoError(label + ": bad $Nodes");
    } else if (line == "$Elements") {
      const Index n = std::stoll(next_line(in, label));
      for (Index i = 0; i < n; ++i) {
        std::istringstream row(next_line(in, label));
        Index id;
        int type = 0, ntags = 0;
        if (!(row >> id >> type >> ntags)) throw IoError(label + ": malformed element line");
        Element e;
        e.type = type;
        e.physical = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag;
          row >> tag;
          if (t == 0) e.physical = tag;
        }
        int nn = 0;
        switch (type) {
          case 1: nn = 2; break;  // line
          case 2: nn = 3; break;  // triangle
          case 4: nn = 4; break;  // tetrahedron
          case 15: nn = 1; break; // point, ignored
          default:
            throw IoError(label + ": unsupported element type " + std::to_string(type));
        }
        e.nodes = {-1, -1, -1, -1};
        for (int k = 0; k < nn; ++k) {
          Index v;
          if (!(row >> v)) throw IoError(label + ": truncated element line");
          auto it = node_id.find(v);
          if (it == node_id.end()) throw IoError(label + ": element references unknown node");
          e.nodes[k] = it->second;
        }
        if (type != 15) elements.push_back(e);
      }
      if (next_line(in, label) != "$EndElements") throw IoError(label + ": bad $Elements");
    }
    // Unknown sections are skipped implicitly.
  }

  bool has_tet = false, has_tri = false;
  for (const auto& e : elements) {
    has_tet = has_tet || e.type == 4;
    has_tri = has_tri || e.type == 2;
  }
  if (!has_tet && !has_tri) throw IoError(label + ": no simplex cells found");

  RawMesh raw;
  raw.dim = has_tet ? 3 : 2;
  raw.nodes.resize(raw.dim, static_cast<Index>(nodes.size()));
  for (Index i = 0; i < raw.nodes.cols(); ++i)
    raw.nodes.col(i) = nodes[i].head(raw.dim);

  const int cell_type = has_tet ? 4 : 2;
  const int face_type = has_tet ? 2 : 1;
  Index n_cells = 0;
  for (const auto& e : elements) n_cells += e.type == cell_type;
  raw.cells.resize(raw.dim + 1, n_cells);
  Index c = 0;
  std::map<int, RawMesh::FaceGroup> groups; // by physical id, ascending
  for (const auto& e : elements) {
    if (e.type == cell_type) {
      for (int k = 0; k <= raw.dim; ++k) raw.cells(k, c) = e.nodes[k];
      ++c;
    } else if (e.type == face_type && e.physical != 0) {
      auto& group = groups[e.physical];
      if (group.name.empty()) {
        auto it = physical_names.find(e.physical);
        group.name = it != physical_names.end() ? it->second
                                                : "physical_" + std::to_string(e.physical);
      }
      group.faces.push_back({e.nodes[0], e.nodes[1], raw.dim == 3 ? e.nodes[2] : -1});
    }
  }
  for (auto& [id, group] : groups) raw.face_groups.push_back(std::move(group));
  return raw;
}

RawMesh read_msh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  return read_msh(in, path);
}

void write_msh(const RawMesh& raw, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw IoError("cannot write mesh file '" + path + "'");
  std::fprintf(out, "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
  if (!raw.face_groups.empty()) {
    std::fprintf(out, "$PhysicalNames\n%zu\n", raw.face_groups.size());
    for (size_t g = 0; g < raw.face_groups.size(); ++g)
      std::fprintf(out, "%d %zu \"%s\"\n", raw.dim - 1, g + 1, raw.face_groups[g].name.c_str());
    std::fprintf(out, "$EndPhysicalNames\n");
  }
  std::fprintf(out, "$Nodes\n%" PRId64 "\n", static_cast<std::int64_t>(raw.nodes.cols()));
  for (Index i = 0; i < raw.nodes.cols(); ++i) {
    const double z = raw.dim == 3 ? raw.nodes(2, i) : 0.0;
    std::fprintf(out, "%" PRId64 " %.17g %.17g %.17g\n", static_cast<std::int64_t>(i + 1),
                 raw.nodes(0, i), raw.nodes(1, i), z);
  }
  std::fprintf(out, "$EndNodes\n$Elements\n");
  Index n_face_elems = 0;
  for (const auto& g : raw.face_groups) n_face_elems += static_cast<Index>(g.faces.size());
  std::fprintf(out, "%" PRId64 "\n", static_cast<std::int64_t>(n_face_elems + raw.cells.cols()));
  Index id = 1;
  const int face_type = raw.dim == 3 ? 2 : 1;
  for (size_t g = 0; g < raw.face_groups.size(); ++g)
    for (const auto& fv : raw.face_groups[g].faces) {
      std::fprintf(out, "%" PRId64 " %d 2 %zu %zu", static_cast<std::int64_t>(id++), face_type,
                   g + 1, g + 1);
      for (int k = 0; k < raw.dim; ++k)
        std::fprintf(out, " %" PRId64, static_cast<std::int64_t>(fv[k] + 1));
      std::fprintf(out, "\n");
    }
  const int cell_type = raw.dim == 3 ? 4 : 2;
  for (Index c = 0; c < raw.cells.cols(); ++c) {
    std::fprintf(out, "%" PRId64 " %d 2 0 0", static_cast<std::int64_t>(id++), cell_type);
    for (int k = 0; k <= raw.dim; ++k)
      std::fprintf(out, " %" PRId64, static_cast<std::int64_t>(raw.cells(k, c) + 1));
    std::fprintf(out, "\n");
  }
  std::fprintf(out, "$EndElements\n");
  std::fclose(out);
}

} // namespace porocontact
