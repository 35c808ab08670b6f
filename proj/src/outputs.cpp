// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/outputs.hpp"

#include <cinttypes>
#include <cstdio>

#include "porocontact/scenario.hpp"

namespace porocontact {

namespace {

struct File {
  std::FILE* f;
  explicit File(const std::string& path) : f(std::fopen(path.c_str(), "w")) {
    if (!f) throw IoError("cannot write '" + path + "'");
  }
  ~File() {
    if (f) std::fclose(f);
  }
};

} // namespace

void write_vtk_cells(const std::string& path, const Mesh& mesh, const Vec& u, const Vec& p) {
  File out(path);
  const int dim = mesh.dim;
  std::fprintf(out.f, "# vtk DataFile Version 2.0\nporocontact cell fields\nASCII\n");
  std::fprintf(out.f, "DATASET UNSTRUCTURED_GRID\n");
  std::fprintf(out.f, "POINTS %" PRId64 " double\n", static_cast<std::int64_t>(mesh.n_vertices()));
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    const double z = dim == 3 ? mesh.vertex_coords(2, v) : 0.0;
    std::fprintf(out.f, "%.17g %.17g %.17g\n", mesh.vertex_coords(0, v), mesh.vertex_coords(1, v), z);
  }
  const Index nc = mesh.n_cells();
  std::fprintf(out.f, "CELLS %" PRId64 " %" PRId64 "\n", static_cast<std::int64_t>(nc),
               static_cast<std::int64_t>(nc * (dim + 2)));
  for (Index c = 0; c < nc; ++c) {
    std::fprintf(out.f, "%d", dim + 1);
    for (int k = 0; k <= dim; ++k)
      std::fprintf(out.f, " %" PRId64, static_cast<std::int64_t>(mesh.cell_vertices(k, c)));
    std::fprintf(out.f, "\n");
  }
  std::fprintf(out.f, "CELL_TYPES %" PRId64 "\n", static_cast<std::int64_t>(nc));
  for (Index c = 0; c < nc; ++c) std::fprintf(out.f, "%d\n", dim == 2 ? 5 : 10);

  std::fprintf(out.f, "CELL_DATA %" PRId64 "\n", static_cast<std::int64_t>(nc));
  if (u.size() == dim * nc) {
    std::fprintf(out.f, "VECTORS displacement double\n");
    for (Index c = 0; c < nc; ++c) {
      const double z = dim == 3 ? u(c * dim + 2) : 0.0;
      std::fprintf(out.f, "%.17g %.17g %.17g\n", u(c * dim), u(c * dim + 1), z);
    }
  }
  if (p.size() == nc) {
    std::fprintf(out.f, "SCALARS pressure double 1\nLOOKUP_TABLE default\n");
    for (Index c = 0; c < nc; ++c) std::fprintf(out.f, "%.17g\n", p(c));
  }
}

FractureFaceData aggregate_fracture_faces(const Mesh& mesh, const SubGrid& sub,
                                          const FracturePairing& pairing, const Mat& lambda,
                                          const Mat& jump, const std::vector<ContactSet>* sets) {
  const int dim = mesh.dim;
  FractureFaceData data;
  for (Index f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face_kind[f] == FaceKind::FracturePositive) data.faces.push_back(f);
  const Index n = static_cast<Index>(data.faces.size());
  data.fracture.resize(n);
  data.centroid.resize(dim, n);
  data.area.resize(n);
  data.lambda = Mat::Zero(dim, n);
  data.jump = Mat::Zero(dim, n);
  data.label.assign(n, ContactSet::Stick);

  for (Index i = 0; i < n; ++i) {
    const Index f = data.faces[i];
    data.fracture[i] = mesh.face_fracture[f];
    data.centroid.col(i) = mesh.face_centroids.col(f);
    data.area(i) = mesh.face_areas(f);
    double slide_area = 0, open_area = 0, stick_area = 0;
    for (int k = 0; k < dim; ++k) {
      const Index s = sub.subface_id(f, k);
      const Index r = pairing.rank_of_subface[s];
      if (r < 0) throw ContractViolation("positive subface without pairing rank");
      data.lambda.col(i) += sub.subface_area(s) * lambda.col(r);
      data.jump.col(i) += jump.col(r) / dim;
      if (sets) {
        const double a = sub.subface_area(s);
        switch ((*sets)[r]) {
          case ContactSet::Open: open_area += a; break;
          case ContactSet::Stick: stick_area += a; break;
          case ContactSet::Slide: slide_area += a; break;
        }
      }
    }
    data.lambda.col(i) /= mesh.face_areas(f);
    if (sets) {
      if (slide_area >= open_area && slide_area >= stick_area)
        data.label[i] = ContactSet::Slide;
      else if (open_area >= stick_area)
        data.label[i] = ContactSet::Open;
      else
        data.label[i] = ContactSet::Stick;
    }
  }
  return data;
}

void write_fracture_csv(const std::string& path, const Mesh& mesh,
                        const FractureFaceData& data, const FracturePairing& pairing) {
  File out(path);
  const int dim = mesh.dim;
  std::fprintf(out.f, "face,fracture,x,y,z,area,lambda_n,lambda_tau,jump_n,jump_tau,state\n");
  for (Index i = 0; i < static_cast<Index>(data.faces.size()); ++i) {
    const Index f = data.faces[i];
    const Vec n = mesh.face_normals.col(f);
    const double ln = n.dot(data.lambda.col(i));
    const double jn = n.dot(data.jump.col(i));
    const double lt = (data.lambda.col(i) - ln * n).norm();
    const double jt = (data.jump.col(i) - jn * n).norm();
    const char* label = data.label[i] == ContactSet::Open
                            ? "open"
                            : (data.label[i] == ContactSet::Slide ? "slide" : "stick");
    const double z = dim == 3 ? data.centroid(2, i) : 0.0;
    std::fprintf(out.f, "%" PRId64 ",%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                 static_cast<std::int64_t>(f),
                 mesh.fracture_names[data.fracture[i]].c_str(), data.centroid(0, i),
                 data.centroid(1, i), z, data.area(i), ln, lt, jn, jt, label);
  }
  (void)pairing;
}

void write_report_text(const std::string& path, const RunReport& report) {
  File out(path);
  std::fprintf(out.f, "step,time,iterations,open,stick,slide,max_slip,max_opening\n");
  for (const auto& s : report.steps)
    std::fprintf(out.f, "%d,%.17g,%d,%" PRId64 ",%" PRId64 ",%" PRId64 ",%.17g,%.17g\n", s.step,
                 s.time, s.iterations, s.sets[0], s.sets[1], s.sets[2], s.max_slip,
                 s.max_opening);
  if (report.failed) std::fprintf(out.f, "FAILED,%s\n", report.failure.c_str());
  std::fprintf(out.f, "wall_seconds,%.6g\n", report.wall_seconds);
}

} // namespace porocontact
