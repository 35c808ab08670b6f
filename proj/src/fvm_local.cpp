// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/fvm_local.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <optional>

namespace porocontact {

namespace {

int local_index(const std::vector<Index>& cells, Index c) {
  auto it = std::lower_bound(cells.begin(), cells.end(), c);
  if (it == cells.end() || *it != c) throw ContractViolation("cell not in vertex patch");
  return static_cast<int>(it - cells.begin());
}

int corner_of_vertex(const Mesh& mesh, Index face, Index vertex) {
  for (int k = 0; k < mesh.dim; ++k)
    if (mesh.face_vertices[face][k] == vertex) return k;
  throw ContractViolation("vertex not on face");
}

// Local solves use dense LU with partial pivoting. Corner patches whose
// faces carry only traction-type data can have a small rotational null space
// (all traction and continuity rows vanish on it); those fall back to a
// rank-revealing minimum-norm solve, which leaves every condensed output
// unchanged. Larger deficiencies indicate degenerate geometry.
class LocalSolver {
public:
  LocalSolver(const Mat& A, Index vertex, int dim) : lu_(A) {
    const Vec diag = lu_.matrixLU().diagonal().cwiseAbs();
    if (diag.size() > 0 && !(diag.minCoeff() > 1e-13 * diag.maxCoeff())) {
      cod_.emplace(A);
      cod_->setThreshold(1e-12);
      const Index deficiency = A.rows() - cod_->rank();
      if (deficiency > dim * (dim - 1) / 2)
        throw SingularSystemError("singular local gradient system at vertex " +
                                  std::to_string(vertex) + " (rank deficiency " +
                                  std::to_string(deficiency) + ")");
    }
  }
  Mat solve(const Mat& rhs) const { return cod_ ? Mat(cod_->solve(rhs)) : Mat(lu_.solve(rhs)); }
  Vec solve(const Vec& rhs) const { return cod_ ? Vec(cod_->solve(rhs)) : Vec(lu_.solve(rhs)); }

private:
  Eigen::PartialPivLU<Mat> lu_;
  std::optional<Eigen::CompleteOrthogonalDecomposition<Mat>> cod_;
};

// Volume weights of the vertex average <.>_v.
Vec average_weights(const SubGrid& sub, const Mesh& mesh, const std::vector<Index>& cells,
                    Index vertex) {
  Vec w(cells.size());
  for (size_t l = 0; l < cells.size(); ++l) {
    const Index c = cells[l];
    int corner = -1;
    for (int k = 0; k <= mesh.dim; ++k)
      if (mesh.cell_vertices(k, c) == vertex) corner = k;
    w(l) = sub.subcell_volume(sub.subcell_id(c, corner));
  }
  return w / w.sum();
}

// Coefficients of scale*(theta_K . n)_i over the local gradient unknowns,
// including the weakly symmetrizing vertex average.
template <typename RowLike>
void add_theta_row(RowLike&& row, int dim, const Vec& G, const Vec& L,
                   const Vec& w, int K, const Vec& n, int i, double scale) {
  const int nl = static_cast<int>(G.size());
  for (int M = 0; M < nl; ++M) {
    const double wG = w(M) * G(M);
    const int base = M * dim * dim;
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        double c = 0;
        if (M == K) {
          if (a == i) c += 2.0 * G(M) * n(b);
          if (a == b) c += L(M) * n(i);
        }
        if (a == i) c -= wG * n(b);
        if (b == i) c += wG * n(a);
        if (c != 0) row(base + a * dim + b) += scale * c;
      }
  }
}

} // namespace

FlowLocalSystem assemble_flow_local(const Mesh& mesh, const SubGrid& sub,
                                    const MaterialField& material, const BoundaryLayout& layout,
                                    Index vertex) {
  const int dim = mesh.dim;
  FlowLocalSystem sys;
  sys.cells = mesh.vertex_cells[vertex];
  const int nl = static_cast<int>(sys.cells.size());
  const int n = dim * nl;
  sys.A = Mat::Zero(n, n);
  sys.R_p = Mat::Zero(n, nl);

  Index row = 0;
  for (Index f : mesh.vertex_faces[vertex]) {
    const Index s = sub.subface_id(f, corner_of_vertex(mesh, f, vertex));
    const double m = sub.subface_area(s);
    const Vec x = sub.subface_point.col(s);
    const FlowRowKind kind = layout.flow(s);
    const Index c0 = mesh.face_cells[f][0];
    const int l0 = local_index(sys.cells, c0);
    const Vec n0 = mesh.outward_normal(c0, f);

    switch (kind) {
      case FlowRowKind::Interior: {
        const Index c1 = mesh.face_cells[f][1];
        const int l1 = local_index(sys.cells, c1);
        const Vec n1 = mesh.outward_normal(c1, f);
        // Flux balance: outward fluxes of the two sides cancel.
        for (int j = 0; j < dim; ++j) {
          sys.A(row, l0 * dim + j) += -m * material.permeability(c0) * n0(j);
          sys.A(row, l1 * dim + j) += -m * material.permeability(c1) * n1(j);
        }
        sys.n_flux_rows++;
        ++row;
        // Pressure continuity at the continuity point.
        for (int j = 0; j < dim; ++j) {
          sys.A(row, l0 * dim + j) += (x - mesh.cell_centers.col(c0))(j);
          sys.A(row, l1 * dim + j) -= (x - mesh.cell_centers.col(c1))(j);
        }
        sys.R_p(row, l0) += 1.0;
        sys.R_p(row, l1) -= 1.0;
        sys.n_continuity_rows++;
        ++row;
        break;
      }
      case FlowRowKind::Neumann:
      case FlowRowKind::Fracture: {
        for (int j = 0; j < dim; ++j)
          sys.A(row, l0 * dim + j) += -m * material.permeability(c0) * n0(j);
        sys.R_bc.push_back({row, layout.flow_slot[s], m});
        sys.n_flux_rows++;
        ++row;
        break;
      }
      case FlowRowKind::Dirichlet: {
        for (int j = 0; j < dim; ++j) sys.A(row, l0 * dim + j) += (x - mesh.cell_centers.col(c0))(j);
        sys.R_p(row, l0) += 1.0;
        sys.R_bc.push_back({row, layout.flow_slot[s], 1.0});
        sys.n_continuity_rows++;
        ++row;
        break;
      }
    }
  }
  if (row != n)
    throw SingularSystemError("flow system at vertex " + std::to_string(vertex) +
                              " is not square (" + std::to_string(row) + " rows, " +
                              std::to_string(n) + " unknowns)");
  return sys;
}

MechLocalSystem assemble_mech_local(const Mesh& mesh, const SubGrid& sub,
                                    const FracturePairing& pairing, const MaterialField& material,
                                    const BoundaryLayout& layout, Index vertex) {
  const int dim = mesh.dim;
  MechLocalSystem sys;
  sys.cells = mesh.vertex_cells[vertex];
  const int nl = static_cast<int>(sys.cells.size());
  const int n = dim * dim * nl;
  sys.A = Mat::Zero(n, n);
  sys.R_u = Mat::Zero(n, dim * nl);
  sys.R_p = Mat::Zero(n, nl);

  Vec G(nl), L(nl);
  for (int l = 0; l < nl; ++l) {
    G(l) = material.shear_modulus(sys.cells[l]);
    L(l) = material.lame_lambda(sys.cells[l]);
  }
  const Vec w = average_weights(sub, mesh, sys.cells, vertex);

  Index row = 0;
  auto traction_row = [&](Index r, int l, const Vec& nrm, int i, double m) {
    add_theta_row(sys.A.row(r), dim, G, L, w, l, nrm, i, m);
    sys.R_p(r, l) += -m * material.biot_alpha(sys.cells[l]) * nrm(i);
  };
  auto continuity_one_sided = [&](Index r, int l, const Vec& x, int i, double scale) {
    const Vec d = x - mesh.cell_centers.col(sys.cells[l]);
    for (int j = 0; j < dim; ++j) sys.A(r, l * dim * dim + i * dim + j) += scale * d(j);
    sys.R_u(r, l * dim + i) += scale;
  };

  for (Index f : mesh.vertex_faces[vertex]) {
    const Index s = sub.subface_id(f, corner_of_vertex(mesh, f, vertex));
    const double m = sub.subface_area(s);
    const Vec x = sub.subface_point.col(s);
    const MechRowKind kind = layout.mech(s);
    const Index c0 = mesh.face_cells[f][0];
    const int l0 = local_index(sys.cells, c0);
    const Vec n0 = mesh.outward_normal(c0, f);

    switch (kind) {
      case MechRowKind::Interior: {
        const Index c1 = mesh.face_cells[f][1];
        const int l1 = local_index(sys.cells, c1);
        const Vec n1 = mesh.outward_normal(c1, f);
        for (int i = 0; i < dim; ++i) {
          traction_row(row, l0, n0, i, m);
          traction_row(row, l1, n1, i, m);
          sys.n_traction_rows++;
          ++row;
        }
        for (int i = 0; i < dim; ++i) {
          continuity_one_sided(row, l0, x, i, 1.0);
          continuity_one_sided(row, l1, x, i, -1.0);
          sys.n_continuity_rows++;
          ++row;
        }
        break;
      }
      case MechRowKind::Neumann: {
        for (int i = 0; i < dim; ++i) {
          traction_row(row, l0, n0, i, m);
          sys.R_bc.push_back({row, layout.mech_slot[s] + i, m});
          sys.n_traction_rows++;
          ++row;
        }
        break;
      }
      case MechRowKind::Dirichlet: {
        // Scaled by the subface area to balance conditioning against the
        // traction rows.
        for (int i = 0; i < dim; ++i) {
          continuity_one_sided(row, l0, x, i, m);
          sys.R_bc.push_back({row, layout.mech_slot[s] + i, m});
          sys.n_continuity_rows++;
          ++row;
        }
        break;
      }
      case MechRowKind::Roller: {
        const int axis = layout.roller_axis[s];
        for (int i = 0; i < dim; ++i) {
          if (i == axis) {
            continuity_one_sided(row, l0, x, i, m);
            sys.R_bc.push_back({row, layout.mech_slot[s] + i, m});
            sys.n_continuity_rows++;
          } else {
            traction_row(row, l0, n0, i, m);
            sys.R_bc.push_back({row, layout.mech_slot[s] + i, m});
            sys.n_traction_rows++;
          }
          ++row;
        }
        break;
      }
      case MechRowKind::FracturePositive: {
        const Index rank = pairing.rank_of_subface[s];
        for (int i = 0; i < dim; ++i) {
          traction_row(row, l0, n0, i, m);
          sys.R_lambda.push_back({row, rank * dim + i, m});
          sys.n_traction_rows++;
          ++row;
        }
        break;
      }
      case MechRowKind::FractureNegative: {
        const Index rank = pairing.rank_of_subface[s];
        for (int i = 0; i < dim; ++i) {
          traction_row(row, l0, n0, i, m);
          sys.R_lambda.push_back({row, rank * dim + i, -m});
          sys.n_traction_rows++;
          ++row;
        }
        break;
      }
    }
  }
  if (row != n)
    throw SingularSystemError("mechanics system at vertex " + std::to_string(vertex) +
                              " is not square (" + std::to_string(row) + " rows, " +
                              std::to_string(n) + " unknowns)");
  return sys;
}

namespace {

// Descriptor of one condensed output row, evaluated as w * grad + direct.
struct OutRow {
  enum class Target : char { Flux, Traction, Trace, Div } target;
  Index row; // row id in the target matrices
};

struct TripletSink {
  std::vector<Triplet> flux_p, flux_bc;
  std::vector<Triplet> trac_u, trac_p, trac_lam, trac_bc;
  std::vector<Triplet> trace_u, trace_p, trace_lam, trace_bc;
  std::vector<Triplet> div_u, div_p, div_lam, div_bc;
};

void write_row(std::vector<Triplet>& sink, Index row, const Eigen::RowVectorXd& values,
               const std::vector<Index>& columns, double sign) {
  for (int k = 0; k < values.size(); ++k)
    if (values(k) != 0.0) sink.emplace_back(row, columns[k], sign * values(k));
}

} // namespace

CondensedOperators condense(const Mesh& mesh, const SubGrid& sub, const FracturePairing& pairing,
                            const MaterialField& material, const BoundaryLayout& layout) {
  const int dim = mesh.dim;
  CondensedOperators ops;
  ops.dim = dim;
  ops.with_flow = layout.with_flow;
  ops.n_cells = mesh.n_cells();
  ops.n_pairs = pairing.n_pairs();
  ops.n_subfaces = sub.n_subfaces();
  ops.n_subcells = sub.n_subcells();

  // Trace rows: positive subfaces at blocks [0, n_pairs), negatives after.
  ops.trace_block.assign(sub.n_subfaces(), -1);
  for (Index r = 0; r < ops.n_pairs; ++r) {
    ops.trace_block[pairing.positive[r]] = r;
    ops.trace_block[pairing.negative_partner[r]] = ops.n_pairs + r;
  }

  TripletSink sink;

  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.vertex_cells[v].empty()) continue;

    // ---- flow ----
    if (layout.with_flow) {
      FlowLocalSystem fs = assemble_flow_local(mesh, sub, material, layout, v);
      const int nl = static_cast<int>(fs.cells.size());
      const int n = dim * nl;

      std::vector<Index> slots;
      for (const auto& e : fs.R_bc) slots.push_back(e.slot);
      std::sort(slots.begin(), slots.end());
      slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
      Mat R_bc = Mat::Zero(n, slots.size());
      for (const auto& e : fs.R_bc) {
        const auto pos = std::lower_bound(slots.begin(), slots.end(), e.slot) - slots.begin();
        R_bc(e.row, pos) += e.coeff;
      }

      const LocalSolver lu(fs.A, v, dim);
      Mat rhs(n, nl + slots.size());
      rhs << fs.R_p, R_bc;
      const Mat Gall = lu.solve(rhs);

      for (Index f : mesh.vertex_faces[v]) {
        const Index s = sub.subface_id(f, corner_of_vertex(mesh, f, v));
        const double m = sub.subface_area(s);
        const FlowRowKind kind = layout.flow(s);
        if (kind == FlowRowKind::Neumann || kind == FlowRowKind::Fracture) {
          sink.flux_bc.emplace_back(2 * s, layout.flow_slot[s], m);
          continue;
        }
        for (int side = 0; side < 2; ++side) {
          const Index c = mesh.face_cells[f][side];
          if (c < 0) continue;
          const int lc = local_index(fs.cells, c);
          const Vec nrm = mesh.outward_normal(c, f);
          Eigen::RowVectorXd wrow = Eigen::RowVectorXd::Zero(n);
          for (int j = 0; j < dim; ++j) wrow(lc * dim + j) = -m * material.permeability(c) * nrm(j);
          const Eigen::RowVectorXd out = wrow * Gall;
          write_row(sink.flux_p, 2 * s + side, out.head(nl), fs.cells, -1.0);
          write_row(sink.flux_bc, 2 * s + side, out.tail(slots.size()), slots, 1.0);
        }
      }
    }

    // ---- mechanics ----
    MechLocalSystem ms = assemble_mech_local(mesh, sub, pairing, material, layout, v);
    const int nl = static_cast<int>(ms.cells.size());
    const int n = dim * dim * nl;

    std::vector<Index> slots, lam_cols;
    for (const auto& e : ms.R_bc) slots.push_back(e.slot);
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    for (const auto& e : ms.R_lambda) lam_cols.push_back(e.column);
    std::sort(lam_cols.begin(), lam_cols.end());
    lam_cols.erase(std::unique(lam_cols.begin(), lam_cols.end()), lam_cols.end());

    Mat R_bc = Mat::Zero(n, slots.size());
    for (const auto& e : ms.R_bc) {
      const auto pos = std::lower_bound(slots.begin(), slots.end(), e.slot) - slots.begin();
      R_bc(e.row, pos) += e.coeff;
    }
    Mat R_lam = Mat::Zero(n, lam_cols.size());
    for (const auto& e : ms.R_lambda) {
      const auto pos = std::lower_bound(lam_cols.begin(), lam_cols.end(), e.column) - lam_cols.begin();
      R_lam(e.row, pos) += e.coeff;
    }

    const LocalSolver lu(ms.A, v, dim);
    const Index cu = dim * nl, cp = nl, cl = static_cast<Index>(lam_cols.size()),
                cb = static_cast<Index>(slots.size());
    Mat rhs(n, cu + cp + cl + cb);
    rhs << ms.R_u, ms.R_p, R_lam, R_bc;
    const Mat Gall = lu.solve(rhs);

    std::vector<Index> ucols(cu);
    for (int l = 0; l < nl; ++l)
      for (int i = 0; i < dim; ++i) ucols[l * dim + i] = ms.cells[l] * dim + i;

    Vec G(nl), L(nl);
    for (int l = 0; l < nl; ++l) {
      G(l) = material.shear_modulus(ms.cells[l]);
      L(l) = material.lame_lambda(ms.cells[l]);
    }
    const Vec w = average_weights(sub, mesh, ms.cells, v);

    auto emit = [&](OutRow::Target target, Index row, const Eigen::RowVectorXd& wrow,
                    int direct_u_col, double direct_u, int direct_p_col, double direct_p) {
      Eigen::RowVectorXd out = wrow * Gall;
      Eigen::RowVectorXd out_u = -out.segment(0, cu);
      Eigen::RowVectorXd out_p = -out.segment(cu, cp);
      if (direct_u_col >= 0) out_u(direct_u_col) += direct_u;
      if (direct_p_col >= 0) out_p(direct_p_col) += direct_p;
      auto pick = [&](std::vector<Triplet>& su, std::vector<Triplet>& sp,
                      std::vector<Triplet>& sl, std::vector<Triplet>& sb) {
        write_row(su, row, out_u, ucols, 1.0);
        if (layout.with_flow) write_row(sp, row, out_p, ms.cells, 1.0);
        write_row(sl, row, out.segment(cu + cp, cl), lam_cols, 1.0);
        write_row(sb, row, out.segment(cu + cp + cl, cb), slots, 1.0);
      };
      switch (target) {
        case OutRow::Target::Traction: pick(sink.trac_u, sink.trac_p, sink.trac_lam, sink.trac_bc); break;
        case OutRow::Target::Trace: pick(sink.trace_u, sink.trace_p, sink.trace_lam, sink.trace_bc); break;
        case OutRow::Target::Div: pick(sink.div_u, sink.div_p, sink.div_lam, sink.div_bc); break;
        default: break;
      }
    };

    for (Index f : mesh.vertex_faces[v]) {
      const Index s = sub.subface_id(f, corner_of_vertex(mesh, f, v));
      const double m = sub.subface_area(s);
      const Vec x = sub.subface_point.col(s);
      const MechRowKind kind = layout.mech(s);

      // Traction stencils per side.
      for (int side = 0; side < 2; ++side) {
        const Index c = mesh.face_cells[f][side];
        if (c < 0) continue;
        const int lc = local_index(ms.cells, c);
        const Vec nrm = mesh.outward_normal(c, f);
        for (int i = 0; i < dim; ++i) {
          const Index row = (2 * s + side) * dim + i;
          const bool exact_neumann =
              kind == MechRowKind::Neumann ||
              (kind == MechRowKind::Roller && i != layout.roller_axis[s]);
          if (exact_neumann) {
            sink.trac_bc.emplace_back(row, layout.mech_slot[s] + i, m);
            continue;
          }
          if (kind == MechRowKind::FracturePositive || kind == MechRowKind::FractureNegative) {
            const Index rank = pairing.rank_of_subface[s];
            const double sign = kind == MechRowKind::FracturePositive ? 1.0 : -1.0;
            sink.trac_lam.emplace_back(row, rank * dim + i, sign * m);
            continue;
          }
          Eigen::RowVectorXd wrow = Eigen::RowVectorXd::Zero(n);
          add_theta_row(wrow, dim, G, L, w, lc, nrm, i, m);
          emit(OutRow::Target::Traction, row, wrow, -1, 0.0, lc,
               -m * material.biot_alpha(c) * nrm(i));
        }
      }

      // Displacement trace stencils on fracture subfaces.
      if (ops.trace_block[s] >= 0) {
        const Index c = mesh.face_cells[f][0];
        const int lc = local_index(ms.cells, c);
        const Vec d = x - mesh.cell_centers.col(c);
        for (int i = 0; i < dim; ++i) {
          Eigen::RowVectorXd wrow = Eigen::RowVectorXd::Zero(n);
          for (int j = 0; j < dim; ++j) wrow(lc * dim * dim + i * dim + j) = d(j);
          emit(OutRow::Target::Trace, ops.trace_block[s] * dim + i, wrow, lc * dim + i, 1.0, -1, 0.0);
        }
      }
    }

    // Subcell divergence stencils (mass-balance coupling term).
    if (layout.with_flow) {
      for (int l = 0; l < nl; ++l) {
        const Index c = ms.cells[l];
        int corner = -1;
        for (int k = 0; k <= dim; ++k)
          if (mesh.cell_vertices(k, c) == v) corner = k;
        Eigen::RowVectorXd wrow = Eigen::RowVectorXd::Zero(n);
        for (int i = 0; i < dim; ++i) wrow(l * dim * dim + i * dim + i) = 1.0;
        emit(OutRow::Target::Div, sub.subcell_id(c, corner), wrow, -1, 0.0, -1, 0.0);
      }
    }
  }

  const Index nsf = sub.n_subfaces();
  auto build = [](SparseRM& matrix, Index rows, Index cols, std::vector<Triplet>& trip) {
    matrix.resize(rows, cols);
    matrix.setFromTriplets(trip.begin(), trip.end());
    trip.clear();
    trip.shrink_to_fit();
  };
  build(ops.flux_p, 2 * nsf, ops.n_p(), sink.flux_p);
  build(ops.flux_bc, 2 * nsf, layout.n_flow_slots, sink.flux_bc);
  build(ops.trac_u, 2 * nsf * dim, ops.n_u(), sink.trac_u);
  build(ops.trac_p, 2 * nsf * dim, ops.n_p(), sink.trac_p);
  build(ops.trac_lam, 2 * nsf * dim, ops.n_lambda(), sink.trac_lam);
  build(ops.trac_bc, 2 * nsf * dim, layout.n_mech_slots, sink.trac_bc);
  build(ops.trace_u, 2 * ops.n_pairs * dim, ops.n_u(), sink.trace_u);
  build(ops.trace_p, 2 * ops.n_pairs * dim, ops.n_p(), sink.trace_p);
  build(ops.trace_lam, 2 * ops.n_pairs * dim, ops.n_lambda(), sink.trace_lam);
  build(ops.trace_bc, 2 * ops.n_pairs * dim, layout.n_mech_slots, sink.trace_bc);
  build(ops.div_u, ops.n_subcells, ops.n_u(), sink.div_u);
  build(ops.div_p, ops.n_subcells, ops.n_p(), sink.div_p);
  build(ops.div_lam, ops.n_subcells, ops.n_lambda(), sink.div_lam);
  build(ops.div_bc, ops.n_subcells, layout.n_mech_slots, sink.div_bc);

  // Jump stencils: positive trace minus the paired negative trace.
  {
    std::vector<Triplet> ju, jp, jl, jb;
    auto accumulate = [&](const SparseRM& trace, std::vector<Triplet>& out) {
      for (Index r = 0; r < ops.n_pairs; ++r)
        for (int i = 0; i < dim; ++i) {
          const Index dst = r * dim + i;
          for (SparseRM::InnerIterator it(trace, r * dim + i); it; ++it)
            out.emplace_back(dst, it.col(), it.value());
          for (SparseRM::InnerIterator it(trace, (ops.n_pairs + r) * dim + i); it; ++it)
            out.emplace_back(dst, it.col(), -it.value());
        }
    };
    accumulate(ops.trace_u, ju);
    accumulate(ops.trace_p, jp);
    accumulate(ops.trace_lam, jl);
    accumulate(ops.trace_bc, jb);
    build(ops.jump_u, ops.n_pairs * dim, ops.n_u(), ju);
    build(ops.jump_p, ops.n_pairs * dim, ops.n_p(), jp);
    build(ops.jump_lam, ops.n_pairs * dim, ops.n_lambda(), jl);
    build(ops.jump_bc, ops.n_pairs * dim, layout.n_mech_slots, jb);
  }

  return ops;
}

Mat reconstruct_displacement_gradients(const Mesh& mesh, const SubGrid& sub,
                                       const FracturePairing& pairing,
                                       const MaterialField& material,
                                       const BoundaryLayout& layout, const Vec& u, const Vec& p,
                                       const Vec& lambda, const BoundaryValues& bc) {
  const int dim = mesh.dim;
  Mat grads = Mat::Zero(dim * dim, sub.n_subcells());
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.vertex_cells[v].empty()) continue;
    MechLocalSystem ms = assemble_mech_local(mesh, sub, pairing, material, layout, v);
    const int nl = static_cast<int>(ms.cells.size());
    Vec rhs = Vec::Zero(ms.A.rows());
    for (const auto& e : ms.R_bc) rhs(e.row) += e.coeff * bc.mech(e.slot);
    for (const auto& e : ms.R_lambda) rhs(e.row) += e.coeff * lambda(e.column);
    for (int l = 0; l < nl; ++l) {
      for (int i = 0; i < dim; ++i) rhs -= ms.R_u.col(l * dim + i) * u(ms.cells[l] * dim + i);
      if (layout.with_flow) rhs -= ms.R_p.col(l) * p(ms.cells[l]);
    }
    const LocalSolver lu(ms.A, v, dim);
    const Vec grad = lu.solve(rhs);
    for (int l = 0; l < nl; ++l) {
      const Index c = ms.cells[l];
      int corner = -1;
      for (int k = 0; k <= dim; ++k)
        if (mesh.cell_vertices(k, c) == v) corner = k;
      grads.col(sub.subcell_id(c, corner)) = grad.segment(l * dim * dim, dim * dim);
    }
  }
  return grads;
}

SubfaceQuantities reconstruct_subface_quantities(const Mesh& mesh, const SubGrid& sub,
                                                 const FracturePairing& pairing,
                                                 const MaterialField& material,
                                                 const BoundaryLayout& layout,
                                                 const CondensedOperators& ops, const Vec& u,
                                                 const Vec& p, const Vec& lambda,
                                                 const BoundaryValues& bc) {
  const int dim = mesh.dim;
  if (u.size() != ops.n_u() || p.size() != ops.n_p() || lambda.size() != ops.n_lambda() ||
      bc.mech.size() != ops.trac_bc.cols() ||
      (layout.with_flow && bc.flow.size() != ops.flux_bc.cols()))
    throw ContractViolation("state vector sizes do not match the mesh");

  SubfaceQuantities out;
  out.flux = Vec::Zero(2 * sub.n_subfaces());
  if (layout.with_flow) out.flux = ops.flux_p * p + ops.flux_bc * bc.flow;

  Vec trac = ops.trac_u * u + ops.trac_lam * lambda + ops.trac_bc * bc.mech;
  if (layout.with_flow) trac += ops.trac_p * p;
  out.traction = Eigen::Map<Mat>(trac.data(), dim, 2 * sub.n_subfaces());

  // Traces everywhere need the gradients; redo the tiny vertex solves.
  out.trace = Mat::Zero(dim, sub.n_subfaces());
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.vertex_cells[v].empty()) continue;
    MechLocalSystem ms = assemble_mech_local(mesh, sub, pairing, material, layout, v);
    const int nl = static_cast<int>(ms.cells.size());
    const int n = dim * dim * nl;
    Vec rhs = Vec::Zero(n);
    for (const auto& e : ms.R_bc) rhs(e.row) += e.coeff * bc.mech(e.slot);
    for (const auto& e : ms.R_lambda) rhs(e.row) += e.coeff * lambda(e.column);
    for (int l = 0; l < nl; ++l) {
      for (int i = 0; i < dim; ++i)
        rhs -= ms.R_u.col(l * dim + i) * u(ms.cells[l] * dim + i);
      if (layout.with_flow) rhs -= ms.R_p.col(l) * p(ms.cells[l]);
    }
    const LocalSolver lu(ms.A, v, dim);
    const Vec grad = lu.solve(rhs);

    for (Index f : mesh.vertex_faces[v]) {
      const Index s = sub.subface_id(f, corner_of_vertex(mesh, f, v));
      const Index c = mesh.face_cells[f][0];
      const int lc = local_index(ms.cells, c);
      const Vec d = sub.subface_point.col(s) - mesh.cell_centers.col(c);
      for (int i = 0; i < dim; ++i) {
        double val = u(c * dim + i);
        for (int j = 0; j < dim; ++j) val += grad(lc * dim * dim + i * dim + j) * d(j);
        out.trace(i, s) = val;
      }
    }
  }
  return out;
}

} // namespace porocontact
