// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/assembly.hpp"

namespace porocontact {

namespace {

void add_row(std::vector<Triplet>& out, const SparseRM& matrix, Index src_row, Index dst_row,
             Index col_offset, double scale) {
  for (SparseRM::InnerIterator it(matrix, src_row); it; ++it)
    out.emplace_back(dst_row, col_offset + it.col(), scale * it.value());
}

void add_row_sp(std::vector<Triplet>& out, const SparseRM& matrix, Index src_row, Index dst_row,
                Index col_offset, double scale) {
  add_row(out, matrix, src_row, dst_row, col_offset, scale);
}

} // namespace

BiotOperator assemble_biot(const Mesh& mesh, const SubGrid& sub, const CondensedOperators& ops,
                           const MaterialField& material, const BoundaryLayout& layout, double dt) {
  const int dim = mesh.dim;
  if (layout.with_flow && !(dt > 0))
    throw ContractViolation("flow rows require a positive time step");

  BiotOperator biot;
  biot.n_u = ops.n_u();
  biot.n_p = ops.n_p();
  biot.n_lambda = ops.n_lambda();
  biot.dt = dt;
  const Index n_rows = biot.n_u + biot.n_p;
  biot.rhs_sources = Vec::Zero(n_rows);
  biot.rhs_storage_prev = Vec::Zero(biot.n_p);

  std::vector<Triplet> mech_bc, flow_bc, div_prev;

  for (Index c = 0; c < mesh.n_cells(); ++c) {
    // Momentum: the condensed subface tractions of the cell sum against the
    // body force.
    for (int i = 0; i < dim; ++i) {
      const Index row = c * dim + i;
      biot.rhs_sources(row) += mesh.cell_volumes(c) * material.body_force(i, c);
      for (Index f : mesh.cell_faces[c]) {
        const int side = mesh.face_cells[f][0] == c ? 0 : 1;
        for (int k = 0; k < dim; ++k) {
          const Index s = sub.subface_id(f, k);
          const Index trow = (2 * s + side) * dim + i;
          add_row(biot.matrix, ops.trac_u, trow, row, 0, -1.0);
          if (layout.with_flow) add_row(biot.matrix, ops.trac_p, trow, row, biot.n_u, -1.0);
          add_row(biot.matrix, ops.trac_lam, trow, row, biot.n_u + biot.n_p, -1.0);
          add_row_sp(mech_bc, ops.trac_bc, trow, row, 0, 1.0);
        }
      }
    }

    if (!layout.with_flow) continue;

    // Mass: fluxes plus the backward Euler coupling and storage terms.
    const Index row = biot.n_u + c;
    biot.rhs_sources(row) += mesh.cell_volumes(c) * material.fluid_source(c);
    for (Index f : mesh.cell_faces[c]) {
      const int side = mesh.face_cells[f][0] == c ? 0 : 1;
      for (int k = 0; k < dim; ++k) {
        const Index s = sub.subface_id(f, k);
        const Index qrow = 2 * s + side;
        add_row(biot.matrix, ops.flux_p, qrow, row, biot.n_u, 1.0);
        add_row_sp(flow_bc, ops.flux_bc, qrow, row, 0, -1.0);
      }
    }
    const double alpha_dt = material.biot_alpha(c) / dt;
    for (int k = 0; k <= dim; ++k) {
      const Index sc = sub.subcell_id(c, k);
      const double coeff = alpha_dt * sub.subcell_volume(sc);
      add_row(biot.matrix, ops.div_u, sc, row, 0, coeff);
      add_row(biot.matrix, ops.div_p, sc, row, biot.n_u, coeff);
      add_row(biot.matrix, ops.div_lam, sc, row, biot.n_u + biot.n_p, coeff);
      add_row_sp(mech_bc, ops.div_bc, sc, row, 0, -coeff);
      div_prev.emplace_back(row, sc, coeff);
    }
    const double storage = material.storage(c) * mesh.cell_volumes(c) / dt;
    biot.matrix.emplace_back(row, biot.n_u + c, storage);
    biot.rhs_storage_prev(c) = storage;
  }

  biot.rhs_mech_bc.resize(n_rows, ops.trac_bc.cols());
  biot.rhs_mech_bc.setFromTriplets(mech_bc.begin(), mech_bc.end());
  biot.rhs_flow_bc.resize(n_rows, ops.flux_bc.cols());
  biot.rhs_flow_bc.setFromTriplets(flow_bc.begin(), flow_bc.end());
  biot.rhs_div_prev.resize(n_rows, ops.n_subcells);
  biot.rhs_div_prev.setFromTriplets(div_prev.begin(), div_prev.end());
  return biot;
}

ContactAssembly assemble_contact_block(const CondensedOperators& ops, const ContactRows& rows,
                                       const Vec& mech_bc_values) {
  const int dim = ops.dim;
  const Index offset = ops.n_u() + ops.n_p();
  ContactAssembly out;
  out.rhs = Vec::Zero(ops.n_lambda());

  const Vec jump_bc = ops.jump_bc * mech_bc_values;

  for (Index r = 0; r < ops.n_pairs; ++r) {
    const Mat& J = rows.jump_coeff[r];
    const Mat& Lm = rows.lambda_coeff[r];
    for (int i = 0; i < dim; ++i) {
      const Index row = offset + r * dim + i;
      out.rhs(r * dim + i) = rows.rhs(i, r);
      for (int j = 0; j < dim; ++j) {
        const double cj = J(i, j);
        if (cj != 0.0) {
          const Index jr = r * dim + j;
          add_row(out.matrix, ops.jump_u, jr, row, 0, cj);
          if (ops.with_flow) add_row(out.matrix, ops.jump_p, jr, row, ops.n_u(), cj);
          add_row(out.matrix, ops.jump_lam, jr, row, offset, cj);
          out.rhs(r * dim + i) -= cj * jump_bc(jr);
        }
        if (Lm(i, j) != 0.0)
          out.matrix.emplace_back(row, offset + r * dim + j, Lm(i, j));
      }
    }
  }
  return out;
}

GlobalSystem combine_system(const BiotOperator& biot, const ContactAssembly& contact,
                            const BoundaryValues& bc, const Vec& div_prev, const Vec& p_prev) {
  GlobalSystem sys;
  sys.n_u = biot.n_u;
  sys.n_p = biot.n_p;
  sys.n_lambda = biot.n_lambda;

  std::vector<Triplet> all = biot.matrix;
  all.insert(all.end(), contact.matrix.begin(), contact.matrix.end());
  sys.matrix.resize(sys.size(), sys.size());
  sys.matrix.setFromTriplets(all.begin(), all.end());

  sys.rhs = Vec::Zero(sys.size());
  Vec rhs_biot = biot.rhs_sources + biot.rhs_mech_bc * bc.mech;
  if (biot.n_p > 0) {
    rhs_biot += biot.rhs_flow_bc * bc.flow + biot.rhs_div_prev * div_prev;
    rhs_biot.segment(biot.n_u, biot.n_p) += biot.rhs_storage_prev.cwiseProduct(p_prev);
  }
  sys.rhs.head(rhs_biot.size()) = rhs_biot;
  sys.rhs.tail(sys.n_lambda) = contact.rhs;
  return sys;
}

Vec divergence_values(const CondensedOperators& ops, const Vec& u, const Vec& p,
                      const Vec& lambda, const Vec& mech_bc_values) {
  Vec div = ops.div_u * u + ops.div_lam * lambda + ops.div_bc * mech_bc_values;
  if (ops.with_flow && p.size() > 0) div += ops.div_p * p;
  return div;
}

} // namespace porocontact
