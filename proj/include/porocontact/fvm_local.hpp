// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/boundary.hpp"
#include "porocontact/material.hpp"

namespace porocontact {

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct BcEntry {
  Index row;
  Index slot;
  double coeff;
};

struct LambdaEntry {
  Index row;
  Index column; // global multiplier dof
  double coeff;
};

/// Flow gradient system at one vertex: A*grad + R_p*p = R_bc*g, with grad
/// the stacked subcell pressure gradients of the cells in T_v (cell-major,
/// coordinate minor).
struct FlowLocalSystem {
  std::vector<Index> cells; // T_v, ascending
  Mat A;
  Mat R_p;
  std::vector<BcEntry> R_bc;
  Index n_flux_rows = 0, n_continuity_rows = 0;
};

/// Mechanics gradient system at one vertex:
/// A*grad + R_u*u + R_p*p = R_bc*g + R_lambda*lambda. Gradient components are
/// ordered cell-major, then (i,j) row-major with i the displacement component.
struct MechLocalSystem {
  std::vector<Index> cells;
  Mat A;
  Mat R_u;
  Mat R_p;
  std::vector<BcEntry> R_bc;
  std::vector<LambdaEntry> R_lambda;
  Index n_traction_rows = 0, n_continuity_rows = 0;
};

FlowLocalSystem assemble_flow_local(const Mesh& mesh, const SubGrid& sub,
                                    const MaterialField& material, const BoundaryLayout& layout,
                                    Index vertex);

MechLocalSystem assemble_mech_local(const Mesh& mesh, const SubGrid& sub,
                                    const FracturePairing& pairing, const MaterialField& material,
                                    const BoundaryLayout& layout, Index vertex);

/// Per-subface reconstruction stencils over the cell-centered unknowns,
/// multipliers and boundary data, produced by eliminating the local gradient
/// systems vertex by vertex. Independent of the contact state.
///
/// Row layout: flux rows are 2*subface+side; traction rows (2*subface+side)*dim+i;
/// trace rows exist for fracture subfaces only, trace_block[s]*dim+i;
/// jump rows pair_rank*dim+i; divergence rows are subcell ids.
struct CondensedOperators {
  int dim = 2;
  bool with_flow = false;
  Index n_cells = 0, n_pairs = 0, n_subfaces = 0, n_subcells = 0;

  Index n_u() const { return dim * n_cells; }
  Index n_p() const { return with_flow ? n_cells : 0; }
  Index n_lambda() const { return dim * n_pairs; }

  SparseRM flux_p, flux_bc;
  SparseRM trac_u, trac_p, trac_lam, trac_bc;
  SparseRM trace_u, trace_p, trace_lam, trace_bc;
  std::vector<Index> trace_block;
  SparseRM jump_u, jump_p, jump_lam, jump_bc;
  SparseRM div_u, div_p, div_lam, div_bc;
};

CondensedOperators condense(const Mesh& mesh, const SubGrid& sub, const FracturePairing& pairing,
                            const MaterialField& material, const BoundaryLayout& layout);

/// One-sided subface quantities reconstructed from a state. Columns of
/// `flux`/`traction` follow the 2*subface+side layout (untouched zero for the
/// missing side of boundary faces); `trace` holds the displacement at the
/// continuity point, single-valued per subface.
struct SubfaceQuantities {
  Vec flux;     // 2*n_subfaces
  Mat traction; // dim x 2*n_subfaces
  Mat trace;    // dim x n_subfaces
};

SubfaceQuantities reconstruct_subface_quantities(const Mesh& mesh, const SubGrid& sub,
                                                 const FracturePairing& pairing,
                                                 const MaterialField& material,
                                                 const BoundaryLayout& layout,
                                                 const CondensedOperators& ops, const Vec& u,
                                                 const Vec& p, const Vec& lambda,
                                                 const BoundaryValues& bc);

/// Subcell displacement gradients of a state, row-major (i*dim+j) per
/// subcell column. Exposes the eliminated unknowns for verification.
Mat reconstruct_displacement_gradients(const Mesh& mesh, const SubGrid& sub,
                                       const FracturePairing& pairing,
                                       const MaterialField& material,
                                       const BoundaryLayout& layout, const Vec& u, const Vec& p,
                                       const Vec& lambda, const BoundaryValues& bc);

} // namespace porocontact
