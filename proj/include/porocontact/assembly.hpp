// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/contact.hpp"
#include "porocontact/fvm_local.hpp"

namespace porocontact {

/// Momentum and mass blocks of the global system together with the maps that
/// rebuild the right-hand side from boundary data and the previous time
/// step. Independent of the contact state: assembled once per mesh,
/// material and time step length.
struct BiotOperator {
  Index n_u = 0, n_p = 0, n_lambda = 0;
  double dt = 0;

  std::vector<Triplet> matrix; // A,B,C and D,E,F entries
  Vec rhs_sources;             // body force and fluid sources, n_u + n_p
  SparseMat rhs_mech_bc;       // (n_u+n_p) x n_mech_slots
  SparseMat rhs_flow_bc;       // (n_u+n_p) x n_flow_slots
  SparseMat rhs_div_prev;      // (n_u+n_p) x n_subcells
  Vec rhs_storage_prev;        // coefficient on the previous pressure, n_p

  Index size() const { return n_u + n_p + n_lambda; }
};

/// `dt <= 0` selects the static/elastic mode (no flow rows; requires a
/// layout built without flow).
BiotOperator assemble_biot(const Mesh& mesh, const SubGrid& sub, const CondensedOperators& ops,
                           const MaterialField& material, const BoundaryLayout& layout, double dt);

/// Contact rows composed with the displacement-trace stencils: the G, H, J
/// blocks plus their right-hand side.
struct ContactAssembly {
  std::vector<Triplet> matrix; // global rows starting at n_u+n_p
  Vec rhs;                     // n_lambda
};

ContactAssembly assemble_contact_block(const CondensedOperators& ops, const ContactRows& rows,
                                       const Vec& mech_bc_values);

/// Full linear system of one Newton iteration.
struct GlobalSystem {
  Index n_u = 0, n_p = 0, n_lambda = 0;
  SparseMat matrix;
  Vec rhs;
  Index size() const { return n_u + n_p + n_lambda; }
};

GlobalSystem combine_system(const BiotOperator& biot, const ContactAssembly& contact,
                            const BoundaryValues& bc, const Vec& div_prev, const Vec& p_prev);

/// Subcell divergence values of a state (previous-step storage for the
/// backward Euler mass balance).
Vec divergence_values(const CondensedOperators& ops, const Vec& u, const Vec& p,
                      const Vec& lambda, const Vec& mech_bc_values);

} // namespace porocontact
