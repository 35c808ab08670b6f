// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/core.hpp"

#include <vector>

namespace porocontact {

enum class ContactSet : char { Open, Stick, Slide };

struct ContactParams {
  double c = 1e11;      // numeric parameter, Pa/m
  bool dynamic = false; // velocities from backward differences of the jump
  double dt = 1.0;      // s, used in dynamic mode
};

/// Fixed orthonormal tangential basis for a unit normal: smallest-component
/// axis swap plus Gram-Schmidt. Columns are the dim-1 tangent vectors.
Mat tangential_basis(const Vec& normal);

/// Multipliers, displacement jumps and friction data on the positive
/// fracture subfaces at one Newton iterate. Immutable per iterate.
struct ContactState {
  int dim = 2;
  Mat normal;    // dim x n
  Mat tangent;   // dim x (dim-1)*n, subface-major blocks
  Vec gap;       // n
  Vec friction;  // n
  Mat lambda;    // dim x n
  Mat jump;      // dim x n, [u] at the current iterate
  Mat jump_prev; // dim x n, converged jump of the previous time step
  ContactParams params;

  Index size() const { return gap.size(); }

  double lambda_n(Index r) const { return normal.col(r).dot(lambda.col(r)); }
  double jump_n(Index r) const { return normal.col(r).dot(jump.col(r)); }
  /// Tangential multiplier components in the subface basis.
  Vec lambda_tau(Index r) const;
  /// Tangential sliding velocity (static mode: the tangential jump itself).
  Vec velocity_tau(Index r) const;
  /// Friction bound b = F(-lambda_n + c([u]_n - g)).
  double friction_bound(Index r) const;

  void check_sizes() const;
};

/// Nonlinear complementarity residuals; both vanish exactly at states
/// satisfying the nonpenetration and Coulomb conditions.
struct Complementarity {
  Vec normal;  // C_n per subface
  Mat tangent; // (dim-1) x n, tangential components in the subface basis
};
Complementarity evaluate_complementarity(const ContactState& state);

/// Open/stick/slide partition from the current iterate. Total on any input;
/// ties at the friction bound go to the sliding set.
std::vector<ContactSet> classify_subfaces(const ContactState& state);

/// Pieces of the sliding linearization for one subface, in the tangential
/// basis. With `regularize`, Q/M/L and the auxiliary vectors are built from
/// the positive-definiteness-preserving forms; these coincide with the plain
/// ones whenever the Coulomb inequalities hold at the iterate.
struct SlideCoefficients {
  Mat Q, M, L; // (dim-1)^2
  Vec v, r;    // dim-1
  double beta = 1.0;
  double b = 0.0;
  double e = 0.0;
};
SlideCoefficients slide_coefficients(const ContactState& state, Index r, bool regularize);

/// Linearized contact conditions: d rows per positive subface over the new
/// iterate's jump and multiplier,
///   jump_coeff * [u]^{k+1} + lambda_coeff * lambda^{k+1} = rhs.
/// Row 0 is the normal condition, rows 1..d-1 the tangential ones. The caller
/// composes jump_coeff with the displacement-trace stencils.
struct ContactRows {
  std::vector<ContactSet> sets;
  std::vector<Mat> jump_coeff;
  std::vector<Mat> lambda_coeff;
  Mat rhs; // dim x n
};
ContactRows linearize_contact_rows(const ContactState& state, const std::vector<ContactSet>& sets);

} // namespace porocontact
