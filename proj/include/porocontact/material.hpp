// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/mesh.hpp"

namespace porocontact {

/// Per-cell material data sampled at cell centers. Isotropic stiffness in
/// Lame form; isotropic permeability (mobility, m^2/(Pa s)).
struct MaterialField {
  Vec shear_modulus; // G, Pa
  Vec lame_lambda;   // Lambda, Pa
  Vec biot_alpha;    // dimensionless
  Vec storage;       // c0, 1/Pa
  Vec permeability;  // K, m^2/(Pa s)
  Mat body_force;    // dim x n_cells, N/m^3
  Vec fluid_source;  // 1/s

  static MaterialField uniform(const Mesh& mesh, double G, double lambda, double alpha,
                               double c0, double permeability);

  void validate(int dim) const;
};

/// Shear modulus from Young's modulus and Poisson ratio.
inline double shear_from_young(double E, double nu) { return E / (2.0 * (1.0 + nu)); }
/// First Lame parameter from Young's modulus and Poisson ratio.
inline double lambda_from_young(double E, double nu) {
  return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
}

} // namespace porocontact
