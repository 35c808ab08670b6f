// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/material.hpp"

namespace porocontact {

MaterialField MaterialField::uniform(const Mesh& mesh, double G, double lambda, double alpha,
                                     double c0, double permeability) {
  const Index nc = mesh.n_cells();
  MaterialField m;
  m.shear_modulus = Vec::Constant(nc, G);
  m.lame_lambda = Vec::Constant(nc, lambda);
  m.biot_alpha = Vec::Constant(nc, alpha);
  m.storage = Vec::Constant(nc, c0);
  m.permeability = Vec::Constant(nc, permeability);
  m.body_force = Mat::Zero(mesh.dim, nc);
  m.fluid_source = Vec::Zero(nc);
  m.validate(mesh.dim);
  return m;
}

void MaterialField::validate(int dim) const {
  const Index nc = shear_modulus.size();
  if (lame_lambda.size() != nc || biot_alpha.size() != nc || storage.size() != nc ||
      permeability.size() != nc || body_force.cols() != nc || fluid_source.size() != nc ||
      body_force.rows() != dim)
    throw ContractViolation("material field arrays have inconsistent sizes");
  for (Index c = 0; c < nc; ++c) {
    if (!(shear_modulus(c) > 0))
      throw ValidationError("shear modulus must be positive (cell " + std::to_string(c) + ")");
    if (!(lame_lambda(c) > -2.0 * shear_modulus(c) / dim))
      throw ValidationError("Lame lambda out of range (cell " + std::to_string(c) + ")");
    if (biot_alpha(c) < 0 || biot_alpha(c) > 1)
      throw ValidationError("Biot coefficient must lie in [0,1] (cell " + std::to_string(c) + ")");
    if (storage(c) < 0)
      throw ValidationError("storage coefficient must be nonnegative (cell " + std::to_string(c) + ")");
    if (!(permeability(c) > 0))
      throw ValidationError("permeability must be positive definite (cell " + std::to_string(c) + ")");
  }
}

} // namespace porocontact
