// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/boundary.hpp"

#include <cmath>

namespace porocontact {

namespace {

int normal_axis(const Vec& n) {
  for (int a = 0; a < n.size(); ++a)
    if (std::abs(std::abs(n(a)) - 1.0) < 1e-9) return a;
  return -1;
}

} // namespace

BoundaryLayout build_boundary_layout(const Mesh& mesh, const SubGrid& sub,
                                     const BoundaryConditions& bcs, bool with_flow) {
  const int dim = mesh.dim;
  BoundaryLayout layout;
  layout.with_flow = with_flow;
  layout.flow_kind.assign(sub.n_subfaces(), static_cast<char>(FlowRowKind::Interior));
  layout.flow_slot.assign(sub.n_subfaces(), -1);
  layout.mech_kind.assign(sub.n_subfaces(), static_cast<char>(MechRowKind::Interior));
  layout.mech_slot.assign(sub.n_subfaces(), -1);
  layout.roller_axis.assign(sub.n_subfaces(), -1);

  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const FaceKind kind = mesh.face_kind[f];
    if (kind == FaceKind::Interior) continue;
    for (int k = 0; k < dim; ++k) {
      const Index s = sub.subface_id(f, k);
      if (kind == FaceKind::FracturePositive || kind == FaceKind::FractureNegative) {
        // Impermeable fractures: homogeneous Neumann for the flow. The
        // mechanics rows couple to the Lagrange multiplier instead.
        if (with_flow) {
          layout.flow_kind[s] = static_cast<char>(FlowRowKind::Fracture);
          layout.flow_slot[s] = layout.n_flow_slots++;
        }
        layout.mech_kind[s] = static_cast<char>(kind == FaceKind::FracturePositive
                                                    ? MechRowKind::FracturePositive
                                                    : MechRowKind::FractureNegative);
        continue;
      }

      const int gid = mesh.face_group[f];
      MechBcType mech_type = MechBcType::Neumann;
      if (auto it = bcs.mech.find(gid); gid >= 0 && it != bcs.mech.end()) mech_type = it->second.type;
      switch (mech_type) {
        case MechBcType::Dirichlet:
          layout.mech_kind[s] = static_cast<char>(MechRowKind::Dirichlet);
          break;
        case MechBcType::Neumann:
          layout.mech_kind[s] = static_cast<char>(MechRowKind::Neumann);
          break;
        case MechBcType::Roller: {
          const int axis = normal_axis(mesh.face_normals.col(f));
          if (axis < 0)
            throw ValidationError("roller condition requires an axis-aligned face (face " +
                                  std::to_string(f) + ")");
          layout.mech_kind[s] = static_cast<char>(MechRowKind::Roller);
          layout.roller_axis[s] = axis;
          break;
        }
      }
      layout.mech_slot[s] = layout.n_mech_slots;
      layout.n_mech_slots += dim;

      if (with_flow) {
        FlowBcType flow_type = FlowBcType::Neumann;
        if (auto it = bcs.flow.find(gid); gid >= 0 && it != bcs.flow.end()) flow_type = it->second.type;
        layout.flow_kind[s] = static_cast<char>(
            flow_type == FlowBcType::Dirichlet ? FlowRowKind::Dirichlet : FlowRowKind::Neumann);
        layout.flow_slot[s] = layout.n_flow_slots++;
      }
    }
  }
  return layout;
}

BoundaryValues evaluate_boundary(const Mesh& mesh, const SubGrid& sub,
                                 const BoundaryLayout& layout, const BoundaryConditions& bcs,
                                 double time) {
  const int dim = mesh.dim;
  BoundaryValues values;
  values.flow = Vec::Zero(layout.n_flow_slots);
  values.mech = Vec::Zero(layout.n_mech_slots);

  for (Index s = 0; s < sub.n_subfaces(); ++s) {
    const Vec x = sub.subface_point.col(s);
    const int gid = mesh.face_group[sub.face_of(s)];
    if (layout.mech_slot[s] >= 0) {
      Vec g = Vec::Zero(dim);
      if (auto it = bcs.mech.find(gid); gid >= 0 && it != bcs.mech.end() && it->second.value)
        g = it->second.value(x, time);
      if (g.size() != dim) throw ContractViolation("mechanics boundary value has wrong size");
      values.mech.segment(layout.mech_slot[s], dim) = g;
    }
    if (layout.flow_slot[s] >= 0 && layout.flow(s) != FlowRowKind::Fracture) {
      double g = 0;
      if (auto it = bcs.flow.find(gid); gid >= 0 && it != bcs.flow.end() && it->second.value)
        g = it->second.value(x, time);
      values.flow(layout.flow_slot[s]) = g;
    }
  }
  return values;
}

} // namespace porocontact
