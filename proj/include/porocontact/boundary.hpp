// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>

#include "porocontact/subgrid.hpp"

namespace porocontact {

enum class MechBcType : char { Dirichlet, Neumann, Roller };
enum class FlowBcType : char { Dirichlet, Neumann };

/// Mechanics condition for one tagged face group. For rollers the component
/// along the face normal axis of `value` is the prescribed normal
/// displacement and the remaining components are prescribed tractions.
struct MechBcSpec {
  MechBcType type = MechBcType::Neumann;
  std::function<Vec(const Vec&, double)> value; // g(x, t)
};

struct FlowBcSpec {
  FlowBcType type = FlowBcType::Neumann;
  std::function<double(const Vec&, double)> value; // g(x, t)
};

/// Conditions by mesh group id. Untagged boundary faces and groups without
/// an entry default to zero Neumann (traction-free, sealed).
struct BoundaryConditions {
  std::map<int, MechBcSpec> mech;
  std::map<int, FlowBcSpec> flow;
};

enum class FlowRowKind : char { Interior, Dirichlet, Neumann, Fracture };
enum class MechRowKind : char {
  Interior,
  Dirichlet,
  Neumann,
  Roller,
  FracturePositive,
  FractureNegative,
};

/// Per-subface equation kinds and boundary-data slot numbering. The local
/// gradient systems consume the structure; time-dependent values live in
/// BoundaryValues so condensation runs once.
struct BoundaryLayout {
  bool with_flow = false;
  std::vector<char> flow_kind;  // FlowRowKind per subface
  std::vector<Index> flow_slot; // -1 or scalar slot id
  Index n_flow_slots = 0;
  std::vector<char> mech_kind;  // MechRowKind per subface
  std::vector<Index> mech_slot; // -1 or first of dim slots
  std::vector<int> roller_axis; // axis for Roller subfaces, else -1
  Index n_mech_slots = 0;

  FlowRowKind flow(Index s) const { return static_cast<FlowRowKind>(flow_kind[s]); }
  MechRowKind mech(Index s) const { return static_cast<MechRowKind>(mech_kind[s]); }
};

BoundaryLayout build_boundary_layout(const Mesh& mesh, const SubGrid& sub,
                                     const BoundaryConditions& bcs, bool with_flow);

/// Boundary data evaluated at the continuity points at one time level.
struct BoundaryValues {
  Vec flow; // n_flow_slots
  Vec mech; // n_mech_slots
};

BoundaryValues evaluate_boundary(const Mesh& mesh, const SubGrid& sub,
                                 const BoundaryLayout& layout, const BoundaryConditions& bcs,
                                 double time);

} // namespace porocontact
