// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include "porocontact/mesh.hpp"

namespace porocontact {

/// Reads a version-2.2 ASCII interchange mesh (nodes, simplex elements,
/// physical groups). Line/triangle elements with a physical tag become named
/// face groups; triangles/tets are the cells depending on the mesh dimension.
RawMesh read_msh(const std::string& path);
RawMesh read_msh(std::istream& in, const std::string& label);

/// Writes the raw mesh in the same layout; a read_msh round trip reproduces
/// the input exactly.
void write_msh(const RawMesh& raw, const std::string& path);

} // namespace porocontact
