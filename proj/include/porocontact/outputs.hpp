// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "porocontact/contact.hpp"
#include "porocontact/subgrid.hpp"

namespace porocontact {

struct RunReport;

/// Legacy ASCII VTK unstructured grid with cell data: displacement padded to
/// three components, pressure when present.
void write_vtk_cells(const std::string& path, const Mesh& mesh, const Vec& u, const Vec& p);

/// Face-piecewise-constant fracture fields: the multiplier as the
/// area-weighted sum of the subface values, the jump as the subface average.
struct FractureFaceData {
  std::vector<Index> faces; // positive faces, ascending
  std::vector<int> fracture;
  Mat centroid; // dim x n
  Vec area;
  Mat lambda; // dim x n
  Mat jump;   // dim x n
  std::vector<ContactSet> label;
};

FractureFaceData aggregate_fracture_faces(const Mesh& mesh, const SubGrid& sub,
                                          const FracturePairing& pairing, const Mat& lambda,
                                          const Mat& jump, const std::vector<ContactSet>* sets);

/// CSV table of the per-face fracture state (normal/tangential multiplier
/// and jump, set label).
void write_fracture_csv(const std::string& path, const Mesh& mesh,
                        const FractureFaceData& data, const FracturePairing& pairing);

void write_report_text(const std::string& path, const RunReport& report);

} // namespace porocontact
