// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/outputs.hpp"
#include "porocontact/scenario.hpp"

namespace porocontact {

/// Point-in-cell queries on a simplicial mesh via a uniform bin grid, with a
/// nearest-center fallback for points on cell boundaries.
class CellLocator {
public:
  explicit CellLocator(const Mesh& mesh);
  Index locate(const Vec& x) const;

private:
  const Mesh& mesh_;
  Vec lo_, hi_;
  std::array<int, 3> bins_{1, 1, 1};
  std::vector<std::vector<Index>> cells_;
  Index bin_of(const Vec& x) const;
};

/// Relative L2 error of a piecewise-constant cell field against a reference
/// field on a finer mesh of the same domain (integration over the reference
/// cells).
double relative_error_cells(const Mesh& coarse, const Mat& coarse_field, const Mesh& ref,
                            const Mat& ref_field);

/// Relative L2 errors per fracture of face-piecewise-constant fields on the
/// positive side (integration over the reference fracture faces). Zero
/// reference norm with zero deviation counts as zero error.
Vec relative_error_fracture(const Mesh& coarse, const FractureFaceData& coarse_data,
                            const Mesh& ref, const FractureFaceData& ref_data,
                            int n_fractures, bool use_lambda);

/// Observed orders log2(e_h / e_{h/2}) between consecutive levels.
Vec pairwise_orders(const Vec& errors);
/// Least-squares slope of log2(error) against the refinement level.
double order_slope(const Vec& errors);

struct StudyResult {
  std::vector<Index> cells;        // per mesh, coarse to reference
  std::vector<int> iterations;     // Newton iterations (max over steps)
  Vec eps_u;                       // per coarse level, cell displacement on Omega
  Mat eps_lambda;                  // n_fractures x coarse levels
  Mat eps_jump;                    // n_fractures x coarse levels
  int n_fractures = 0;
};

/// Solves the scenario on a factor-two refinement hierarchy (n_meshes
/// total); the finest mesh is the reference solution.
StudyResult run_convergence_study(const ScenarioConfig& base, int n_meshes);

void write_convergence_csv(const std::string& path, const StudyResult& result);

} // namespace porocontact
