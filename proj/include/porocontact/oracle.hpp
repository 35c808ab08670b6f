// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porocontact/solver.hpp"

namespace porocontact {

/// Closed-form reference fields with derived flux and stress; the
/// self-consistency check differentiates the closures numerically.
struct AnalyticField {
  std::function<Vec(const Vec&)> displacement;
  std::function<Mat(const Vec&)> stress; // effective stress of u (no pressure part)
  std::function<double(const Vec&)> pressure;
  std::function<Vec(const Vec&)> flux_density; // -K grad p

  /// Max relative mismatch between the stress/flux closures and central
  /// differences of displacement/pressure at random points in [lo, hi].
  double self_consistency_error(const Vec& lo, const Vec& hi, double G, double lambda, double K,
                                int n_points, unsigned seed) const;

  static AnalyticField affine(const Mat& grad_u, const Vec& u0, double G, double lambda,
                              const Vec& grad_p, double p0, double K);
};

/// Reconstructs subface fluxes/tractions from the exact cell values of an
/// affine field with matching Dirichlet data and reports the max relative
/// deviation from the analytic values. No fractures allowed.
struct PatchTestResult {
  double flux_error = 0;
  double traction_error = 0;
};
PatchTestResult patch_test(const Mesh& mesh, const MaterialField& material,
                           const AnalyticField& field, bool with_flow);

/// One-dimensional consolidation column: undrained initial pressure and the
/// standard drained-top series solution.
struct TerzaghiSeries {
  double p0 = 0;       // undrained pressure
  double cv = 0;       // consolidation coefficient
  double height = 1;   // drainage path length
  double top = 1;      // coordinate of the drained surface
  /// Pressure at vertical coordinate z (drained surface at z = top).
  double pressure(double z, double t) const;
};

TerzaghiSeries make_terzaghi(double load, double alpha, double c0, double G, double lambda,
                             double K, double height, double top);

/// Volume-weighted relative L2 distance of the cell pressures to the series
/// at time t.
double terzaghi_l2_error(const Mesh& mesh, const Vec& p, const TerzaghiSeries& series, double t);

/// Raw per-subface violations of the nonpenetration and Coulomb conditions.
struct KktResidual {
  Vec tension;         // max(lambda_n, 0)
  Vec penetration;     // max([u]_n - g, 0)
  Vec complementarity; // |lambda_n ([u]_n - g)|
  Vec coulomb;         // max(||lambda_tau|| - F |lambda_n|, 0)
  Vec direction;       // stick: c*||v_tau||; slide: misalignment of lambda_tau and v_tau

  /// Largest violation with length-dimensioned entries scaled by c so every
  /// term carries traction units.
  double max_scaled(double c) const;
};
KktResidual kkt_residual(const ContactState& state);

/// Central-difference audit of the assembled Newton operator. Biot rows are
/// linear and compared directly; contact rows are compared against the exact
/// linearization of the complementarity functions through a fitted
/// invertible per-subface row transform (the assembled rows are a
/// row-equivalent reduction of that system). States within the guard band of
/// an active-set boundary are flagged inconclusive, not failed.
struct FdJacobianResult {
  double max_mismatch = 0;
  double biot_mismatch = 0;
  int n_checked = 0;
  int n_inconclusive = 0;
};

FdJacobianResult fd_jacobian_check(FractureSimulator& sim, const Vec& u, const Vec& p,
                                   const Vec& lambda, int n_probes, unsigned seed);

/// Builds a randomized smooth state of the requested set type on the given
/// problem and audits it. Returns the audit of `n_states` states.
FdJacobianResult fd_audit_random_states(FractureSimulator& sim, ContactSet target, int n_states,
                                        unsigned seed);

} // namespace porocontact
