// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <optional>

#include "porocontact/assembly.hpp"

namespace porocontact {

/// Newton loop controls. The update criterion follows the relative
/// displacement change; the optional pressure/multiplier gates are off by
/// default.
struct NewtonConfig {
  double tolerance = 1e-10;
  int max_iterations = 50;
  bool gate_on_pressure = false;
  bool gate_on_multiplier = false;
  std::string linear_solver = "direct";
};

/// Pluggable linear solve behind the assembled block system.
class LinearSolver {
public:
  virtual ~LinearSolver() = default;
  virtual Vec solve(const SparseMat& matrix, const Vec& rhs) = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<LinearSolver> make_linear_solver(const std::string& kind);

struct IterationRecord {
  double update = 0;                  // relative displacement change
  std::array<Index, 3> sets{0, 0, 0}; // |I_n|, |I_tau|, |A| used in the solve
};

struct ConvergenceReport {
  bool converged = false;
  int iterations = 0;
  std::vector<IterationRecord> history;
  std::array<Index, 3> sets{0, 0, 0}; // final classification
};

struct SimulatorOptions {
  bool with_flow = false;
  double dt = 0; // positive when flow rows are present
  ContactParams contact;
  NewtonConfig newton;
  double initial_lambda_n = -100.0; // Pa
  // Set assignment of the very first Newton iteration (the initial guess is
  // "all subfaces sticking" unless the scenario starts traction-free, which
  // assigns the open set). Later iterations always classify.
  std::optional<ContactSet> initial_sets = ContactSet::Stick;
};

/// Backward Euler time stepping with a semismooth Newton solve per step.
/// Holds references to the mesh bundle owned by the caller.
class FractureSimulator {
public:
  FractureSimulator(const Mesh& mesh, const SubGrid& sub, const FracturePairing& pairing,
                    const MaterialField& material, const BoundaryConditions& bcs,
                    const Vec& friction, const SimulatorOptions& options);

  const Vec& displacement() const { return u_; }
  const Vec& pressure() const { return p_; }
  const Vec& multiplier() const { return lambda_; }
  double time() const { return time_; }
  int step() const { return step_; }
  const CondensedOperators& operators() const { return ops_; }
  const BoundaryLayout& layout() const { return layout_; }
  const BiotOperator& biot() const { return biot_; }
  const BoundaryValues& boundary_values() const { return bc_; }
  const ConvergenceReport& last_report() const { return report_; }
  const SimulatorOptions& options() const { return options_; }
  const FracturePairing& pairing() const { return pairing_; }
  const Mesh& mesh() const { return mesh_; }
  const Vec& friction() const { return friction_; }

  /// Current iterate as a contact state (jumps recomputed from the state).
  ContactState contact_state() const;
  /// Contact state of an arbitrary state vector under the current boundary
  /// data (linearization audits).
  ContactState contact_state_for(const Vec& u, const Vec& p, const Vec& lambda) const;
  Mat jumps() const;

  /// Single equilibrium solve at the current clock (static problems).
  ConvergenceReport solve_static();

  /// Re-evaluates boundary data at time + dt, solves, and shifts the
  /// previous-step caches. Throws NonConvergenceError at the iteration cap,
  /// keeping the last iterate accessible.
  ConvergenceReport advance_time_step();

  /// Assembles the linear system of the next Newton iteration without
  /// solving it (audits and tests).
  GlobalSystem assemble_iteration_system() const;

  void set_state(const Vec& u, const Vec& p, const Vec& lambda);

private:
  ConvergenceReport newton_solve();
  Vec jump_vector() const;
  double weighted_update(const Vec& u_old, const Vec& u_new) const;

  const Mesh& mesh_;
  const SubGrid& sub_;
  const FracturePairing& pairing_;
  const MaterialField& material_;
  const BoundaryConditions& bcs_;
  Vec friction_;
  SimulatorOptions options_;

  BoundaryLayout layout_;
  CondensedOperators ops_;
  BiotOperator biot_;
  std::unique_ptr<LinearSolver> solver_;
  Mat tangents_; // dim x (dim-1)*n_pairs

  BoundaryValues bc_;
  Vec u_, p_, lambda_;
  Vec div_prev_;
  Vec p_prev_;
  Mat jump_prev_;
  double time_ = 0;
  int step_ = 0;
  bool cold_start_ = true;
  ConvergenceReport report_;
};

} // namespace porocontact
