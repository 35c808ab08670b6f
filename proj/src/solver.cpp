// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/solver.hpp"

#include <Eigen/SparseLU>

namespace porocontact {

namespace {

class SparseDirectSolver final : public LinearSolver {
public:
  Vec solve(const SparseMat& matrix, const Vec& rhs) override {
    // The blocks mix pascals, meters and the c-scaled contact rows, so the
    // raw matrix is badly equilibrated. Scale rows and columns to unit max
    // magnitude with powers of two (exact in floating point), factor, and
    // polish with iterative refinement.
    const Index n = matrix.rows();
    Vec row_scale = Vec::Zero(n), col_scale = Vec::Zero(n);
    for (Index k = 0; k < matrix.outerSize(); ++k)
      for (SparseMat::InnerIterator it(matrix, k); it; ++it)
        row_scale(it.row()) = std::max(row_scale(it.row()), std::abs(it.value()));
    for (Index i = 0; i < n; ++i) {
      if (row_scale(i) <= 0) throw SolverError("empty matrix row " + std::to_string(i));
      row_scale(i) = std::exp2(-std::round(std::log2(row_scale(i))));
    }
    SparseMat scaled = row_scale.asDiagonal() * matrix;
    for (Index k = 0; k < scaled.outerSize(); ++k)
      for (SparseMat::InnerIterator it(scaled, k); it; ++it)
        col_scale(it.col()) = std::max(col_scale(it.col()), std::abs(it.value()));
    for (Index i = 0; i < n; ++i) {
      if (col_scale(i) <= 0) throw SolverError("empty matrix column " + std::to_string(i));
      col_scale(i) = std::exp2(-std::round(std::log2(col_scale(i))));
    }
    scaled = scaled * col_scale.asDiagonal();

    Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(scaled);
    if (lu.info() != Eigen::Success)
      throw SolverError("sparse LU factorization failed (structurally or numerically singular)");

    const Vec b = row_scale.asDiagonal() * rhs;
    Vec y = lu.solve(b);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    for (int sweep = 0; sweep < 2; ++sweep) {
      const Vec r = b - scaled * y;
      y += lu.solve(r);
    }

    // Backward-error check: the equilibrated matrix has unit-size entries.
    const double rnorm = (scaled * y - b).norm();
    const double scale = y.norm() + b.norm();
    if (!(rnorm <= 1e-8 * std::max(scale, 1e-300)) && scale > 0)
      throw SolverError("direct solve backward error " + std::to_string(rnorm / scale) +
                        " exceeds tolerance");
    return col_scale.asDiagonal() * y;
  }
  std::string name() const override { return "direct"; }
};

} // namespace

std::unique_ptr<LinearSolver> make_linear_solver(const std::string& kind) {
  if (kind == "direct" || kind.empty()) return std::make_unique<SparseDirectSolver>();
  throw ValidationError("unknown linear solver '" + kind + "'");
}

FractureSimulator::FractureSimulator(const Mesh& mesh, const SubGrid& sub,
                                     const FracturePairing& pairing,
                                     const MaterialField& material,
                                     const BoundaryConditions& bcs, const Vec& friction,
                                     const SimulatorOptions& options)
    : mesh_(mesh),
      sub_(sub),
      pairing_(pairing),
      material_(material),
      bcs_(bcs),
      friction_(friction),
      options_(options),
      layout_(build_boundary_layout(mesh, sub, bcs, options.with_flow)),
      ops_(condense(mesh, sub, pairing, material, layout_)),
      biot_(assemble_biot(mesh, sub, ops_, material, layout_, options.dt)),
      solver_(make_linear_solver(options.newton.linear_solver)) {
  if (friction_.size() != pairing.n_pairs())
    throw ContractViolation("friction vector does not match the pairing");
  options_.contact.dynamic = options.contact.dynamic;
  options_.contact.dt = options.dt > 0 ? options.dt : 1.0;

  const int dim = mesh.dim;
  tangents_.resize(dim, (dim - 1) * pairing.n_pairs());
  for (Index r = 0; r < pairing.n_pairs(); ++r)
    tangents_.middleCols(r * (dim - 1), dim - 1) = tangential_basis(pairing.contact_normal.col(r));

  u_ = Vec::Zero(ops_.n_u());
  p_ = Vec::Zero(ops_.n_p());
  lambda_ = Vec::Zero(ops_.n_lambda());
  for (Index r = 0; r < pairing.n_pairs(); ++r)
    lambda_.segment(r * dim, dim) = options_.initial_lambda_n * pairing.contact_normal.col(r);

  bc_ = evaluate_boundary(mesh_, sub_, layout_, bcs_, time_);
  const Vec j = jump_vector();
  jump_prev_ = Eigen::Map<const Mat>(j.data(), dim, pairing.n_pairs());
  div_prev_ = options_.with_flow
                  ? divergence_values(ops_, u_, p_, lambda_, bc_.mech)
                  : Vec::Zero(ops_.n_subcells);
  p_prev_ = p_;
}

Vec FractureSimulator::jump_vector() const {
  Vec j = ops_.jump_u * u_ + ops_.jump_lam * lambda_ + ops_.jump_bc * bc_.mech;
  if (options_.with_flow) j += ops_.jump_p * p_;
  return j;
}

Mat FractureSimulator::jumps() const {
  const Vec j = jump_vector();
  return Eigen::Map<const Mat>(j.data(), mesh_.dim, pairing_.n_pairs());
}

ContactState FractureSimulator::contact_state() const {
  return contact_state_for(u_, p_, lambda_);
}

ContactState FractureSimulator::contact_state_for(const Vec& u, const Vec& p,
                                                  const Vec& lambda) const {
  ContactState st;
  st.dim = mesh_.dim;
  st.normal = pairing_.contact_normal;
  st.tangent = tangents_;
  st.gap = pairing_.gap;
  st.friction = friction_;
  st.lambda = Eigen::Map<const Mat>(lambda.data(), mesh_.dim, pairing_.n_pairs());
  Vec j = ops_.jump_u * u + ops_.jump_lam * lambda + ops_.jump_bc * bc_.mech;
  if (options_.with_flow) j += ops_.jump_p * p;
  st.jump = Eigen::Map<const Mat>(j.data(), mesh_.dim, pairing_.n_pairs());
  st.jump_prev = jump_prev_;
  st.params = options_.contact;
  return st;
}

GlobalSystem FractureSimulator::assemble_iteration_system() const {
  const ContactState st = contact_state();
  const auto sets = classify_subfaces(st);
  const ContactRows rows = linearize_contact_rows(st, sets);
  const ContactAssembly contact = assemble_contact_block(ops_, rows, bc_.mech);
  return combine_system(biot_, contact, bc_, div_prev_, p_prev_);
}

void FractureSimulator::set_state(const Vec& u, const Vec& p, const Vec& lambda) {
  if (u.size() != ops_.n_u() || p.size() != ops_.n_p() || lambda.size() != ops_.n_lambda())
    throw ContractViolation("state vector sizes do not match the system");
  u_ = u;
  p_ = p;
  lambda_ = lambda;
}

double FractureSimulator::weighted_update(const Vec& u_old, const Vec& u_new) const {
  const int dim = mesh_.dim;
  double num = 0, den_old = 0, den_new = 0;
  for (Index c = 0; c < mesh_.n_cells(); ++c) {
    const double m = mesh_.cell_volumes(c);
    num += m * (u_new.segment(c * dim, dim) - u_old.segment(c * dim, dim)).squaredNorm();
    den_old += m * u_old.segment(c * dim, dim).squaredNorm();
    den_new += m * u_new.segment(c * dim, dim).squaredNorm();
  }
  num = std::sqrt(num);
  if (den_old > 0) return num / std::sqrt(den_old);
  if (den_new > 0) return num / std::sqrt(den_new);
  return 0.0;
}

ConvergenceReport FractureSimulator::newton_solve() {
  ConvergenceReport report;
  const Index n_pairs = pairing_.n_pairs();

  for (int iter = 1; iter <= options_.newton.max_iterations; ++iter) {
    ContactState st = contact_state();
    auto sets = classify_subfaces(st);
    if (cold_start_ && iter == 1 && options_.initial_sets) {
      // The documented initial guess: zero displacement and jumps with the
      // prescribed multiplier, every subface in the configured set.
      sets.assign(sets.size(), *options_.initial_sets);
      st.jump.setZero();
      st.jump_prev.setZero();
    }
    std::array<Index, 3> counts{0, 0, 0};
    for (auto s : sets) counts[static_cast<int>(s)]++;

    const ContactRows rows = linearize_contact_rows(st, sets);
    const ContactAssembly contact = assemble_contact_block(ops_, rows, bc_.mech);
    const GlobalSystem sys = combine_system(biot_, contact, bc_, div_prev_, p_prev_);

    const Vec x = solver_->solve(sys.matrix, sys.rhs);
    const Vec u_new = x.head(ops_.n_u());
    const Vec p_new = x.segment(ops_.n_u(), ops_.n_p());
    const Vec lam_new = x.tail(ops_.n_lambda());

    const double eps = weighted_update(u_, u_new);
    double eps_p = 0, eps_l = 0;
    if (options_.newton.gate_on_pressure && p_.size() > 0) {
      const double den = p_.norm();
      eps_p = (p_new - p_).norm() / (den > 0 ? den : std::max(p_new.norm(), 1.0));
    }
    if (options_.newton.gate_on_multiplier && lambda_.size() > 0) {
      const double den = lambda_.norm();
      eps_l = (lam_new - lambda_).norm() / (den > 0 ? den : std::max(lam_new.norm(), 1.0));
    }

    u_ = u_new;
    p_ = p_new;
    lambda_ = lam_new;

    report.iterations = iter;
    report.history.push_back({eps, counts});
    report.sets = counts;

    if (n_pairs == 0) {
      // Without contact the system is linear; one solve is the solution.
      report.converged = true;
      break;
    }
    if (eps < options_.newton.tolerance && eps_p <= options_.newton.tolerance &&
        eps_l <= options_.newton.tolerance) {
      report.converged = true;
      // Final classification for reporting.
      const auto final_sets = classify_subfaces(contact_state());
      report.sets = {0, 0, 0};
      for (auto s : final_sets) report.sets[static_cast<int>(s)]++;
      break;
    }
  }
  cold_start_ = false;
  report_ = report;
  return report;
}

ConvergenceReport FractureSimulator::solve_static() {
  bc_ = evaluate_boundary(mesh_, sub_, layout_, bcs_, time_);
  ConvergenceReport report = newton_solve();
  if (!report.converged)
    throw NonConvergenceError("Newton did not converge in " +
                              std::to_string(options_.newton.max_iterations) + " iterations");
  return report;
}

ConvergenceReport FractureSimulator::advance_time_step() {
  if (!(options_.dt > 0)) throw ContractViolation("time stepping requires a positive dt");
  const double t_new = time_ + options_.dt;
  bc_ = evaluate_boundary(mesh_, sub_, layout_, bcs_, t_new);
  ConvergenceReport report = newton_solve();
  if (!report.converged)
    throw NonConvergenceError("Newton did not converge at t = " + std::to_string(t_new));

  const Vec j = jump_vector();
  jump_prev_ = Eigen::Map<const Mat>(j.data(), mesh_.dim, pairing_.n_pairs());
  if (options_.with_flow) div_prev_ = divergence_values(ops_, u_, p_, lambda_, bc_.mech);
  p_prev_ = p_;
  time_ = t_new;
  step_++;
  return report;
}

} // namespace porocontact
