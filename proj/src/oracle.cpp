// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/oracle.hpp"

#include <cmath>
#include <random>

#include "porocontact/fvm_local.hpp"

namespace porocontact {

// ---------------------------------------------------------------------------
// Analytic fields
// ---------------------------------------------------------------------------

AnalyticField AnalyticField::affine(const Mat& grad_u, const Vec& u0, double G, double lambda,
                                    const Vec& grad_p, double p0, double K) {
  const int dim = static_cast<int>(grad_u.rows());
  AnalyticField f;
  f.displacement = [grad_u, u0](const Vec& x) { return Vec(grad_u * x + u0); };
  const Mat sigma =
      G * (grad_u + grad_u.transpose()) + lambda * grad_u.trace() * Mat::Identity(dim, dim);
  f.stress = [sigma](const Vec&) { return sigma; };
  f.pressure = [grad_p, p0](const Vec& x) { return grad_p.dot(x) + p0; };
  f.flux_density = [grad_p, K](const Vec&) { return Vec(-K * grad_p); };
  return f;
}

double AnalyticField::self_consistency_error(const Vec& lo, const Vec& hi, double G,
                                             double lambda, double K, int n_points,
                                             unsigned seed) const {
  const int dim = static_cast<int>(lo.size());
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0, 1);
  const double h = 1e-6 * (hi - lo).norm();
  double worst = 0;
  for (int trial = 0; trial < n_points; ++trial) {
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x(k) = lo(k) + uni(rng) * (hi(k) - lo(k));
    Mat grad(dim, dim);
    Vec gp(dim);
    for (int j = 0; j < dim; ++j) {
      Vec dx = Vec::Zero(dim);
      dx(j) = h;
      grad.col(j) = (displacement(x + dx) - displacement(x - dx)) / (2 * h);
      gp(j) = (pressure(x + dx) - pressure(x - dx)) / (2 * h);
    }
    const Mat sigma_fd =
        G * (grad + grad.transpose()) + lambda * grad.trace() * Mat::Identity(dim, dim);
    const Mat sigma = stress(x);
    worst = std::max(worst, (sigma_fd - sigma).norm() / std::max(1.0, sigma.norm()));
    const Vec q = flux_density(x);
    worst = std::max(worst, (Vec(-K * gp) - q).norm() / std::max(1.0, q.norm()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Patch test
// ---------------------------------------------------------------------------

PatchTestResult patch_test(const Mesh& mesh, const MaterialField& material,
                           const AnalyticField& field, bool with_flow) {
  if (mesh.n_fractures() > 0) throw ContractViolation("patch tests run on unfractured meshes");
  const int dim = mesh.dim;

  BoundaryConditions bcs;
  for (int g = 0; g < static_cast<int>(mesh.group_names.size()); ++g) {
    bcs.mech[g] = {MechBcType::Dirichlet,
                   [&field](const Vec& x, double) { return field.displacement(x); }};
    if (with_flow)
      bcs.flow[g] = {FlowBcType::Dirichlet,
                     [&field](const Vec& x, double) { return field.pressure(x); }};
  }
  // Untagged boundary faces would default to Neumann; the patch test needs
  // Dirichlet data everywhere.
  for (Index f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face_kind[f] == FaceKind::Boundary && mesh.face_group[f] < 0)
      throw ContractViolation("patch test requires fully tagged boundaries");

  const SubGrid sub = build_subgrid(mesh);
  const FracturePairing pairing = pair_fracture_sides(mesh, sub);
  const BoundaryLayout layout = build_boundary_layout(mesh, sub, bcs, with_flow);
  const CondensedOperators ops = condense(mesh, sub, pairing, material, layout);
  const BoundaryValues bc = evaluate_boundary(mesh, sub, layout, bcs, 0.0);

  Vec u(ops.n_u()), p(ops.n_p());
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    u.segment(c * dim, dim) = field.displacement(mesh.cell_centers.col(c));
    if (with_flow) p(c) = field.pressure(mesh.cell_centers.col(c));
  }
  const auto q = reconstruct_subface_quantities(mesh, sub, pairing, material, layout, ops, u, p,
                                                Vec::Zero(0), bc);

  PatchTestResult result;
  double flux_scale = 0, trac_scale = 0, flux_err = 0, trac_err = 0;
  for (Index s = 0; s < sub.n_subfaces(); ++s) {
    const Index f = sub.face_of(s);
    const Vec x = sub.subface_point.col(s);
    for (int side = 0; side < 2; ++side) {
      const Index c = mesh.face_cells[f][side];
      if (c < 0) continue;
      const Vec n = mesh.outward_normal(c, f);
      const double m = sub.subface_area(s);
      if (with_flow) {
        const double exact = m * field.flux_density(x).dot(n);
        flux_err = std::max(flux_err, std::abs(q.flux(2 * s + side) - exact));
        flux_scale = std::max(flux_scale, std::abs(exact));
      }
      Mat total = field.stress(x);
      total -= material.biot_alpha(c) * field.pressure(x) * Mat::Identity(dim, dim);
      const Vec exact_t = m * total * n;
      trac_err = std::max(trac_err, (q.traction.col(2 * s + side) - exact_t).norm());
      trac_scale = std::max(trac_scale, exact_t.norm());
    }
  }
  result.flux_error = with_flow ? flux_err / std::max(flux_scale, 1e-300) : 0.0;
  result.traction_error = trac_err / std::max(trac_scale, 1e-300);
  return result;
}

// ---------------------------------------------------------------------------
// Consolidation series
// ---------------------------------------------------------------------------

TerzaghiSeries make_terzaghi(double load, double alpha, double c0, double G, double lambda,
                             double K, double height, double top) {
  TerzaghiSeries s;
  const double m_inverse = lambda + 2 * G; // uniaxial-strain modulus
  s.p0 = alpha * load / (c0 * m_inverse + alpha * alpha);
  s.cv = K / (c0 + alpha * alpha / m_inverse);
  s.height = height;
  s.top = top;
  return s;
}

double TerzaghiSeries::pressure(double z, double t) const {
  const double depth = top - z; // distance below the drained surface
  if (t <= 0) return p0;
  double sum = 0;
  for (int j = 0; j < 200000; ++j) {
    const double k = (2 * j + 1) * M_PI / (2 * height);
    const double amplitude = 4.0 / ((2 * j + 1) * M_PI) * std::exp(-k * k * cv * t);
    if (amplitude < 1e-12) break;
    sum += amplitude * std::sin(k * depth);
  }
  return p0 * sum;
}

double terzaghi_l2_error(const Mesh& mesh, const Vec& p, const TerzaghiSeries& series, double t) {
  if (p.size() != mesh.n_cells()) throw ContractViolation("pressure vector size mismatch");
  double num = 0, den = 0;
  const int vertical = mesh.dim - 1;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const double exact = series.pressure(mesh.cell_centers(vertical, c), t);
    const double m = mesh.cell_volumes(c);
    num += m * (p(c) - exact) * (p(c) - exact);
    den += m * exact * exact;
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// ---------------------------------------------------------------------------
// KKT audit
// ---------------------------------------------------------------------------

KktResidual kkt_residual(const ContactState& state) {
  state.check_sizes();
  const Index n = state.size();
  KktResidual res;
  res.tension.resize(n);
  res.penetration.resize(n);
  res.complementarity.resize(n);
  res.coulomb.resize(n);
  res.direction.resize(n);
  for (Index r = 0; r < n; ++r) {
    const double ln = state.lambda_n(r);
    const double sep = state.jump_n(r) - state.gap(r);
    const Vec lt = state.lambda_tau(r);
    const Vec vt = state.velocity_tau(r);
    const double bound = state.friction(r) * std::abs(ln);
    res.tension(r) = std::max(ln, 0.0);
    res.penetration(r) = std::max(sep, 0.0);
    res.complementarity(r) = std::abs(ln * sep);
    res.coulomb(r) = std::max(lt.norm() - bound, 0.0);
    if (lt.norm() < bound * (1.0 - 1e-10) || bound == 0.0) {
      // Strictly inside the cone (or traction-free): no sliding allowed.
      res.direction(r) = state.params.c * vt.norm();
    } else {
      // At the bound: the velocity must oppose the tangential multiplier.
      const double vn = vt.norm();
      res.direction(r) = vn > 0 ? (lt + lt.norm() * (vt / vn)).norm() : 0.0;
    }
  }
  return res;
}

double KktResidual::max_scaled(double c) const {
  double worst = 0;
  for (Index r = 0; r < tension.size(); ++r) {
    worst = std::max(worst, tension(r));
    worst = std::max(worst, c * penetration(r));
    worst = std::max(worst, std::sqrt(std::max(0.0, complementarity(r)) * c));
    worst = std::max(worst, coulomb(r));
    worst = std::max(worst, direction(r));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Finite-difference Jacobian audit
// ---------------------------------------------------------------------------

namespace {

// Complementarity residual of one state, stacked (C_n; C_tau) per subface.
Mat contact_residual(const FractureSimulator& sim, const Vec& u, const Vec& p,
                     const Vec& lambda) {
  const ContactState st = sim.contact_state_for(u, p, lambda);
  const auto comp = evaluate_complementarity(st);
  Mat out(st.dim, st.size());
  out.row(0) = comp.normal.transpose();
  out.bottomRows(st.dim - 1) = comp.tangent;
  return out;
}

// Guard band: any classifying quantity within 1e-6 of switching makes the
// subface inconclusive for the audit.
bool near_set_boundary(const ContactState& st, Index r) {
  const double b = st.friction_bound(r);
  const Vec s = -st.lambda_tau(r) + st.params.c * st.velocity_tau(r);
  const double scale = st.friction(r) *
                       (std::abs(st.lambda_n(r)) +
                        st.params.c * (std::abs(st.jump_n(r)) + std::abs(st.gap(r))) + 1e-300);
  if (std::abs(b) <= 1e-6 * std::max(scale, s.norm())) return true;
  if (b > 0 && std::abs(s.norm() - b) <= 1e-6 * std::max(b, s.norm())) return true;
  return false;
}

} // namespace

FdJacobianResult fd_jacobian_check(FractureSimulator& sim, const Vec& u, const Vec& p,
                                   const Vec& lambda, int n_probes, unsigned seed) {
  const int dim = sim.mesh().dim;
  const Index n_pairs = sim.pairing().n_pairs();
  const Index nu = u.size(), np = p.size(), nl = lambda.size();
  const Index n = nu + np + nl;

  sim.set_state(u, p, lambda);
  const GlobalSystem sys = sim.assemble_iteration_system();
  Vec x(n);
  x << u, p, lambda;

  FdJacobianResult result;

  const ContactState st0 = sim.contact_state_for(u, p, lambda);
  std::vector<char> usable(n_pairs, 1);
  for (Index r = 0; r < n_pairs; ++r)
    if (near_set_boundary(st0, r)) {
      usable[r] = 0;
      result.n_inconclusive++;
    }

  // Block-scaled probe directions keep the perturbation meaningful across
  // the disparate variable magnitudes.
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0, 1);
  const double su = std::max(u.size() ? u.cwiseAbs().maxCoeff() : 0.0, 1e-9);
  const double sp = np > 0 ? std::max(p.cwiseAbs().maxCoeff(), 1.0) : 0.0;
  const double sl = std::max(nl > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0, 1.0);
  const double h = 1e-6;

  Mat probes(n, n_probes);
  for (int k = 0; k < n_probes; ++k) {
    for (Index i = 0; i < nu; ++i) probes(i, k) = su * gauss(rng);
    for (Index i = 0; i < np; ++i) probes(nu + i, k) = sp * gauss(rng);
    for (Index i = 0; i < nl; ++i) probes(nu + np + i, k) = sl * gauss(rng);
  }

  // Assembled operator actions.
  Mat assembled(n, n_probes);
  for (int k = 0; k < n_probes; ++k) assembled.col(k) = sys.matrix * probes.col(k);

  // Biot rows are linear in the state; the residual (matrix * y - rhs) must
  // differentiate to the matrix action at roundoff level.
  const Index n_biot = nu + np;
  for (int k = 0; k < n_probes; ++k) {
    const Vec rpl = sys.matrix * (x + h * probes.col(k)) - sys.rhs;
    const Vec rmi = sys.matrix * (x - h * probes.col(k)) - sys.rhs;
    const Vec fd = (rpl - rmi) / (2 * h);
    const double scale = std::max(assembled.col(k).head(n_biot).norm(), 1e-300);
    result.biot_mismatch = std::max(
        result.biot_mismatch, (fd.head(n_biot) - assembled.col(k).head(n_biot)).norm() / scale);
  }

  if (n_pairs == 0) return result;

  // Central differences of the complementarity residual per probe.
  std::vector<Mat> fd(n_probes);
  for (int k = 0; k < n_probes; ++k) {
    const Vec xp = x + h * probes.col(k);
    const Vec xm = x - h * probes.col(k);
    const Mat rp = contact_residual(sim, xp.head(nu), xp.segment(nu, np), xp.tail(nl));
    const Mat rm = contact_residual(sim, xm.head(nu), xm.segment(nu, np), xm.tail(nl));
    fd[k] = (rp - rm) / (2 * h);
  }
  const Mat r0 = contact_residual(sim, u, p, lambda);

  for (Index r = 0; r < n_pairs; ++r) {
    if (!usable[r]) continue;
    Mat F(dim, n_probes), A(dim, n_probes);
    for (int k = 0; k < n_probes; ++k) {
      F.col(k) = fd[k].col(r);
      A.col(k) = assembled.col(k).segment(n_biot + r * dim, dim);
    }
    // The assembled rows are a row-equivalent reduction of the exact Newton
    // rows: fit the invertible per-subface transform and compare.
    const Mat FFt = F * F.transpose();
    const Mat T = (A * F.transpose()) * FFt.inverse();
    const double scale = std::max(A.norm(), 1e-300);
    result.max_mismatch = std::max(result.max_mismatch, (A - T * F).norm() / scale);

    // Right-hand side consistency: A x - rhs = T * R(x).
    const Vec lhs = (sys.matrix * x - sys.rhs).segment(n_biot + r * dim, dim);
    const Vec rhs_t = T * r0.col(r);
    const double rscale = std::max({lhs.norm(), rhs_t.norm(), scale * h});
    result.max_mismatch = std::max(result.max_mismatch, (lhs - rhs_t).norm() / rscale);
    result.n_checked++;
  }
  return result;
}

FdJacobianResult fd_audit_random_states(FractureSimulator& sim, ContactSet target, int n_states,
                                        unsigned seed) {
  const int dim = sim.mesh().dim;
  const int nt = dim - 1;
  const Index n_pairs = sim.pairing().n_pairs();
  const Index nu = sim.operators().n_u();
  const Index np = sim.operators().n_p();
  const double c = sim.options().contact.c;

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0, 1);

  FdJacobianResult total;
  int produced = 0;
  for (int attempt = 0; attempt < 50 * n_states && produced < n_states; ++attempt) {
    Vec u(nu), p = Vec::Zero(np);
    for (Index i = 0; i < nu; ++i) u(i) = 1e-3 * gauss(rng);
    for (Index i = 0; i < np; ++i) p(i) = 1e5 * gauss(rng);

    // Choose multipliers putting every subface well inside the target set.
    Vec lambda = Vec::Zero(dim * n_pairs);
    const ContactState st0 = sim.contact_state_for(u, p, lambda);
    bool ok = true;
    for (Index r = 0; r < n_pairs && ok; ++r) {
      const double jn = st0.jump_n(r);
      const Vec vt = st0.velocity_tau(r);
      const double F = st0.friction(r);
      const Vec n = st0.normal.col(r);
      const Mat tau = st0.tangent.middleCols(r * nt, nt);
      const double shift = c * (jn - st0.gap(r));
      double ln = 0;
      Vec lt = Vec::Zero(nt);
      switch (target) {
        case ContactSet::Open: {
          const double margin = c * (vt.norm() + std::abs(jn - st0.gap(r)) + 1e-5);
          ln = shift + margin / F;
          break;
        }
        case ContactSet::Stick: {
          const double B = 2.0 * (c * vt.norm() + c * 1e-5);
          Vec dir(nt);
          for (int k = 0; k < nt; ++k) dir(k) = gauss(rng);
          if (dir.norm() < 1e-12) dir(0) = 1;
          dir.normalize();
          lt = c * vt - 0.5 * B * dir;
          ln = shift - B / F;
          break;
        }
        case ContactSet::Slide: {
          if (vt.norm() < 1e-9) {
            ok = false;
            break;
          }
          const double B = c * vt.norm();
          const Vec dir = vt / vt.norm();
          lt = c * vt - 1.5 * B * dir; // = -B/2 * dir: inside the Coulomb cone
          ln = shift - B / F;
          break;
        }
      }
      lambda.segment(r * dim, dim) = ln * n + tau * lt;
    }
    if (!ok) continue;

    // The multiplier feeds back into the jumps through the trace stencils;
    // accept the state only if the realized classification matches.
    const ContactState st1 = sim.contact_state_for(u, p, lambda);
    const auto sets = classify_subfaces(st1);
    bool match = true;
    for (Index r = 0; r < n_pairs; ++r) {
      match = match && sets[r] == target && !near_set_boundary(st1, r);
      if (target == ContactSet::Slide)
        match = match && st1.lambda_tau(r).norm() <= st1.friction_bound(r);
    }
    if (!match) continue;

    const FdJacobianResult one =
        fd_jacobian_check(sim, u, p, lambda, 2 * dim + 4, seed + 1000 + produced);
    if (one.n_inconclusive > 0) continue;
    total.max_mismatch = std::max(total.max_mismatch, one.max_mismatch);
    total.biot_mismatch = std::max(total.biot_mismatch, one.biot_mismatch);
    total.n_checked += one.n_checked;
    produced++;
  }
  if (produced < n_states)
    throw Error("could not realize enough smooth states for the Jacobian audit");
  return total;
}

} // namespace porocontact
