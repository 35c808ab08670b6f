// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#include "porocontact/contact.hpp"

#include <cmath>

namespace porocontact {

Mat tangential_basis(const Vec& normal) {
  const int dim = static_cast<int>(normal.size());
  Mat t(dim, dim - 1);
  if (dim == 2) {
    t(0, 0) = -normal(1);
    t(1, 0) = normal(0);
  } else {
    int smallest = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(normal(k)) < std::abs(normal(smallest))) smallest = k;
    Vec e = Vec::Zero(3);
    e(smallest) = 1.0;
    Vec t1 = e - e.dot(normal) * normal;
    t1.normalize();
    t.col(0) = t1;
    t.col(1) = Eigen::Vector3d(normal).cross(Eigen::Vector3d(t1));
  }
  return t;
}

Vec ContactState::lambda_tau(Index r) const {
  const int nt = dim - 1;
  return tangent.middleCols(r * nt, nt).transpose() * lambda.col(r);
}

Vec ContactState::velocity_tau(Index r) const {
  const int nt = dim - 1;
  Vec j = jump.col(r);
  if (params.dynamic) j = (j - jump_prev.col(r)) / params.dt;
  return tangent.middleCols(r * nt, nt).transpose() * j;
}

double ContactState::friction_bound(Index r) const {
  return friction(r) * (-lambda_n(r) + params.c * (jump_n(r) - gap(r)));
}

void ContactState::check_sizes() const {
  const Index n = gap.size();
  if (normal.cols() != n || tangent.cols() != (dim - 1) * n || friction.size() != n ||
      lambda.cols() != n || jump.cols() != n || jump_prev.cols() != n)
    throw ContractViolation("contact state arrays have inconsistent sizes");
}

Complementarity evaluate_complementarity(const ContactState& state) {
  state.check_sizes();
  if (!(state.params.c > 0)) throw ValidationError("contact parameter c must be positive");
  const int nt = state.dim - 1;
  Complementarity out;
  out.normal.resize(state.size());
  out.tangent.resize(nt, state.size());
  for (Index r = 0; r < state.size(); ++r) {
    if (!(state.friction(r) > 0))
      throw ValidationError("friction coefficient must be positive (subface " +
                            std::to_string(r) + ")");
    const double b = state.friction_bound(r);
    const Vec lt = state.lambda_tau(r);
    const Vec s = -lt + state.params.c * state.velocity_tau(r);
    out.normal(r) = -state.lambda_n(r) - std::max(0.0, b) / state.friction(r);
    out.tangent.col(r) = std::max(b, s.norm()) * (-lt) - std::max(0.0, b) * s;
  }
  return out;
}

std::vector<ContactSet> classify_subfaces(const ContactState& state) {
  state.check_sizes();
  std::vector<ContactSet> sets(state.size());
  for (Index r = 0; r < state.size(); ++r) {
    const double b = state.friction_bound(r);
    if (b <= 0) {
      sets[r] = ContactSet::Open;
      continue;
    }
    const Vec s = -state.lambda_tau(r) + state.params.c * state.velocity_tau(r);
    sets[r] = s.norm() < b ? ContactSet::Stick : ContactSet::Slide;
  }
  return sets;
}

SlideCoefficients slide_coefficients(const ContactState& state, Index r, bool regularize) {
  const int nt = state.dim - 1;
  const double c = state.params.c;
  const Vec lt = state.lambda_tau(r);
  const Vec s = -lt + c * state.velocity_tau(r);
  const double ns = s.norm();
  const double b = state.friction_bound(r);
  if (!(ns > 0))
    throw Error("sliding subface " + std::to_string(r) + " with zero trial direction");
  if (!(b > 0)) throw Error("sliding subface " + std::to_string(r) + " with nonpositive bound");

  SlideCoefficients sc;
  sc.b = b;
  sc.e = b / ns;
  const Mat eye = Mat::Identity(nt, nt);

  const double nl = lt.norm();
  double qscale = b;
  if (regularize) qscale = std::max(b, nl);
  sc.Q = (-lt) * s.transpose() / (qscale * ns);

  sc.beta = 1.0;
  if (regularize) {
    double alpha = 0.0;
    if (nl > 0) alpha = (-lt).dot(s) / (nl * ns);
    const double delta = std::min(nl / b, 1.0);
    if (alpha < 0) sc.beta = 1.0 / (1.0 - alpha * delta);
  }

  sc.M = sc.e * (eye - sc.Q);
  const Mat inv = (eye - sc.beta * sc.M).inverse();
  sc.L = c * (inv - eye);
  sc.v = inv * (s / ns);
  sc.r = -inv * sc.e * (sc.Q * s);
  return sc;
}

ContactRows linearize_contact_rows(const ContactState& state,
                                   const std::vector<ContactSet>& sets) {
  state.check_sizes();
  if (sets.size() != static_cast<size_t>(state.size()))
    throw ContractViolation("set labels do not match the contact state");

  const int dim = state.dim;
  const int nt = dim - 1;
  const double vel_scale = state.params.dynamic ? 1.0 / state.params.dt : 1.0;

  ContactRows rows;
  rows.sets = sets;
  rows.jump_coeff.assign(state.size(), Mat::Zero(dim, dim));
  rows.lambda_coeff.assign(state.size(), Mat::Zero(dim, dim));
  rows.rhs = Mat::Zero(dim, state.size());

  for (Index r = 0; r < state.size(); ++r) {
    Mat& J = rows.jump_coeff[r];
    Mat& Lm = rows.lambda_coeff[r];
    const Vec n = state.normal.col(r);
    const Mat tau = state.tangent.middleCols(r * nt, nt);

    switch (sets[r]) {
      case ContactSet::Open:
        Lm = Mat::Identity(dim, dim);
        break;
      case ContactSet::Stick: {
        // Contact in the normal direction.
        J.row(0) = n.transpose();
        rows.rhs(0, r) = state.gap(r);
        // Tangential velocity driven to zero through the multiplier.
        const double b = state.friction_bound(r);
        const Vec vt = state.velocity_tau(r);
        for (int a = 0; a < nt; ++a) {
          J.row(1 + a) = vel_scale * tau.col(a).transpose();
          Lm.row(1 + a) = -(state.friction(r) * vt(a) / b) * n.transpose();
          double rhs = vt(a);
          if (state.params.dynamic)
            rhs += vel_scale * tau.col(a).dot(state.jump_prev.col(r));
          rows.rhs(1 + a, r) = rhs;
        }
        break;
      }
      case ContactSet::Slide: {
        J.row(0) = n.transpose();
        rows.rhs(0, r) = state.gap(r);
        const SlideCoefficients sc = slide_coefficients(state, r, true);
        for (int a = 0; a < nt; ++a) {
          Lm.row(1 + a) = tau.col(a).transpose() - state.friction(r) * sc.v(a) * n.transpose();
          Eigen::RowVectorXd jrow = Eigen::RowVectorXd::Zero(dim);
          for (int bcol = 0; bcol < nt; ++bcol)
            jrow += sc.L(a, bcol) * vel_scale * tau.col(bcol).transpose();
          J.row(1 + a) += jrow;
          double rhs = sc.r(a) + sc.b * sc.v(a);
          if (state.params.dynamic)
            for (int bcol = 0; bcol < nt; ++bcol)
              rhs += sc.L(a, bcol) * vel_scale * tau.col(bcol).dot(state.jump_prev.col(r));
          rows.rhs(1 + a, r) = rhs;
        }
        break;
      }
    }
  }
  return rows;
}

} // namespace porocontact
