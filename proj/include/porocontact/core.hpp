// Copyright 2026 the porocontact authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace porocontact {

using Index = std::int64_t;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

/// Mesh connectivity problems: dangling faces, non-conforming fracture tags.
class TopologyError : public Error {
public:
  using Error::Error;
};

/// Degenerate geometry: zero-measure cells, faces or subfaces.
class GeometryError : public Error {
public:
  using Error::Error;
};

/// A per-vertex local gradient system could not be factored.
class SingularSystemError : public Error {
public:
  using Error::Error;
};

class SolverError : public Error {
public:
  using Error::Error;
};

class NonConvergenceError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Caller broke a documented precondition (size mismatch and the like).
class ContractViolation : public Error {
public:
  using Error::Error;
};

} // namespace porocontact
