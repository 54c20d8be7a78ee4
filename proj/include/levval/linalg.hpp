#pragma once

#include <Eigen/Dense>
#include <variant>

#include "levval/errors.hpp"

namespace levval {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense n x d matrix of row-vector datapoints. Single source of truth
/// for the design matrix: construction rejects NaN/Inf and empty shapes.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  Vector row(Index i) const { return values_.row(i).transpose(); }

 private:
  Matrix values_;
};

/// Symmetric matrix expected to be positive definite. Symmetry is checked
/// at construction (1e-12 relative); positive definiteness is established
/// by factorization success in the operations that need it.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix values);

  Index dim() const { return values_.rows(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

enum class FactorKind {
  OrthogonalTriangular,
  SymmetricPositiveDefinite,
  SingularValue,
};

/// Opaque decomposition handle. Each kind exposes only the accessors that
/// make sense for it; reconstruct() reassembles the original matrix for
/// verification.
class Factorization {
 public:
  static Factorization orthogonal_triangular(const Matrix& x);
  static Factorization positive_definite(const SpdMatrix& a);
  static Factorization singular_value(const Matrix& x);

  FactorKind kind() const { return kind_; }
  double rank_tolerance() const { return rank_tolerance_; }
  Matrix reconstruct() const;

  // OrthogonalTriangular
  const Matrix& thin_q() const;
  const Matrix& triangular_r() const;

  // SymmetricPositiveDefinite
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  double log_determinant() const;

  // SingularValue
  const Vector& singular_values() const;
  Index rank() const;

 private:
  struct QrPayload {
    Matrix q;
    Matrix r;
  };
  struct SpdPayload {
    Eigen::LDLT<Matrix> ldlt;
  };
  struct SvdPayload {
    Matrix u;
    Vector sigma;
    Matrix v;
  };

  Factorization(FactorKind kind, std::variant<QrPayload, SpdPayload, SvdPayload> payload,
                double rank_tolerance)
      : kind_(kind), payload_(std::move(payload)), rank_tolerance_(rank_tolerance) {}

  FactorKind kind_;
  std::variant<QrPayload, SpdPayload, SvdPayload> payload_;
  double rank_tolerance_;
};

/// X^T X, symmetrized as (M + M^T)/2 to kill roundoff asymmetry.
SpdMatrix gram(const DataMatrix& x);

/// Count of singular values above max(n,d) * machine-epsilon * sigma_max.
/// The all-zero matrix has rank 0.
Index numerical_rank(const DataMatrix& x);

/// Solve A x = b for symmetric positive definite A.
/// Throws NotPositiveDefinite if the factorization fails.
Vector solve_spd(const SpdMatrix& a, const Vector& b);

/// (A + x x^T)^{-1} from A^{-1} via the rank-one inverse-update identity.
SpdMatrix sherman_morrison_update(const SpdMatrix& a_inv, const Vector& x);

/// log det A via Cholesky; never forms the raw determinant.
double logdet_spd(const SpdMatrix& a);

/// Explicit inverse of an SPD matrix, symmetrized.
Matrix inverse_spd(const SpdMatrix& a);

/// A^{-1/2} via symmetric eigendecomposition.
/// Throws NotPositiveDefinite if any eigenvalue is <= 0.
Matrix inv_sqrt_spd(const SpdMatrix& a);

/// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
double spectral_norm_sym(const Matrix& m);

}  // namespace levval
