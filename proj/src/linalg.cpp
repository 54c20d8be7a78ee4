#include "levval/linalg.hpp"

#include <cmath>
#include <limits>

namespace levval {

namespace {

double svd_rank_tolerance(const Matrix& x, const Vector& sigma) {
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double dim = static_cast<double>(std::max(x.rows(), x.cols()));
  return dim * std::numeric_limits<double>::epsilon() * sigma_max;
}

}  // namespace

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    raise(Errc::InvalidInput, "data matrix must have at least one row and one column");
  }
  if (!values_.allFinite()) {
    raise(Errc::InvalidInput, "data matrix contains NaN or Inf entries");
  }
}

SpdMatrix::SpdMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.rows() != values_.cols()) {
    raise(Errc::InvalidInput, "matrix must be square and non-empty");
  }
  if (!values_.allFinite()) {
    raise(Errc::InvalidInput, "matrix contains NaN or Inf entries");
  }
  const double scale = values_.cwiseAbs().maxCoeff();
  const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    raise(Errc::InvalidInput, "matrix is not symmetric to 1e-12 relative tolerance");
  }
}

Factorization Factorization::orthogonal_triangular(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  const Index k = std::min(x.rows(), x.cols());
  Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), k);
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return Factorization(FactorKind::OrthogonalTriangular, QrPayload{std::move(q), std::move(r)},
                       0.0);
}

Factorization Factorization::positive_definite(const SpdMatrix& a) {
  // Root-free (LDLT) Cholesky: pivoted, and exact on diagonal inputs where
  // the square-root form would round through irrational factors. LDLT
  // reports success even for semi-definite inputs, so positive definiteness
  // is the explicit D > 0 check.
  Eigen::LDLT<Matrix> ldlt(a.values());
  const Vector d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !d.allFinite() || d.minCoeff() <= 0.0) {
    raise(Errc::NotPositiveDefinite, "Cholesky factorization failed");
  }
  return Factorization(FactorKind::SymmetricPositiveDefinite, SpdPayload{std::move(ldlt)}, 0.0);
}

Factorization Factorization::singular_value(const Matrix& x) {
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sigma = svd.singularValues();
  const double tol = svd_rank_tolerance(x, sigma);
  return Factorization(FactorKind::SingularValue,
                       SvdPayload{svd.matrixU(), std::move(sigma), svd.matrixV()}, tol);
}

Matrix Factorization::reconstruct() const {
  switch (kind_) {
    case FactorKind::OrthogonalTriangular: {
      const auto& p = std::get<QrPayload>(payload_);
      return p.q * p.r;
    }
    case FactorKind::SymmetricPositiveDefinite: {
      return std::get<SpdPayload>(payload_).ldlt.reconstructedMatrix();
    }
    case FactorKind::SingularValue: {
      const auto& p = std::get<SvdPayload>(payload_);
      return p.u * p.sigma.asDiagonal() * p.v.transpose();
    }
  }
  raise(Errc::InvalidInput, "unknown factorization kind");
}

const Matrix& Factorization::thin_q() const { return std::get<QrPayload>(payload_).q; }

const Matrix& Factorization::triangular_r() const { return std::get<QrPayload>(payload_).r; }

Vector Factorization::solve(const Vector& b) const {
  return std::get<SpdPayload>(payload_).ldlt.solve(b);
}

Matrix Factorization::solve(const Matrix& b) const {
  return std::get<SpdPayload>(payload_).ldlt.solve(b);
}

double Factorization::log_determinant() const {
  return std::get<SpdPayload>(payload_).ldlt.vectorD().array().log().sum();
}

const Vector& Factorization::singular_values() const {
  return std::get<SvdPayload>(payload_).sigma;
}

Index Factorization::rank() const {
  const auto& p = std::get<SvdPayload>(payload_);
  Index r = 0;
  for (Index i = 0; i < p.sigma.size(); ++i) {
    if (p.sigma(i) > rank_tolerance_) ++r;
  }
  return r;
}

SpdMatrix gram(const DataMatrix& x) {
  Matrix g = x.values().transpose() * x.values();
  g = 0.5 * (g + g.transpose()).eval();
  return SpdMatrix(std::move(g));
}

Index numerical_rank(const DataMatrix& x) {
  return Factorization::singular_value(x.values()).rank();
}

Vector solve_spd(const SpdMatrix& a, const Vector& b) {
  if (b.size() != a.dim()) {
    raise(Errc::DimensionMismatch, "right-hand side length does not match matrix dimension");
  }
  return Factorization::positive_definite(a).solve(b);
}

SpdMatrix sherman_morrison_update(const SpdMatrix& a_inv, const Vector& x) {
  if (x.size() != a_inv.dim()) {
    raise(Errc::DimensionMismatch, "update vector length does not match matrix dimension");
  }
  if (!x.allFinite()) {
    raise(Errc::InvalidInput, "update vector contains NaN or Inf entries");
  }
  const Vector ax = a_inv.values() * x;
  const double denom = 1.0 + x.dot(ax);
  Matrix updated = a_inv.values() - (ax * ax.transpose()) / denom;
  updated = 0.5 * (updated + updated.transpose()).eval();
  return SpdMatrix(std::move(updated));
}

double logdet_spd(const SpdMatrix& a) {
  return Factorization::positive_definite(a).log_determinant();
}

Matrix inverse_spd(const SpdMatrix& a) {
  const Matrix identity = Matrix::Identity(a.dim(), a.dim());
  Matrix inv = Factorization::positive_definite(a).solve(identity);
  return 0.5 * (inv + inv.transpose()).eval();
}

Matrix inv_sqrt_spd(const SpdMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.values());
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    raise(Errc::NotPositiveDefinite, "matrix has a non-positive eigenvalue");
  }
  const Vector inv_sqrt = eig.eigenvalues().array().rsqrt();
  Matrix m = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (m + m.transpose()).eval();
}

double spectral_norm_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace levval
