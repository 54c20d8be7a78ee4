#include "levval/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levval {

namespace {

constexpr double kEfficiencyTol = 1e-10;
constexpr double kSymmetryTol = 1e-10;
constexpr double kDuplicateRowTol = 1e-12;

Vector normalize_scores(const Vector& leverage, double total) {
  if (total > 0.0) return leverage / total;
  return Vector::Zero(leverage.size());
}

}  // namespace

double resolve_lambda(const DataMatrix& x, const RidgeConfig& cfg) {
  if (!cfg.adaptive_coeff.has_value()) return cfg.lambda;
  const double trace = x.values().squaredNorm();  // tr(X^T X) = ||X||_F^2
  return *cfg.adaptive_coeff * trace / static_cast<double>(x.cols());
}

ValuationReport leverage_scores(const DataMatrix& x) {
  const Index d = x.cols();
  if (numerical_rank(x) != d) {
    raise(Errc::RankDeficient,
          "matrix is rank deficient; use ridge mode for rank-deficient data");
  }
  // Same shape as the ridge path with lambda = 0: one SPD factorization of
  // the Gram, n solves, leverage_i = x_i . Z_i. Keeps small rational
  // instances (diagonal Grams) exact.
  const Matrix xt = x.values().transpose();
  const Matrix z = Factorization::positive_definite(gram(x)).solve(xt);

  ValuationReport report;
  report.mode = ValuationMode::Exact;
  report.lambda_used = 0.0;
  report.leverage = (xt.cwiseProduct(z)).colwise().sum().transpose();
  for (Index i = 0; i < x.rows(); ++i) {
    if (x.values().row(i).isZero(0.0)) report.leverage(i) = 0.0;
    report.leverage(i) = std::min(report.leverage(i), 1.0);
  }
  report.stat_dim = report.leverage.sum();
  report.scores = normalize_scores(report.leverage, report.stat_dim);
  return report;
}

ValuationReport ridge_leverage_scores(const DataMatrix& x, const RidgeConfig& cfg) {
  const double lambda = resolve_lambda(x, cfg);
  if (!(lambda > 0.0)) {
    raise(Errc::InvalidLambda, "ridge mode requires lambda > 0");
  }
  Matrix a = gram(x).values();
  a.diagonal().array() += lambda;
  const Matrix xt = x.values().transpose();
  // One factorization, n solves: Z = (X^T X + lambda I)^{-1} X^T, leverage_i = x_i . Z_i.
  Matrix z = Factorization::positive_definite(SpdMatrix(std::move(a))).solve(xt);

  ValuationReport report;
  report.mode = ValuationMode::Ridge;
  report.lambda_used = lambda;
  report.leverage = (xt.cwiseProduct(z)).colwise().sum().transpose();
  for (Index i = 0; i < x.rows(); ++i) {
    if (x.values().row(i).isZero(0.0)) report.leverage(i) = 0.0;
  }
  report.stat_dim = report.leverage.sum();
  report.scores = normalize_scores(report.leverage, report.stat_dim);
  return report;
}

namespace {

struct RowOrder {
  Index index;
  double norm;
};

}  // namespace

AxiomAuditResult axiom_audit(const DataMatrix& x, const ValuationReport& report) {
  const Index n = x.rows();
  if (report.scores.size() != n || report.leverage.size() != n) {
    raise(Errc::DimensionMismatch, "report size does not match matrix rows");
  }
  AxiomAuditResult result;

  result.efficiency_residual = std::abs(report.scores.sum() - 1.0);
  result.efficiency_ok = result.efficiency_residual <= kEfficiencyTol;

  // Symmetry over duplicate rows: bitwise-equal rows, plus near-equal rows
  // within 1e-12 of the largest row norm. Candidate pairs are found by
  // sorting on row norm; equal rows necessarily have equal norms.
  std::vector<RowOrder> order(static_cast<std::size_t>(n));
  double max_norm = 0.0;
  for (Index i = 0; i < n; ++i) {
    order[static_cast<std::size_t>(i)] = {i, x.values().row(i).norm()};
    max_norm = std::max(max_norm, order[static_cast<std::size_t>(i)].norm);
  }
  std::sort(order.begin(), order.end(),
            [](const RowOrder& a, const RowOrder& b) { return a.norm < b.norm; });
  const double row_tol = kDuplicateRowTol * max_norm;
  result.symmetry_ok = true;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (order[b].norm - order[a].norm > row_tol) break;
      const Index i = order[a].index;
      const Index j = order[b].index;
      const bool bitwise_equal = x.values().row(i) == x.values().row(j);
      const bool near_equal = (x.values().row(i) - x.values().row(j)).norm() <= row_tol;
      if (!bitwise_equal && !near_equal) continue;
      const double gap = std::abs(report.scores(i) - report.scores(j));
      if (gap > result.symmetry_gap) {
        result.symmetry_gap = gap;
        if (gap > kSymmetryTol) {
          result.symmetry_ok = false;
          result.symmetry_witness = {std::min(i, j), std::max(i, j)};
        }
      }
    }
  }

  result.dummy_ok = true;
  if (report.mode == ValuationMode::Exact) {
    for (Index i = 0; i < n; ++i) {
      if (x.values().row(i).isZero(0.0) && report.scores(i) != 0.0) {
        result.dummy_ok = false;
        result.dummy_witness = i;
        break;
      }
    }
  }

  result.positivity_ok = true;
  if (report.mode == ValuationMode::Ridge) {
    for (Index i = 0; i < n; ++i) {
      if (!x.values().row(i).isZero(0.0) && !(report.scores(i) > 0.0)) {
        result.positivity_ok = false;
        result.positivity_witness = i;
        break;
      }
    }
  }

  return result;
}

}  // namespace levval
