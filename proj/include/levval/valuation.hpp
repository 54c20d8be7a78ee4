#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "levval/linalg.hpp"

namespace levval {

/// Regularization strength. When adaptive_coeff is set, lambda is resolved
/// per matrix as coeff * trace(X^T X) / d and the resolved value recorded.
struct RidgeConfig {
  double lambda = 0.0;
  std::optional<double> adaptive_coeff;
};

enum class ValuationMode { Exact, Ridge };

/// Per-point valuation: raw leverage, normalized score on the simplex, and
/// the statistical dimension (sum of leverages; equal to d in exact mode).
struct ValuationReport {
  Vector leverage;
  Vector scores;
  double stat_dim = 0.0;
  double lambda_used = 0.0;
  ValuationMode mode = ValuationMode::Exact;
};

/// Resolved lambda for cfg: the fixed value, or adaptive_coeff * tr(X^T X)/d.
double resolve_lambda(const DataMatrix& x, const RidgeConfig& cfg);

/// Exact leverage scores: diagonal of the projection onto col(X), computed
/// from a thin orthogonal factorization. Requires full column rank; throws
/// RankDeficient otherwise (callers should fall back to ridge mode).
ValuationReport leverage_scores(const DataMatrix& x);

/// Ridge leverage scores x_i^T (X^T X + lambda I)^{-1} x_i. Rank deficiency
/// is fine; zero rows get exactly zero leverage. Throws InvalidLambda when
/// the config resolves to lambda <= 0.
ValuationReport ridge_leverage_scores(const DataMatrix& x, const RidgeConfig& cfg);

struct AxiomAuditResult {
  bool efficiency_ok = false;
  double efficiency_residual = 0.0;

  bool symmetry_ok = false;
  double symmetry_gap = 0.0;
  // Worst duplicate-row pair, present only on failure.
  std::optional<std::pair<Index, Index>> symmetry_witness;

  // Zero rows must score exactly zero. Checked in exact mode only;
  // vacuously true in ridge mode.
  bool dummy_ok = false;
  std::optional<Index> dummy_witness;

  // Nonzero rows must score strictly positive. Ridge mode only;
  // vacuously true in exact mode.
  bool positivity_ok = false;
  std::optional<Index> positivity_witness;

  bool all_pass() const { return efficiency_ok && symmetry_ok && dummy_ok && positivity_ok; }
};

/// Checks the report against the valuation axioms it is supposed to satisfy:
/// scores sum to one, identical rows score identically, zero rows score zero
/// (exact mode), nonzero rows score strictly positive (ridge mode).
AxiomAuditResult axiom_audit(const DataMatrix& x, const ValuationReport& report);

}  // namespace levval
