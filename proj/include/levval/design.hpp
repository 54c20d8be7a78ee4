#pragma once

#include <vector>

#include "levval/linalg.hpp"

namespace levval {

enum class DesignCriterion { D, A };

// Incrementally maintained regularized information matrix A = XᵀX + λI
// together with its inverse, log-determinant, and inverse trace. Rank-one
// updates go through Sherman-Morrison; the state re-factorizes from scratch
// every 64 updates to cap drift.
class DesignState {
 public:
  explicit DesignState(SpdMatrix a);

  Index dim() const { return a_.rows(); }
  const Matrix& a() const { return a_; }
  const Matrix& a_inv() const { return a_inv_; }
  double logdet() const { return logdet_; }
  double trace_inv() const { return trace_inv_; }
  const std::vector<Index>& chosen() const { return chosen_; }

  // Adds the rank-one term xxᵀ, tagging the update with a pool index.
  void add(const Vector& x, Index pool_index);

  // Recomputes inverse, logdet, and trace from the current A.
  void refactorize();

 private:
  Matrix a_;
  Matrix a_inv_;
  double logdet_ = 0.0;
  double trace_inv_ = 0.0;
  std::vector<Index> chosen_;
  int since_refactor_ = 0;

  static constexpr int kRefactorPeriod = 64;
};

// D-optimality marginal gain: logdet(A + xxᵀ) − logdet(A) = log(1 + xᵀA⁻¹x).
// Strictly positive for x ≠ 0.
double d_opt_gain(const DesignState& state, const Vector& x);

// A-optimality marginal gain, signed trace delta:
// Tr((A + xxᵀ)⁻¹) − Tr(A⁻¹) = −‖A⁻¹x‖² / (1 + xᵀA⁻¹x).
// Strictly negative for x ≠ 0 (the trace decreases, so the design improves).
double a_opt_gain(const DesignState& state, const Vector& x);

struct GreedySelection {
  std::vector<Index> chosen;
  // Criterion gain at each pick as evaluated by the selector
  // (D: d_opt_gain; A: a_opt_gain, signed).
  std::vector<double> gains;
};

// Greedy subset selection from the pool, starting from A = λI. Each step
// picks the index maximizing the criterion gain (D: largest d_opt_gain;
// A: largest trace reduction, i.e. most negative a_opt_gain), ties broken
// by lowest index. Picked indices leave the candidate set.
GreedySelection greedy_select_traced(const DataMatrix& pool, double lambda,
                                     Index budget, DesignCriterion criterion);

// Same loop from an explicit starting state, for gains measured against an
// existing information matrix (e.g. the full pool's A = XᵀX + λI) instead
// of the empty design.
GreedySelection greedy_select_traced(DesignState state, const DataMatrix& pool,
                                     Index budget, DesignCriterion criterion);

std::vector<Index> greedy_select(const DataMatrix& pool, double lambda,
                                 Index budget, DesignCriterion criterion);

}  // namespace levval
