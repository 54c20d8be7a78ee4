#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "levval/linalg.hpp"

namespace levval {

enum class UtilityKind { SpanRank, RidgeLogdet, RidgeNegTrace };

// Coalition utility over rows of X:
//   SpanRank      U(S) = rank(X_S),                     U(∅) = 0
//   RidgeLogdet   U(S) = logdet(X_SᵀX_S + λI),          U(∅) = d·log λ
//   RidgeNegTrace U(S) = −Tr((X_SᵀX_S + λI)⁻¹),         U(∅) = −d/λ
// lambda is ignored for SpanRank and must be positive otherwise.
struct UtilitySpec {
  UtilityKind kind;
  DataMatrix x;
  double lambda = 0.0;
};

enum class ShapleyMethod { Exact, MonteCarlo };

struct ShapleyResult {
  Vector values;
  ShapleyMethod method = ShapleyMethod::Exact;
  std::optional<std::int64_t> mc_permutations;
  std::optional<Vector> mc_stderr;
};

// U(S) for an explicit row-index coalition (indices need not be sorted).
double utility_of_rows(const UtilitySpec& u, const std::vector<Index>& rows);

// U(S) for the coalition encoded as a bitmask over rows (n ≤ 20).
double utility_of_subset(const UtilitySpec& u, std::uint32_t mask);

// Exact Shapley values from a dense utility table indexed by bitmask
// (table size 2ⁿ). Marginals are accumulated per coalition cardinality and
// combined with integer factorial weights, which keeps small rational
// instances bit-exact.
Vector shapley_from_table(Index n, const std::vector<double>& table);

// Exact Shapley by full subset enumeration with a memoized utility table.
// Requires n ≤ 20.
ShapleyResult shapley_exact(const UtilitySpec& u);

// Permutation-sampling estimate of the same expectation. Each permutation t
// draws from an independent stream seeded by derive_seed(seed, t), so results
// are deterministic given the base seed and independent of evaluation order.
// Reports per-player standard errors.
ShapleyResult shapley_monte_carlo(const UtilitySpec& u,
                                  std::int64_t permutations,
                                  std::uint64_t seed);

// Spearman rank correlation with average ranks on ties; values within
// relative 1e-9 count as tied. Degenerate inputs: returns 1 when both
// vectors have constant ranks, 0 when exactly one does.
double spearman_rank_correlation(const Vector& a, const Vector& b);

struct SurrogateComparison {
  UtilityKind kind;
  Vector shapley_normalized;
  Vector gap_vs_exact;
  Vector gap_vs_ridge;
  double max_gap_exact = 0.0;
  double max_gap_ridge = 0.0;
  double spearman_exact = 0.0;
  double spearman_ridge = 0.0;
};

// Quantifies how well normalized leverage profiles stand in for exact
// Shapley values: exact Shapley under each utility, normalized to the
// simplex, against both the exact leverage profile π and the ridge profile
// π^(λ).
struct GapReport {
  double lambda = 0.0;
  Vector pi_exact;
  Vector pi_ridge;
  std::vector<SurrogateComparison> comparisons;
};

GapReport surrogate_gap_report(const DataMatrix& x, double lambda);

}  // namespace levval
