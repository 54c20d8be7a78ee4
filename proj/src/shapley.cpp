#include "levval/shapley.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "levval/errors.hpp"
#include "levval/rng.hpp"
#include "levval/valuation.hpp"

namespace levval {

namespace {

constexpr Index kMaxExactPlayers = 20;

void validate_utility(const UtilitySpec& u) {
  if (u.kind != UtilityKind::SpanRank &&
      (!(u.lambda > 0.0) || !std::isfinite(u.lambda))) {
    raise(Errc::InvalidLambda,
          "ridge utilities require lambda > 0, got " +
              std::to_string(u.lambda));
  }
}

Matrix rows_of(const DataMatrix& x, const std::vector<Index>& rows) {
  Matrix sub(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index i = rows[r];
    if (i < 0 || i >= x.rows()) {
      raise(Errc::InvalidInput,
            "coalition row index " + std::to_string(i) + " outside [0, " +
                std::to_string(x.rows()) + ")");
    }
    sub.row(static_cast<Index>(r)) = x.values().row(i);
  }
  return sub;
}

SpdMatrix ridge_gram_of(const Matrix& sub, Index d, double lambda) {
  Matrix a = lambda * Matrix::Identity(d, d);
  a.noalias() += sub.transpose() * sub;
  return SpdMatrix(0.5 * (a + a.transpose()));
}

std::array<long double, kMaxExactPlayers + 1> factorial_table() {
  std::array<long double, kMaxExactPlayers + 1> fact{};
  fact[0] = 1.0L;
  for (std::size_t k = 1; k < fact.size(); ++k) {
    fact[k] = fact[k - 1] * static_cast<long double>(k);
  }
  return fact;
}

}  // namespace

double utility_of_rows(const UtilitySpec& u, const std::vector<Index>& rows) {
  validate_utility(u);
  const Index d = u.x.cols();
  if (rows.empty()) {
    switch (u.kind) {
      case UtilityKind::SpanRank:
        return 0.0;
      case UtilityKind::RidgeLogdet:
        return static_cast<double>(d) * std::log(u.lambda);
      case UtilityKind::RidgeNegTrace:
        return -static_cast<double>(d) / u.lambda;
    }
    raise(Errc::InvalidInput, "unknown utility kind");
  }
  const Matrix sub = rows_of(u.x, rows);
  switch (u.kind) {
    case UtilityKind::SpanRank:
      return static_cast<double>(numerical_rank(DataMatrix(sub)));
    case UtilityKind::RidgeLogdet:
      return logdet_spd(ridge_gram_of(sub, d, u.lambda));
    case UtilityKind::RidgeNegTrace:
      return -inverse_spd(ridge_gram_of(sub, d, u.lambda)).trace();
  }
  raise(Errc::InvalidInput, "unknown utility kind");
}

double utility_of_subset(const UtilitySpec& u, std::uint32_t mask) {
  const Index n = u.x.rows();
  if (n > kMaxExactPlayers) {
    raise(Errc::TooManyPlayers,
          "bitmask coalitions support at most " +
              std::to_string(kMaxExactPlayers) + " rows, got " +
              std::to_string(n));
  }
  std::vector<Index> rows;
  for (Index i = 0; i < n; ++i) {
    if (mask & (1u << i)) rows.push_back(i);
  }
  return utility_of_rows(u, rows);
}

Vector shapley_from_table(Index n, const std::vector<double>& table) {
  if (n < 1 || n > kMaxExactPlayers) {
    raise(Errc::TooManyPlayers,
          "exact Shapley supports 1.." + std::to_string(kMaxExactPlayers) +
              " players, got " + std::to_string(n));
  }
  if (table.size() != (std::size_t{1} << n)) {
    raise(Errc::InvalidInput,
          "utility table has " + std::to_string(table.size()) +
              " entries, expected 2^" + std::to_string(n));
  }
  static const auto fact = factorial_table();
  const std::uint32_t full = static_cast<std::uint32_t>((1u << n) - 1u);

  Vector phi(n);
  for (Index i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    std::vector<long double> marginal_by_size(static_cast<std::size_t>(n),
                                              0.0L);
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask & bit) continue;
      const int k = std::popcount(mask);
      marginal_by_size[static_cast<std::size_t>(k)] +=
          static_cast<long double>(table[mask | bit]) -
          static_cast<long double>(table[mask]);
    }
    long double total = 0.0L;
    for (Index k = 0; k < n; ++k) {
      total += fact[static_cast<std::size_t>(k)] *
               fact[static_cast<std::size_t>(n - 1 - k)] *
               marginal_by_size[static_cast<std::size_t>(k)];
    }
    phi(i) = static_cast<double>(total / fact[static_cast<std::size_t>(n)]);
  }
  return phi;
}

ShapleyResult shapley_exact(const UtilitySpec& u) {
  validate_utility(u);
  const Index n = u.x.rows();
  if (n > kMaxExactPlayers) {
    raise(Errc::TooManyPlayers,
          "exact Shapley enumerates 2^n coalitions; n = " + std::to_string(n) +
              " exceeds " + std::to_string(kMaxExactPlayers));
  }
  std::vector<double> table(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
    table[mask] = utility_of_subset(u, mask);
  }
  ShapleyResult result;
  result.values = shapley_from_table(n, table);
  result.method = ShapleyMethod::Exact;
  return result;
}

ShapleyResult shapley_monte_carlo(const UtilitySpec& u,
                                  std::int64_t permutations,
                                  std::uint64_t seed) {
  validate_utility(u);
  if (permutations < 1) {
    raise(Errc::InvalidInput, "permutation count must be >= 1, got " +
                                  std::to_string(permutations));
  }
  const Index n = u.x.rows();

  Vector mean = Vector::Zero(n);
  Vector m2 = Vector::Zero(n);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::vector<Index> prefix;
  prefix.reserve(static_cast<std::size_t>(n));

  const double empty_value = utility_of_rows(u, {});
  for (std::int64_t t = 0; t < permutations; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::iota(perm.begin(), perm.end(), Index{0});
    rng.shuffle(perm.begin(), perm.end());

    prefix.clear();
    double prev = empty_value;
    for (Index pos = 0; pos < n; ++pos) {
      const Index player = perm[static_cast<std::size_t>(pos)];
      prefix.push_back(player);
      const double cur = utility_of_rows(u, prefix);
      const double contribution = cur - prev;
      prev = cur;

      const double delta = contribution - mean(player);
      mean(player) += delta / static_cast<double>(t + 1);
      m2(player) += delta * (contribution - mean(player));
    }
  }

  ShapleyResult result;
  result.values = mean;
  result.method = ShapleyMethod::MonteCarlo;
  result.mc_permutations = permutations;
  Vector stderr_vec = Vector::Zero(n);
  if (permutations > 1) {
    const double denom =
        static_cast<double>(permutations) *
        static_cast<double>(permutations - 1);
    stderr_vec = (m2 / denom).cwiseMax(0.0).cwiseSqrt();
  }
  result.mc_stderr = std::move(stderr_vec);
  return result;
}

double spearman_rank_correlation(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    raise(Errc::DimensionMismatch,
          "rank correlation needs equal lengths, got " +
              std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  const Index n = a.size();
  const auto average_ranks = [n](const Vector& v) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&v](Index lhs, Index rhs) { return v(lhs) < v(rhs); });
    Vector ranks(n);
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t stop = start;
      // Values within relative 1e-9 share a rank; scores computed through
      // different factorizations tie only up to rounding noise.
      const double anchor = v(order[start]);
      const double tie_tol = 1e-9 * std::max(1.0, std::abs(anchor));
      while (stop + 1 < order.size() &&
             std::abs(v(order[stop + 1]) - anchor) <= tie_tol) {
        ++stop;
      }
      const double shared =
          0.5 * (static_cast<double>(start) + static_cast<double>(stop)) + 1.0;
      for (std::size_t j = start; j <= stop; ++j) ranks(order[j]) = shared;
      start = stop + 1;
    }
    return ranks;
  };

  const Vector ra = average_ranks(a);
  const Vector rb = average_ranks(b);
  const Vector ca = ra.array() - ra.mean();
  const Vector cb = rb.array() - rb.mean();
  const double va = ca.squaredNorm();
  const double vb = cb.squaredNorm();
  if (va == 0.0 && vb == 0.0) return 1.0;
  if (va == 0.0 || vb == 0.0) return 0.0;
  return ca.dot(cb) / std::sqrt(va * vb);
}

GapReport surrogate_gap_report(const DataMatrix& x, double lambda) {
  if (x.rows() > kMaxExactPlayers) {
    raise(Errc::TooManyPlayers,
          "surrogate report needs exact Shapley; n = " +
              std::to_string(x.rows()) + " exceeds " +
              std::to_string(kMaxExactPlayers));
  }

  GapReport report;
  report.lambda = lambda;
  report.pi_exact = leverage_scores(x).scores;
  report.pi_ridge = ridge_leverage_scores(x, RidgeConfig{lambda, {}}).scores;

  for (UtilityKind kind : {UtilityKind::SpanRank, UtilityKind::RidgeLogdet,
                           UtilityKind::RidgeNegTrace}) {
    UtilitySpec spec{kind, x, lambda};
    const Vector phi = shapley_exact(spec).values;
    const double total = phi.sum();
    if (!(total > 0.0)) {
      raise(Errc::InvalidInput,
            "utility is constant over coalitions; cannot normalize Shapley "
            "values to the simplex");
    }
    SurrogateComparison cmp;
    cmp.kind = kind;
    cmp.shapley_normalized = phi / total;
    cmp.gap_vs_exact = (report.pi_exact - cmp.shapley_normalized).cwiseAbs();
    cmp.gap_vs_ridge = (report.pi_ridge - cmp.shapley_normalized).cwiseAbs();
    cmp.max_gap_exact = cmp.gap_vs_exact.maxCoeff();
    cmp.max_gap_ridge = cmp.gap_vs_ridge.maxCoeff();
    cmp.spearman_exact =
        spearman_rank_correlation(report.pi_exact, cmp.shapley_normalized);
    cmp.spearman_ridge =
        spearman_rank_correlation(report.pi_ridge, cmp.shapley_normalized);
    report.comparisons.push_back(std::move(cmp));
  }
  return report;
}

}  // namespace levval
