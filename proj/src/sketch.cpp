#include "levval/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "levval/errors.hpp"
#include "levval/rng.hpp"

namespace levval {

namespace {

void check_epsilon_delta(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5) || !std::isfinite(epsilon)) {
    raise(Errc::InvalidRange,
          "epsilon must lie in (0, 1/2), got " + std::to_string(epsilon));
  }
  if (!(delta > 0.0) || !(delta < 1.0) || !std::isfinite(delta)) {
    raise(Errc::InvalidRange,
          "delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

std::vector<double> cumulative_of(const Vector& p) {
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  cdf.back() = std::max(cdf.back(), 1.0);
  return cdf;
}

Index draw_index(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto pos = static_cast<Index>(it - cdf.begin());
  return std::min<Index>(pos, static_cast<Index>(cdf.size()) - 1);
}

SpdMatrix regularized_gram(const Matrix& x, double lambda) {
  Matrix a = lambda * Matrix::Identity(x.cols(), x.cols());
  a.noalias() += x.transpose() * x;
  return SpdMatrix(0.5 * (a + a.transpose()));
}

double a_norm(const Vector& v, const SpdMatrix& a) {
  return std::sqrt(std::max(0.0, v.dot(a.values() * v)));
}

}  // namespace

SamplingPlan make_plan(Vector probabilities, Index m, std::uint64_t seed) {
  if (probabilities.size() < 1) {
    raise(Errc::InvalidInput, "sampling plan needs at least one probability");
  }
  if (!probabilities.allFinite() || probabilities.minCoeff() < 0.0) {
    raise(Errc::InvalidInput,
          "sampling probabilities must be finite and non-negative");
  }
  const double total = probabilities.sum();
  if (std::abs(total - 1.0) > 1e-10) {
    raise(Errc::InvalidInput, "sampling probabilities sum to " +
                                  std::to_string(total) + ", expected 1");
  }
  if (m < 0) {
    raise(Errc::InvalidInput, "sample size must be non-negative");
  }
  SamplingPlan plan;
  plan.probabilities = std::move(probabilities);
  plan.m = m;
  plan.seed = seed;
  plan.with_replacement = true;
  return plan;
}

SamplingPlan plan_from_valuation(const ValuationReport& report, Index m,
                                 std::uint64_t seed) {
  if (report.stat_dim <= 0.0) {
    raise(Errc::InvalidInput,
          "valuation has non-positive statistical dimension");
  }
  return make_plan(report.leverage / report.stat_dim, m, seed);
}

Index sample_size(double k_lambda, Index d, double epsilon, double delta,
                  double c) {
  check_epsilon_delta(epsilon, delta);
  if (!(c > 0.0) || !std::isfinite(c)) {
    raise(Errc::InvalidRange,
          "constant C must be positive, got " + std::to_string(c));
  }
  if (!(k_lambda > 0.0) || d < 1) {
    raise(Errc::InvalidInput, "need k_lambda > 0 and d >= 1");
  }
  const double raw = c *
                     (k_lambda + std::log(2.0 * static_cast<double>(d) / delta)) /
                     (epsilon * epsilon);
  return static_cast<Index>(std::ceil(raw));
}

SketchedProblem assemble_sketch(const DataMatrix& x, const Vector& y,
                                std::vector<Index> indices, Vector weights,
                                double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    raise(Errc::InvalidLambda,
          "sketching requires lambda > 0, got " + std::to_string(lambda));
  }
  if (y.size() != x.rows()) {
    raise(Errc::DimensionMismatch,
          "response length " + std::to_string(y.size()) +
              " does not match row count " + std::to_string(x.rows()));
  }
  if (indices.empty()) {
    raise(Errc::EmptyPlan, "sketch needs at least one sampled row");
  }
  if (static_cast<Index>(indices.size()) != weights.size()) {
    raise(Errc::DimensionMismatch, "index/weight length mismatch");
  }

  const Index m = static_cast<Index>(indices.size());
  Matrix x_tilde(m, x.cols());
  Vector y_tilde(m);
  for (Index t = 0; t < m; ++t) {
    const Index i = indices[static_cast<std::size_t>(t)];
    if (i < 0 || i >= x.rows()) {
      raise(Errc::InvalidInput,
            "sampled index " + std::to_string(i) + " outside [0, " +
                std::to_string(x.rows()) + ")");
    }
    x_tilde.row(t) = weights(t) * x.values().row(i);
    y_tilde(t) = weights(t) * y(i);
  }

  SpdMatrix a_s = regularized_gram(x_tilde, lambda);
  Vector b_s = x_tilde.transpose() * y_tilde;
  Vector theta_hat =
      Factorization::positive_definite(a_s).solve(b_s);
  return SketchedProblem{std::move(indices), std::move(weights),
                         std::move(x_tilde), std::move(y_tilde),
                         std::move(a_s),     std::move(b_s),
                         std::move(theta_hat)};
}

SketchedProblem draw_sketch(const DataMatrix& x, const Vector& y,
                            const SamplingPlan& plan, double lambda) {
  if (plan.m < 1) {
    raise(Errc::EmptyPlan, "sampling plan has m = 0");
  }
  if (plan.probabilities.size() != x.rows()) {
    raise(Errc::DimensionMismatch,
          "plan covers " + std::to_string(plan.probabilities.size()) +
              " rows, matrix has " + std::to_string(x.rows()));
  }
  const auto cdf = cumulative_of(plan.probabilities);
  Rng rng(plan.seed);
  std::vector<Index> indices(static_cast<std::size_t>(plan.m));
  Vector weights(plan.m);
  const double m_real = static_cast<double>(plan.m);
  for (Index t = 0; t < plan.m; ++t) {
    const Index i = draw_index(cdf, rng);
    indices[static_cast<std::size_t>(t)] = i;
    weights(t) = 1.0 / std::sqrt(m_real * plan.probabilities(i));
  }
  return assemble_sketch(x, y, std::move(indices), std::move(weights),
                         lambda);
}

GuaranteeCheck verify_guarantees(const DataMatrix& x, const Vector& theta_lin,
                                 double lambda, double epsilon,
                                 const SketchedProblem& sketch) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    raise(Errc::InvalidRange,
          "epsilon must lie in (0, 1/2), got " + std::to_string(epsilon));
  }
  if (theta_lin.size() != x.cols()) {
    raise(Errc::DimensionMismatch, "theta_lin length mismatch");
  }

  // The sketch must have been drawn from a realizable response.
  const Vector y_fit = sketch.x_tilde * theta_lin;
  const double y_scale = std::max(sketch.y_tilde.norm(), 1e-30);
  if ((sketch.y_tilde - y_fit).norm() > 1e-8 * y_scale) {
    raise(Errc::NotRealizable,
          "sketch responses do not match X·theta_lin; pass the theta_lin "
          "that generated y");
  }

  const SpdMatrix a = regularized_gram(x.values(), lambda);
  const Matrix inv_half = inv_sqrt_spd(a);
  const Matrix sandwich =
      inv_half * sketch.a_s.values() * inv_half;
  const Index d = x.cols();

  GuaranteeCheck check;
  check.epsilon = epsilon;
  check.spectral_dev =
      spectral_norm_sym(sandwich - Matrix::Identity(d, d));

  const Vector y = x.values() * theta_lin;
  const Vector b = x.values().transpose() * y;
  const Factorization a_fact = Factorization::positive_definite(a);
  const Vector diff_b = sketch.b_s - b;
  check.b_dev = std::sqrt(std::max(0.0, diff_b.dot(a_fact.solve(diff_b))));

  const Vector theta_star = a_fact.solve(b);
  check.theta_err = a_norm(sketch.theta_hat - theta_star, a);
  check.theta_lin_norm = a_norm(theta_lin, a);

  const auto risk = [&](const Vector& theta) {
    return 0.5 * (x.values() * theta - y).squaredNorm() +
           0.5 * lambda * theta.squaredNorm();
  };
  check.risk_gap = risk(sketch.theta_hat) - risk(theta_star);

  check.passed_A = check.spectral_dev <= epsilon &&
                   check.b_dev <= epsilon * check.theta_lin_norm;
  check.passed_Q =
      check.theta_err <= 4.0 * epsilon * check.theta_lin_norm &&
      check.risk_gap <=
          8.0 * epsilon * epsilon * check.theta_lin_norm * check.theta_lin_norm;
  return check;
}

DeviationHistogram chernoff_trial_stats(const DataMatrix& x, double lambda,
                                        Index m, Index trials,
                                        std::uint64_t seed) {
  if (trials < 1) {
    raise(Errc::InvalidInput, "need at least one trial");
  }
  if (m < 1) {
    raise(Errc::EmptyPlan, "need at least one draw per trial");
  }
  const ValuationReport valuation =
      ridge_leverage_scores(x, RidgeConfig{lambda, {}});
  const Vector p = valuation.leverage / valuation.stat_dim;
  const auto cdf = cumulative_of(p);

  const SpdMatrix a = regularized_gram(x.values(), lambda);
  const Matrix inv_half = inv_sqrt_spd(a);
  // Rows of X mapped through A^{-1/2}; Y_t is an outer product of row i_t.
  const Matrix mapped = x.values() * inv_half;
  const Matrix target = mapped.transpose() * mapped;
  const Index d = x.cols();
  const double m_real = static_cast<double>(m);

  DeviationHistogram hist;
  hist.k_lambda = valuation.stat_dim;
  hist.d = d;
  hist.m = m;
  hist.trials = trials;
  hist.deviations.reserve(static_cast<std::size_t>(trials));
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = 0.0;

  for (Index t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Matrix sum = Matrix::Zero(d, d);
    for (Index s = 0; s < m; ++s) {
      const Index i = draw_index(cdf, rng);
      const double scale = 1.0 / (m_real * p(i));
      const Vector z = mapped.row(i).transpose();
      sum.noalias() += scale * (z * z.transpose());
      const double y_norm = scale * z.squaredNorm();
      y_min = std::min(y_min, y_norm);
      y_max = std::max(y_max, y_norm);
    }
    hist.deviations.push_back(
        spectral_norm_sym(0.5 * (sum + sum.transpose()) - target));
  }
  hist.y_norm_min = y_min;
  hist.y_norm_max = y_max;

  const Index grid_size = 10;
  hist.eps_grid.resize(grid_size);
  hist.empirical_tail.resize(grid_size);
  hist.envelope.resize(grid_size);
  for (Index g = 0; g < grid_size; ++g) {
    const double eps = 0.05 * static_cast<double>(g + 1);
    hist.eps_grid(g) = eps;
    Index exceed = 0;
    for (double dev : hist.deviations) {
      if (dev >= eps) ++exceed;
    }
    hist.empirical_tail(g) =
        static_cast<double>(exceed) / static_cast<double>(trials);
    hist.envelope(g) =
        2.0 * static_cast<double>(d) *
        std::exp(-m_real * eps * eps / (3.0 * hist.k_lambda));
  }
  return hist;
}

std::pair<double, double> lemma1_log_gaps(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    raise(Errc::InvalidRange,
          "Lemma 1 grid point must lie in (0, 1/2), got " +
              std::to_string(epsilon));
  }
  const double upper =
      epsilon - (1.0 + epsilon) * std::log1p(epsilon) +
      epsilon * epsilon / 3.0;
  const double lower =
      -epsilon - (1.0 - epsilon) * std::log1p(-epsilon) +
      epsilon * epsilon / 2.0;
  return {upper, lower};
}

RidgeContraction ridge_contraction_check(const DataMatrix& x,
                                         const Vector& theta_lin,
                                         double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    raise(Errc::InvalidLambda,
          "ridge contraction requires lambda > 0, got " +
              std::to_string(lambda));
  }
  if (theta_lin.size() != x.cols()) {
    raise(Errc::DimensionMismatch, "theta_lin length mismatch");
  }

  const SpdMatrix a = regularized_gram(x.values(), lambda);
  const Factorization a_fact = Factorization::positive_definite(a);
  const Vector y = x.values() * theta_lin;
  const Vector b = x.values().transpose() * y;
  const Vector theta_star = a_fact.solve(b);

  const Matrix identity = Matrix::Identity(x.cols(), x.cols());
  const Vector closed_form =
      (identity - lambda * inverse_spd(a)) * theta_lin;

  RidgeContraction out;
  out.closed_form_gap = (theta_star - closed_form).norm();
  out.theta_star_norm = a_norm(theta_star, a);
  out.theta_lin_norm = a_norm(theta_lin, a);

  const double scale = std::max(1.0, theta_lin.norm());
  if (out.closed_form_gap > 1e-8 * scale) {
    raise(Errc::InvalidInput,
          "closed-form ridge solution disagrees with the direct solve "
          "beyond tolerance; the problem is numerically degenerate");
  }
  if (out.theta_star_norm >
      out.theta_lin_norm + 1e-10 * std::max(1.0, out.theta_lin_norm)) {
    raise(Errc::InvalidInput,
          "contraction inequality violated beyond rounding");
  }

  // Per-direction multipliers over the eigen-basis of XᵀX.
  Matrix gram_x = x.values().transpose() * x.values();
  gram_x = 0.5 * (gram_x + gram_x.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_x);
  const Vector sigma_sq = eig.eigenvalues().cwiseMax(0.0);
  out.multipliers_h.resize(sigma_sq.size());
  out.multipliers_a.resize(sigma_sq.size());
  for (Index j = 0; j < sigma_sq.size(); ++j) {
    const double shifted = sigma_sq(j) + lambda;
    out.multipliers_h(j) = sigma_sq(j) / std::sqrt(shifted);
    out.multipliers_a(j) = std::sqrt(shifted);
  }
  return out;
}

CalibrationResult calibrate_constant(Index n, Index d, double lambda,
                                     double epsilon, double delta,
                                     Index trials, std::uint64_t seed) {
  check_epsilon_delta(epsilon, delta);
  if (n < d || d < 1 || trials < 1) {
    raise(Errc::InvalidInput,
          "calibration needs n >= d >= 1 and trials >= 1");
  }

  // Fixed reference ensemble: one Gaussian design and a random unit signal.
  Rng data_rng(derive_seed(seed, 0));
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = data_rng.normal();
  }
  Vector theta_lin(d);
  for (Index j = 0; j < d; ++j) theta_lin(j) = data_rng.normal();
  theta_lin /= theta_lin.norm();

  const DataMatrix data(x);
  const Vector y = x * theta_lin;
  const ValuationReport valuation =
      ridge_leverage_scores(data, RidgeConfig{lambda, {}});

  CalibrationResult result;
  result.grid = {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  const double target = 0.5 * delta;

  for (double c : result.grid) {
    const Index m = sample_size(valuation.stat_dim, d, epsilon, delta, c);
    Index failures = 0;
    for (Index t = 0; t < trials; ++t) {
      const SamplingPlan plan = plan_from_valuation(
          valuation, m, derive_seed(seed, 1 + static_cast<std::uint64_t>(t)));
      const SketchedProblem sketch = draw_sketch(data, y, plan, lambda);
      const GuaranteeCheck check =
          verify_guarantees(data, theta_lin, lambda, epsilon, sketch);
      if (!check.passed_A) ++failures;
    }
    const double rate =
        static_cast<double>(failures) / static_cast<double>(trials);
    if (rate <= target) {
      result.c = c;
      result.failure_rate = rate;
      result.m = m;
      result.calibrated = true;
      return result;
    }
  }

  result.c = 8.0;
  result.failure_rate = 1.0;
  result.m = sample_size(valuation.stat_dim, d, epsilon, delta, 8.0);
  result.calibrated = false;
  return result;
}

}  // namespace levval
