#include <cmath>

#include "doctest.h"
#include "levval/valuation.hpp"
#include "test_util.hpp"

using namespace levval;
using testutil::random_matrix;

TEST_CASE("exact leverage scores on hand-computed matrices") {
  ValuationReport id = leverage_scores(DataMatrix(Matrix::Identity(2, 2)));
  CHECK(id.leverage(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.leverage(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.scores(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(id.stat_dim == doctest::Approx(2.0).epsilon(1e-10));

  Matrix x(3, 2);
  x << 1, 0, 0, 1, 1, 1;
  ValuationReport r = leverage_scores(DataMatrix(x));
  for (int i = 0; i < 3; ++i) {
    CHECK(r.leverage(i) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.scores(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  Matrix x2(3, 2);
  x2 << 1, 0, 0, 1, 1, 0;
  ValuationReport r2 = leverage_scores(DataMatrix(x2));
  CHECK(r2.leverage(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r2.leverage(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r2.leverage(2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r2.scores(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r2.scores(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r2.scores(2) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("exact mode rejects rank-deficient input") {
  Matrix x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  CHECK_THROWS_AS(leverage_scores(DataMatrix(x)), Error);
}

TEST_CASE("ridge leverage scores on hand-computed matrices") {
  RidgeConfig unit_lambda{1.0, std::nullopt};
  ValuationReport id = ridge_leverage_scores(DataMatrix(Matrix::Identity(2, 2)), unit_lambda);
  CHECK(id.leverage(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(id.leverage(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(id.stat_dim == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.scores(0) == doctest::Approx(0.5).epsilon(1e-12));

  Matrix x(3, 2);
  x << 1, 0, 0, 1, 1, 0;
  ValuationReport r = ridge_leverage_scores(DataMatrix(x), unit_lambda);
  CHECK(r.leverage(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.leverage(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.leverage(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.stat_dim == doctest::Approx(7.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("zero rows get exactly zero ridge leverage") {
  Matrix x(3, 2);
  x << 1, 2, 0, 0, -1, 1;
  ValuationReport r = ridge_leverage_scores(DataMatrix(x), RidgeConfig{0.5, std::nullopt});
  CHECK(r.leverage(1) == 0.0);
  CHECK(r.scores(1) == 0.0);
}

TEST_CASE("ridge mode works on rank-deficient input") {
  Matrix x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  ValuationReport r = ridge_leverage_scores(DataMatrix(x), RidgeConfig{0.1, std::nullopt});
  CHECK(r.stat_dim > 0.0);
  CHECK(r.stat_dim < 2.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(r.leverage(i) > 0.0);
    CHECK(r.leverage(i) < 1.0);
  }
}

TEST_CASE("invalid lambda is rejected") {
  DataMatrix x(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(ridge_leverage_scores(x, RidgeConfig{0.0, std::nullopt}), Error);
  CHECK_THROWS_AS(ridge_leverage_scores(x, RidgeConfig{-1.0, std::nullopt}), Error);
}

TEST_CASE("resolve_lambda") {
  RidgeConfig adaptive{0.0, 0.01};
  CHECK(resolve_lambda(DataMatrix(Matrix::Identity(2, 2)), adaptive) ==
        doctest::Approx(0.01).epsilon(1e-14));

  RidgeConfig fixed{0.5, std::nullopt};
  CHECK(resolve_lambda(DataMatrix(Matrix::Identity(2, 2)), fixed) == 0.5);

  RidgeConfig quarter{0.0, 0.25};
  CHECK(resolve_lambda(DataMatrix(Matrix(2.0 * Matrix::Identity(4, 4))), quarter) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("axiom audit on duplicate rows and zero rows") {
  Matrix x(3, 2);
  x << 1, 0, 1, 0, 0, 1;
  ValuationReport r = leverage_scores(DataMatrix(x));
  AxiomAuditResult audit = axiom_audit(DataMatrix(x), r);
  CHECK(audit.efficiency_ok);
  CHECK(audit.symmetry_ok);
  CHECK(audit.symmetry_gap <= 1e-10);
  CHECK(r.scores(0) == doctest::Approx(r.scores(1)).epsilon(1e-12));

  Matrix xz(4, 2);
  xz << 1, 0, 1, 0, 0, 1, 0, 0;
  ValuationReport rz = leverage_scores(DataMatrix(xz));
  AxiomAuditResult auditz = axiom_audit(DataMatrix(xz), rz);
  CHECK(auditz.dummy_ok);
  CHECK(rz.scores(3) == 0.0);

  ValuationReport ridge =
      ridge_leverage_scores(DataMatrix(Matrix::Identity(2, 2)), RidgeConfig{1.0, std::nullopt});
  AxiomAuditResult audit_ridge = axiom_audit(DataMatrix(Matrix::Identity(2, 2)), ridge);
  CHECK(audit_ridge.all_pass());
}

TEST_CASE("leverage decreases monotonically in lambda") {
  Rng rng(101);
  Matrix x = random_matrix(rng, 15, 4);
  ValuationReport low = ridge_leverage_scores(DataMatrix(x), RidgeConfig{0.3, std::nullopt});
  ValuationReport high = ridge_leverage_scores(DataMatrix(x), RidgeConfig{1.7, std::nullopt});
  for (Index i = 0; i < x.rows(); ++i) {
    CHECK(high.leverage(i) < low.leverage(i));
  }
}

TEST_CASE("ridge leverage converges to exact leverage as lambda vanishes") {
  Rng rng(103);
  Matrix x = random_matrix(rng, 20, 5);
  ValuationReport exact = leverage_scores(DataMatrix(x));
  const double tiny = 1e-12 * x.squaredNorm();
  ValuationReport ridge = ridge_leverage_scores(DataMatrix(x), RidgeConfig{tiny, std::nullopt});
  for (Index i = 0; i < x.rows(); ++i) {
    CHECK(std::abs(ridge.leverage(i) - exact.leverage(i)) <= 1e-4);
  }
}

TEST_CASE("permuting rows permutes scores identically") {
  Rng rng(107);
  Matrix x = random_matrix(rng, 10, 3);
  ValuationReport base = ridge_leverage_scores(DataMatrix(x), RidgeConfig{0.7, std::nullopt});

  std::vector<Index> perm = {3, 1, 4, 0, 9, 2, 6, 8, 7, 5};
  Matrix shuffled(10, 3);
  for (Index i = 0; i < 10; ++i) shuffled.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
  ValuationReport permuted =
      ridge_leverage_scores(DataMatrix(shuffled), RidgeConfig{0.7, std::nullopt});
  for (Index i = 0; i < 10; ++i) {
    CHECK(permuted.leverage(i) ==
          doctest::Approx(base.leverage(perm[static_cast<std::size_t>(i)])).epsilon(1e-12));
    CHECK(permuted.scores(i) ==
          doctest::Approx(base.scores(perm[static_cast<std::size_t>(i)])).epsilon(1e-12));
  }
}

TEST_CASE("scaling behavior of normalized scores") {
  Rng rng(109);
  Matrix x = random_matrix(rng, 12, 4);
  const double c = 3.7;

  ValuationReport exact = leverage_scores(DataMatrix(x));
  ValuationReport exact_scaled = leverage_scores(DataMatrix(Matrix(c * x)));
  for (Index i = 0; i < x.rows(); ++i) {
    CHECK(std::abs(exact_scaled.scores(i) - exact.scores(i)) <= 1e-10);
  }

  // Ridge scores are scale-sensitive unless lambda is rescaled by c^2.
  const double lambda = 0.9;
  ValuationReport ridge = ridge_leverage_scores(DataMatrix(x), RidgeConfig{lambda, std::nullopt});
  ValuationReport ridge_paired =
      ridge_leverage_scores(DataMatrix(Matrix(c * x)), RidgeConfig{c * c * lambda, std::nullopt});
  for (Index i = 0; i < x.rows(); ++i) {
    CHECK(std::abs(ridge_paired.scores(i) - ridge.scores(i)) <= 1e-10);
    CHECK(ridge_paired.leverage(i) == doctest::Approx(ridge.leverage(i)).epsilon(1e-10));
  }

  ValuationReport ridge_unpaired =
      ridge_leverage_scores(DataMatrix(Matrix(c * x)), RidgeConfig{lambda, std::nullopt});
  bool any_changed = false;
  for (Index i = 0; i < x.rows(); ++i) {
    if (std::abs(ridge_unpaired.scores(i) - ridge.scores(i)) > 1e-10) any_changed = true;
  }
  CHECK(any_changed);
}

TEST_CASE("adaptive lambda is recomputed per matrix") {
  Rng rng(113);
  Matrix x = random_matrix(rng, 8, 3);
  RidgeConfig cfg{0.0, 0.05};
  ValuationReport r = ridge_leverage_scores(DataMatrix(x), cfg);
  CHECK(r.lambda_used == doctest::Approx(0.05 * x.squaredNorm() / 3.0).epsilon(1e-14));
}
