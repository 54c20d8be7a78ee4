#pragma once

#include "levval/linalg.hpp"
#include "levval/rng.hpp"

namespace levval::testutil {

inline Matrix random_matrix(Rng& rng, Index n, Index d) {
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(Rng& rng, Index d) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.normal();
  return v;
}

// Well-conditioned SPD: Gaussian Gram plus identity shift.
inline SpdMatrix random_spd(Rng& rng, Index d) {
  Matrix b = random_matrix(rng, d, d);
  Matrix a = b.transpose() * b + Matrix::Identity(d, d);
  return SpdMatrix(0.5 * (a + a.transpose()));
}

inline Matrix matrix3x2(double a, double b, double c, double d, double e, double f) {
  Matrix m(3, 2);
  m << a, b, c, d, e, f;
  return m;
}

}  // namespace levval::testutil
