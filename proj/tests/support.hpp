#pragma once

#include <cmath>
#include <random>

#include "qcrb/qcrb.hpp"

namespace qcrb::testing {

inline ComplexMatrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex{g(rng), g(rng)};
  return m;
}

inline ComplexMatrix random_hermitian(Index dim, std::mt19937_64& rng) {
  const ComplexMatrix a = random_complex(dim, dim, rng);
  return 0.5 * (a + a.adjoint());
}

inline PureState random_pure(Index dim, std::mt19937_64& rng) {
  ComplexVector v = random_complex(dim, 1, rng).col(0);
  v.normalize();
  return PureState(v);
}

// Random density matrix of the given rank (Wishart construction).
inline DensityMatrix random_density(Index dim, Index rank, std::mt19937_64& rng) {
  const ComplexMatrix a = random_complex(dim, rank, rng);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(rho);
}

inline PauliCoefficients random_coefficients(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng), u(rng)};
}

// (a1, a2) on an annulus so the optimal-family observable is well scaled.
inline PauliCoefficients random_family_member(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.5, 1.5);
  std::uniform_real_distribution<double> t(-M_PI, M_PI);
  const double rad = r(rng), th = t(rng);
  return {0.0, rad * std::cos(th), rad * std::sin(th), 0.0};
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace qcrb::testing
