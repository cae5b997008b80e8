#pragma once

#include <complex>
#include <initializer_list>
#include <span>

#include <Eigen/Dense>

#include "qcrb/tolerances.hpp"

namespace qcrb {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

enum class Axis { x, y, z };

namespace pauli {
ComplexMatrix identity();
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();
ComplexMatrix sigma(Axis axis);
}  // namespace pauli

// Kronecker product in list order; factor 0 is the most significant index.
ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors);
ComplexMatrix tensor_product(std::initializer_list<ComplexMatrix> factors);
ComplexMatrix tensor_power(const ComplexMatrix& factor, int copies);

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns are orthonormal eigenvectors
};

// Throws NotHermitian when ||m - m^dagger||_F > tol * max(1, ||m||_F).
EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& m,
                                                double tol = 1e-8);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

// ||m - m^dagger||_F
double hermiticity_defect(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);

// exp(-i * generator * phi) through the generator's eigenbasis.
ComplexMatrix unitary_evolution(const ComplexMatrix& generator, double phi);

// Square root of a Hermitian PSD matrix. Eigenvalues in [-tol, floor] are
// clamped to zero; anything below -tol throws NotPositive. A floor at the
// noise level keeps sqrt(1e-17) ~ 3e-9 out of rank-deficient roots.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol = 1e-8,
                       double floor = 0.0);

}  // namespace qcrb
