#include "qcrb/linalg.hpp"

#include <cmath>
#include <sstream>

#include "qcrb/errors.hpp"

namespace qcrb {

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix sigma(Axis axis) {
  switch (axis) {
    case Axis::x:
      return sigma_x();
    case Axis::y:
      return sigma_y();
    case Axis::z:
      return sigma_z();
  }
  return identity();
}

}  // namespace pauli

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) {
    throw EmptyList("tensor_product: empty factor list");
  }
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].rows() != factors[k].cols()) {
      std::ostringstream msg;
      msg << "tensor_product: factor " << k << " is " << factors[k].rows()
          << "x" << factors[k].cols();
      throw NonSquareFactor(msg.str());
    }
  }
  ComplexMatrix out = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) {
    out = kron(out, factors[k]);
  }
  return out;
}

ComplexMatrix tensor_product(std::initializer_list<ComplexMatrix> factors) {
  return tensor_product(std::span<const ComplexMatrix>(factors.begin(),
                                                       factors.size()));
}

ComplexMatrix tensor_power(const ComplexMatrix& factor, int copies) {
  if (copies < 1) {
    throw EmptyList("tensor_power: copies must be >= 1");
  }
  std::vector<ComplexMatrix> factors(static_cast<std::size_t>(copies), factor);
  return tensor_product(factors);
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return (m - m.adjoint()).norm();
}

bool all_finite(const ComplexMatrix& m) {
  for (Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& m,
                                                double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NotHermitian("hermitian_eigendecomposition: matrix is not square");
  }
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol * std::max(1.0, m.norm()))) {
    std::ostringstream msg;
    msg << "hermitian_eigendecomposition: ||M - M^dagger||_F = " << defect;
    throw NotHermitian(msg.str());
  }
  const ComplexMatrix symmetric = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("hermitian_eigendecomposition: solver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b + b * a;
}

ComplexMatrix unitary_evolution(const ComplexMatrix& generator, double phi) {
  const auto eig = hermitian_eigendecomposition(generator);
  ComplexVector phases(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k) {
    phases(k) = std::exp(-kI * eig.values(k) * phi);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol, double floor) {
  const auto eig = hermitian_eigendecomposition(m);
  RealVector roots(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k) {
    const double v = eig.values(k);
    if (v < -tol) {
      std::ostringstream msg;
      msg << "psd_sqrt: eigenvalue " << v << " below -" << tol;
      throw NotPositive(msg.str());
    }
    roots(k) = v > floor ? std::sqrt(v) : 0.0;
  }
  return eig.vectors * roots.cast<Complex>().asDiagonal() *
         eig.vectors.adjoint();
}

}  // namespace qcrb
