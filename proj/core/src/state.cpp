#include "qcrb/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcrb/errors.hpp"

namespace qcrb {

PureState::PureState(ComplexVector amplitudes, double tol)
    : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw InvalidState("PureState: empty amplitude vector");
  }
  if (!all_finite(amplitudes_)) {
    throw InvalidState("PureState: non-finite amplitude");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol) {
    std::ostringstream msg;
    msg << "PureState: norm " << norm << " differs from 1";
    throw InvalidState(msg.str());
  }
}

ComplexMatrix PureState::projector() const {
  return amplitudes_ * amplitudes_.adjoint();
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, double tol)
    : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw InvalidState("DensityMatrix: matrix must be square and nonempty");
  }
  if (!all_finite(matrix_)) {
    throw InvalidState("DensityMatrix: non-finite entry");
  }
  const double defect = hermiticity_defect(matrix_);
  if (defect > tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: ||M - M^dagger||_F = " << defect;
    throw InvalidState(msg.str());
  }
  const Complex trace = matrix_.trace();
  if (std::abs(trace - 1.0) > tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << trace.real() << " differs from 1";
    throw InvalidState(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      0.5 * (matrix_ + matrix_.adjoint()), Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues()(0);
  if (smallest < -tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: smallest eigenvalue " << smallest;
    throw InvalidState(msg.str());
  }
}

DensityMatrix::DensityMatrix(const PureState& state)
    : matrix_(state.projector()) {}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) /
                       static_cast<double>(dim));
}

double DensityMatrix::purity() const {
  return (matrix_ * matrix_).trace().real();
}

ComplexMatrix PauliCoefficients::matrix() const {
  return a0 * pauli::identity() + a1 * pauli::sigma_x() +
         a2 * pauli::sigma_y() + a3 * pauli::sigma_z();
}

PauliCoefficients PauliCoefficients::from_matrix(
    const ComplexMatrix& single_site) {
  auto coeff = [&](const ComplexMatrix& p) {
    return 0.5 * (single_site * p).trace().real();
  };
  return {coeff(pauli::identity()), coeff(pauli::sigma_x()),
          coeff(pauli::sigma_y()), coeff(pauli::sigma_z())};
}

HermitianObservable::HermitianObservable(ComplexMatrix matrix, double tol)
    : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw NotHermitian("HermitianObservable: matrix must be square");
  }
  if (!all_finite(matrix_)) {
    throw NotHermitian("HermitianObservable: non-finite entry");
  }
  const double defect = hermiticity_defect(matrix_);
  if (defect > tol * std::max(1.0, matrix_.norm())) {
    std::ostringstream msg;
    msg << "HermitianObservable: ||M - M^dagger||_F = " << defect;
    throw NotHermitian(msg.str());
  }
}

HermitianObservable HermitianObservable::product(
    std::vector<PauliCoefficients> sites) {
  if (sites.empty()) {
    throw EmptyList("HermitianObservable::product: no sites");
  }
  std::vector<ComplexMatrix> factors;
  factors.reserve(sites.size());
  for (const auto& s : sites) factors.push_back(s.matrix());
  HermitianObservable obs(tensor_product(factors));
  obs.product_form_ = std::move(sites);
  return obs;
}

HermitianObservable HermitianObservable::product(const PauliCoefficients& site,
                                                 int n_sites) {
  if (n_sites < 1) {
    throw EmptyList("HermitianObservable::product: n_sites must be >= 1");
  }
  return product(
      std::vector<PauliCoefficients>(static_cast<std::size_t>(n_sites), site));
}

Povm::Povm(std::vector<PovmElement> elements, double tol)
    : elements_(std::move(elements)) {
  if (elements_.empty()) {
    throw InvalidPovm("Povm: no elements");
  }
  dim_ = elements_.front().op.rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const auto& op = elements_[k].op;
    if (op.rows() != dim_ || op.cols() != dim_) {
      throw DimensionMismatch("Povm: element " + std::to_string(k) +
                              " has inconsistent dimension");
    }
    if (!all_finite(op) || hermiticity_defect(op) > tol) {
      throw InvalidPovm("Povm: element '" + elements_[k].label +
                        "' is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
        0.5 * (op + op.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues()(0) < -tol) {
      throw InvalidPovm("Povm: element '" + elements_[k].label +
                        "' is not positive semidefinite");
    }
    sum += op;
  }
  const double completeness =
      (sum - ComplexMatrix::Identity(dim_, dim_)).norm();
  if (completeness > tol) {
    std::ostringstream msg;
    msg << "Povm: elements sum to identity only within " << completeness;
    throw InvalidPovm(msg.str());
  }
}

Povm Povm::computational_basis(Index dim) {
  std::vector<PovmElement> elements;
  elements.reserve(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) {
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    op(k, k) = 1.0;
    elements.push_back({std::to_string(k), std::move(op),
                        static_cast<double>(k)});
  }
  return Povm(std::move(elements));
}

Povm Povm::eigenprojectors(const HermitianObservable& obs,
                           double degeneracy_tol) {
  const auto eig = hermitian_eigendecomposition(obs.matrix());
  const Index dim = obs.dim();
  std::vector<PovmElement> elements;
  Index start = 0;
  while (start < dim) {
    Index stop = start + 1;
    while (stop < dim &&
           eig.values(stop) - eig.values(start) <= degeneracy_tol) {
      ++stop;
    }
    const auto block = eig.vectors.middleCols(start, stop - start);
    double value = eig.values.segment(start, stop - start).mean();
    std::ostringstream label;
    label << value;
    elements.push_back({label.str(), block * block.adjoint(), value});
    start = stop;
  }
  return Povm(std::move(elements));
}

Povm Povm::product_basis(const ComplexMatrix& single_site, int n_sites) {
  if (single_site.rows() != 2 || single_site.cols() != 2) {
    throw DimensionMismatch("Povm::product_basis: single-site basis must be 2x2");
  }
  if (n_sites < 1) {
    throw EmptyList("Povm::product_basis: n_sites must be >= 1");
  }
  const Index outcomes = Index{1} << n_sites;
  std::vector<PovmElement> elements;
  elements.reserve(static_cast<std::size_t>(outcomes));
  for (Index idx = 0; idx < outcomes; ++idx) {
    std::vector<ComplexMatrix> factors;
    std::string label;
    double value = 1.0;
    for (int site = 0; site < n_sites; ++site) {
      const int bit = static_cast<int>((idx >> (n_sites - 1 - site)) & 1);
      const ComplexVector v = single_site.col(bit);
      factors.push_back(v * v.adjoint());
      label.push_back(bit == 0 ? '+' : '-');
      if (bit == 1) value = -value;
    }
    elements.push_back({label, tensor_product(factors), value});
  }
  return Povm(std::move(elements));
}

HermitianObservable collective_spin(Axis axis, int n_qubits) {
  if (n_qubits < 1) {
    throw PreconditionViolated("collective_spin: n_qubits must be >= 1");
  }
  const Index dim = Index{1} << n_qubits;
  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (int site = 0; site < n_qubits; ++site) {
    std::vector<ComplexMatrix> factors(static_cast<std::size_t>(n_qubits),
                                       pauli::identity());
    factors[static_cast<std::size_t>(site)] = pauli::sigma(axis);
    total += tensor_product(factors);
  }
  return HermitianObservable(0.5 * total);
}

ComplexMatrix matrix_sqrt_psd(const DensityMatrix& rho, double support_cutoff) {
  return psd_sqrt(rho.matrix(), 1e-8, support_cutoff);
}

Complex expectation(const DensityMatrix& rho, const ComplexMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw DimensionMismatch("expectation: operator dimension " +
                            std::to_string(op.rows()) + " vs state " +
                            std::to_string(rho.dim()));
  }
  return (rho.matrix() * op).trace();
}

}  // namespace qcrb
