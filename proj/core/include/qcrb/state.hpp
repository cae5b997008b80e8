#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcrb/linalg.hpp"

namespace qcrb {

class PureState {
 public:
  // Throws InvalidState unless the amplitudes are finite and unit norm.
  explicit PureState(ComplexVector amplitudes, double tol = 1e-10);

  Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  ComplexMatrix projector() const;

 private:
  ComplexVector amplitudes_;
};

class DensityMatrix {
 public:
  // Throws InvalidState for non-square, non-finite, non-Hermitian, wrong
  // trace or negative input (all checks at tol).
  explicit DensityMatrix(ComplexMatrix matrix, double tol = 1e-10);
  explicit DensityMatrix(const PureState& state);

  static DensityMatrix maximally_mixed(Index dim);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double purity() const;

 private:
  ComplexMatrix matrix_;
};

// Single-site operator a0*I + a1*sx + a2*sy + a3*sz.
struct PauliCoefficients {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  ComplexMatrix matrix() const;
  static PauliCoefficients from_matrix(const ComplexMatrix& single_site);
  friend bool operator==(const PauliCoefficients&,
                         const PauliCoefficients&) = default;
};

class HermitianObservable {
 public:
  explicit HermitianObservable(ComplexMatrix matrix, double tol = 1e-10);

  // Tensor product of per-site Pauli operators; site 0 is leftmost.
  static HermitianObservable product(std::vector<PauliCoefficients> sites);
  static HermitianObservable product(const PauliCoefficients& site,
                                     int n_sites);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const std::optional<std::vector<PauliCoefficients>>& product_form() const {
    return product_form_;
  }

 private:
  ComplexMatrix matrix_;
  std::optional<std::vector<PauliCoefficients>> product_form_;
};

struct PovmElement {
  std::string label;
  ComplexMatrix op;
  // Real value attached to the outcome (eigenvalue for projective
  // measurements of an observable), used to form sample means.
  double value = 0.0;
};

class Povm {
 public:
  // Throws InvalidPovm unless each element is Hermitian PSD and the
  // elements sum to the identity.
  explicit Povm(std::vector<PovmElement> elements, double tol = 1e-10);

  static Povm computational_basis(Index dim);
  // Spectral projectors of obs; eigenvalues closer than degeneracy_tol are
  // merged into one outcome.
  static Povm eigenprojectors(const HermitianObservable& obs,
                              double degeneracy_tol = 1e-9);
  // Product projective measurement in the basis given by the columns of
  // single_site (a 2x2 unitary). Labels are "+"/"-" per site for columns
  // 0/1 and the value is the product of the per-site signs.
  static Povm product_basis(const ComplexMatrix& single_site, int n_sites);

  Index dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<PovmElement>& elements() const { return elements_; }
  const PovmElement& operator[](std::size_t i) const { return elements_[i]; }

 private:
  Index dim_ = 0;
  std::vector<PovmElement> elements_;
};

// J_axis = (1/2) * sum_i sigma_axis^(i) on n_qubits sites.
HermitianObservable collective_spin(Axis axis, int n_qubits);

// Throws NotPositive for eigenvalues below -1e-8. Eigenvalues at or below
// support_cutoff (Tr rho = 1) are treated as kernel, as in the SLD solver.
ComplexMatrix matrix_sqrt_psd(const DensityMatrix& rho,
                              double support_cutoff = 1e-12);

// Tr(rho * op), complex in general.
Complex expectation(const DensityMatrix& rho, const ComplexMatrix& op);

}  // namespace qcrb
