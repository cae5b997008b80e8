#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qcrb/optimality.hpp"

namespace qcrb::ghz {

// (|0...0> + e^{i N phi} |1...1>) / sqrt(2)
PureState ghz_state(int n_qubits, double phi);

// Unitary family with generator J_z = (1/2) sum sigma_z applied to the
// phi = 0 GHZ state. Evaluating at phi reproduces ghz_state up to a global
// phase.
ParametricModel ghz_model(int n_qubits);

struct GhzModel {
  int n_qubits = 1;
  double phi = 0.0;
  long long nu = 1;

  PureState state() const { return ghz_state(n_qubits, phi); }
  ParametricModel model() const { return ghz_model(n_qubits); }
};

// -iN e^{-iN phi} (|0><1|)^{(x)N} + iN e^{iN phi} (|1><0|)^{(x)N}
HermitianObservable ghz_sld_closed_form(int n_qubits, double phi);

// Throws InvalidCoefficients unless a0 = a3 = 0 and (a1, a2) != (0, 0).
void require_optimal_family(const PauliCoefficients& c);

// (a1 sx + a2 sy)^{(x)N}
HermitianObservable optimal_separable_observable(int n_qubits,
                                                 const PauliCoefficients& c);

// <O> = Re[e^{-iN phi} (a1 + i a2)^N], <O^2> = (a1^2 + a2^2)^N
Expectations ghz_closed_form_expectations(int n_qubits, double phi,
                                          const PauliCoefficients& c);

// Phases where d<O>/dphi vanishes for the optimal family: an arithmetic
// progression offset + k * spacing, k in Z.
struct SingularSet {
  double offset = 0.0;
  double spacing = 0.0;

  bool contains(double phi, double window = 1e-10) const;
  std::vector<double> points_in(double lo, double hi) const;
  // Distance from phi to the nearest singular point.
  double distance(double phi) const;
};

SingularSet singular_points(int n_qubits, const PauliCoefficients& c);

struct RamseyResult {
  HermitianObservable observable;
  // Sign s with output = (s a1 sz + a2 sy)^{(x)N} when the input is in the
  // optimal family; empty otherwise.
  std::optional<int> sigma_z_sign;
};

// R^dagger O R with R = exp(-i (pi/2) J_y).
RamseyResult ramsey_rotate(const HermitianObservable& obs, int n_qubits);

// sigma_z^{(x)N}
HermitianObservable parity_observable(int n_qubits);
// (-1)^{j - J_z} with j = N/2, built from the collective spin.
HermitianObservable parity_from_collective_spin(int n_qubits);

enum class LocalBasis { x_basis, y_basis };

// Columns |+>, |-> of the single-qubit basis.
ComplexMatrix local_basis(LocalBasis basis);
Povm local_product_povm(int n_qubits, LocalBasis basis);

struct LambdaSolution {
  // Order: ++, +-, -+, --.
  std::array<double, 4> lambda{};
  LocalBasis basis = LocalBasis::x_basis;
  bool singular = false;
  // ||K psi - L psi|| of the numeric solve.
  double residual = 0.0;
  // Largest relative gap between the numeric and closed-form lambdas.
  double closed_form_gap = 0.0;
};

// Closed-form diagonal SLD coefficients for the two-qubit GHZ state in the
// given product basis. x basis: (-2 tan, 2 cot, 2 cot, -2 tan); the y basis
// swaps the two pairs.
std::array<double, 4> lambda_closed_form(double phi, LocalBasis basis);

// Solves K|psi> = L|psi> for the diagonal operator K in the product basis.
// Flags phi within tol.singular_window of k*pi/2 as singular. Throws
// NumericalFailure if the numeric and closed-form solutions disagree.
LambdaSolution two_qubit_lambda_solution(double phi, LocalBasis basis,
                                         const Tolerances& tol = {});

// sum_x lambda_x |x><x| in the solution's product basis.
ComplexMatrix assemble_k_operator(const LambdaSolution& solution);

}  // namespace qcrb::ghz
