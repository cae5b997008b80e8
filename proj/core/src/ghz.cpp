#include "qcrb/ghz.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qcrb/errors.hpp"

namespace qcrb::ghz {

namespace {

Index dim_for(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw PreconditionViolated("GHZ: n_qubits must be in [1, 30], got " +
                               std::to_string(n_qubits));
  }
  return Index{1} << n_qubits;
}

ComplexMatrix single_qubit_ramsey() {
  return unitary_evolution(0.5 * pauli::sigma_y(), std::numbers::pi / 2.0);
}

std::array<ComplexVector, 4> two_qubit_basis(LocalBasis basis) {
  const ComplexMatrix local = local_basis(basis);
  std::array<ComplexVector, 4> out;
  for (int idx = 0; idx < 4; ++idx) {
    const ComplexVector a = local.col(idx >> 1);
    const ComplexVector b = local.col(idx & 1);
    ComplexVector v(4);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) v(2 * i + j) = a(i) * b(j);
    }
    out[static_cast<std::size_t>(idx)] = v;
  }
  return out;
}

}  // namespace

PureState ghz_state(int n_qubits, double phi) {
  const Index dim = dim_for(n_qubits);
  ComplexVector amps = ComplexVector::Zero(dim);
  const double r = 1.0 / std::numbers::sqrt2;
  amps(0) = r;
  amps(dim - 1) = r * std::exp(kI * (static_cast<double>(n_qubits) * phi));
  return PureState(std::move(amps));
}

ParametricModel ghz_model(int n_qubits) {
  return ParametricModel::unitary(ghz_state(n_qubits, 0.0),
                                  collective_spin(Axis::z, n_qubits));
}

HermitianObservable ghz_sld_closed_form(int n_qubits, double phi) {
  const Index dim = dim_for(n_qubits);
  const double n = static_cast<double>(n_qubits);
  ComplexMatrix l = ComplexMatrix::Zero(dim, dim);
  l(0, dim - 1) = -kI * n * std::exp(-kI * (n * phi));
  l(dim - 1, 0) = kI * n * std::exp(kI * (n * phi));
  return HermitianObservable(std::move(l));
}

void require_optimal_family(const PauliCoefficients& c) {
  if (c.a0 != 0.0 || c.a3 != 0.0) {
    std::ostringstream msg;
    msg << "optimal separable family needs a0 = a3 = 0, got a0 = " << c.a0
        << ", a3 = " << c.a3;
    throw InvalidCoefficients(msg.str());
  }
  if (c.a1 == 0.0 && c.a2 == 0.0) {
    throw InvalidCoefficients(
        "optimal separable family needs (a1, a2) != (0, 0)");
  }
}

HermitianObservable optimal_separable_observable(int n_qubits,
                                                 const PauliCoefficients& c) {
  require_optimal_family(c);
  dim_for(n_qubits);
  return HermitianObservable::product(c, n_qubits);
}

Expectations ghz_closed_form_expectations(int n_qubits, double phi,
                                          const PauliCoefficients& c) {
  require_optimal_family(c);
  dim_for(n_qubits);
  const Complex base{c.a1, c.a2};
  Complex power{1.0, 0.0};
  for (int k = 0; k < n_qubits; ++k) power *= base;
  const double n = static_cast<double>(n_qubits);
  Expectations e;
  e.mean = (std::exp(-kI * (n * phi)) * power).real();
  e.second_moment = std::pow(c.a1 * c.a1 + c.a2 * c.a2, n_qubits);
  return e;
}

double SingularSet::distance(double phi) const {
  const double k = std::round((phi - offset) / spacing);
  return std::abs(phi - (offset + k * spacing));
}

bool SingularSet::contains(double phi, double window) const {
  return distance(phi) <= window;
}

std::vector<double> SingularSet::points_in(double lo, double hi) const {
  std::vector<double> out;
  const double first = std::ceil((lo - offset) / spacing);
  const double last = std::floor((hi - offset) / spacing);
  for (double k = first; k <= last; k += 1.0) {
    out.push_back(offset + k * spacing);
  }
  return out;
}

SingularSet singular_points(int n_qubits, const PauliCoefficients& c) {
  require_optimal_family(c);
  dim_for(n_qubits);
  // <O> = r^N cos(N (theta - phi)) with theta = arg(a1 + i a2); the slope
  // vanishes at phi = theta + k pi / N.
  SingularSet set;
  set.spacing = std::numbers::pi / static_cast<double>(n_qubits);
  const double theta = std::atan2(c.a2, c.a1);
  set.offset = theta - std::floor(theta / set.spacing) * set.spacing;
  if (set.offset >= set.spacing - 1e-15) set.offset = 0.0;
  return set;
}

RamseyResult ramsey_rotate(const HermitianObservable& obs, int n_qubits) {
  const Index dim = dim_for(n_qubits);
  if (obs.dim() != dim) {
    throw DimensionMismatch("ramsey_rotate: observable dimension " +
                            std::to_string(obs.dim()) + " vs 2^" +
                            std::to_string(n_qubits));
  }
  const ComplexMatrix r = unitary_evolution(
      collective_spin(Axis::y, n_qubits).matrix(), std::numbers::pi / 2.0);
  ComplexMatrix rotated = r.adjoint() * obs.matrix() * r;
  rotated = 0.5 * (rotated + rotated.adjoint());

  const auto& form = obs.product_form();
  if (!form || static_cast<int>(form->size()) != n_qubits) {
    return {HermitianObservable(std::move(rotated)), std::nullopt};
  }

  const ComplexMatrix r1 = single_qubit_ramsey();
  std::vector<PauliCoefficients> sites;
  bool in_family = true;
  for (const auto& site : *form) {
    auto rc = PauliCoefficients::from_matrix(r1.adjoint() * site.matrix() * r1);
    // Strip rounding noise so the recorded product form is clean.
    for (double* a : {&rc.a0, &rc.a1, &rc.a2, &rc.a3}) {
      if (std::abs(*a) < 1e-14) *a = 0.0;
    }
    sites.push_back(rc);
    in_family = in_family && site.a0 == 0.0 && site.a3 == 0.0;
  }
  HermitianObservable product = HermitianObservable::product(sites);
  const double gap = (product.matrix() - rotated).norm();
  if (gap > 1e-10 * std::max(1.0, rotated.norm())) {
    std::ostringstream msg;
    msg << "ramsey_rotate: site-wise and collective rotation differ by " << gap;
    throw NumericalFailure(msg.str());
  }
  std::optional<int> sign;
  if (in_family) {
    const auto sx = PauliCoefficients::from_matrix(r1.adjoint() *
                                                   pauli::sigma_x() * r1);
    sign = sx.a3 > 0.0 ? 1 : -1;
  }
  return {std::move(product), sign};
}

HermitianObservable parity_observable(int n_qubits) {
  dim_for(n_qubits);
  return HermitianObservable(tensor_power(pauli::sigma_z(), n_qubits));
}

HermitianObservable parity_from_collective_spin(int n_qubits) {
  const Index dim = dim_for(n_qubits);
  const ComplexMatrix jz = collective_spin(Axis::z, n_qubits).matrix();
  const double j = 0.5 * static_cast<double>(n_qubits);
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k) {
    const long long exponent = std::llround(j - jz(k, k).real());
    out(k, k) = (exponent % 2 == 0) ? 1.0 : -1.0;
  }
  return HermitianObservable(std::move(out));
}

ComplexMatrix local_basis(LocalBasis basis) {
  const double r = 1.0 / std::numbers::sqrt2;
  ComplexMatrix m(2, 2);
  if (basis == LocalBasis::x_basis) {
    m << r, r, r, -r;
  } else {
    m << r, r, r * kI, -r * kI;
  }
  return m;
}

Povm local_product_povm(int n_qubits, LocalBasis basis) {
  dim_for(n_qubits);
  return Povm::product_basis(local_basis(basis), n_qubits);
}

std::array<double, 4> lambda_closed_form(double phi, LocalBasis basis) {
  const double t = -2.0 * std::tan(phi);
  const double c = 2.0 / std::tan(phi);
  if (basis == LocalBasis::x_basis) return {t, c, c, t};
  return {c, t, t, c};
}

LambdaSolution two_qubit_lambda_solution(double phi, LocalBasis basis,
                                         const Tolerances& tol) {
  LambdaSolution sol;
  sol.basis = basis;
  const double quarter = std::numbers::pi / 2.0;
  const double k = std::round(phi / quarter);
  if (std::abs(phi - k * quarter) <= tol.singular_window) {
    sol.singular = true;
    sol.lambda.fill(std::numeric_limits<double>::quiet_NaN());
    return sol;
  }

  const ComplexVector psi = ghz_state(2, phi).amplitudes();
  const ComplexVector target = ghz_sld_closed_form(2, phi).matrix() * psi;
  const auto vecs = two_qubit_basis(basis);

  // K psi = sum_x lambda_x |x><x|psi>, split into real and imaginary rows.
  Eigen::MatrixXd a(8, 4);
  Eigen::VectorXd b(8);
  for (int x = 0; x < 4; ++x) {
    const ComplexVector column =
        vecs[static_cast<std::size_t>(x)] *
        vecs[static_cast<std::size_t>(x)].dot(psi);
    a.col(x).head(4) = column.real();
    a.col(x).tail(4) = column.imag();
  }
  b.head(4) = target.real();
  b.tail(4) = target.imag();
  const Eigen::VectorXd lambda = a.colPivHouseholderQr().solve(b);
  sol.residual = (a * lambda - b).norm();
  if (sol.residual > 1e-9 * std::max(1.0, b.norm())) {
    std::ostringstream msg;
    msg << "two_qubit_lambda_solution: no diagonal SLD at phi = " << phi
        << " (residual " << sol.residual << ")";
    throw NumericalFailure(msg.str());
  }
  const auto closed = lambda_closed_form(phi, basis);
  for (int x = 0; x < 4; ++x) {
    sol.lambda[static_cast<std::size_t>(x)] = lambda(x);
    const double ref = closed[static_cast<std::size_t>(x)];
    sol.closed_form_gap = std::max(
        sol.closed_form_gap, std::abs(lambda(x) - ref) / std::max(1.0, std::abs(ref)));
  }
  if (sol.closed_form_gap > 1e-9) {
    std::ostringstream msg;
    msg << "two_qubit_lambda_solution: numeric and closed-form coefficients "
           "differ by "
        << sol.closed_form_gap << " at phi = " << phi;
    throw NumericalFailure(msg.str());
  }
  return sol;
}

ComplexMatrix assemble_k_operator(const LambdaSolution& solution) {
  if (solution.singular) {
    throw PreconditionViolated("assemble_k_operator: solution is singular");
  }
  const auto vecs = two_qubit_basis(solution.basis);
  ComplexMatrix k = ComplexMatrix::Zero(4, 4);
  for (std::size_t x = 0; x < 4; ++x) {
    k += solution.lambda[x] * vecs[x] * vecs[x].adjoint();
  }
  return k;
}

}  // namespace qcrb::ghz
