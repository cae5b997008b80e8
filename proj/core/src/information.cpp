#include "qcrb/information.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qcrb/errors.hpp"

namespace qcrb {

namespace {

DensityMatrix evaluate_blackbox(const ParametricModel::StateFunction& fn,
                                Index dim, double phi) {
  try {
    DensityMatrix rho = fn(phi);
    if (rho.dim() != dim) {
      throw DimensionMismatch("state function returned dimension " +
                              std::to_string(rho.dim()) + ", expected " +
                              std::to_string(dim));
    }
    return rho;
  } catch (const EvaluationFailure&) {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "state function failed at phi = " << phi << ": " << e.what();
    throw EvaluationFailure(msg.str());
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

}  // namespace

ParametricModel ParametricModel::unitary(DensityMatrix initial,
                                         HermitianObservable generator) {
  if (initial.dim() != generator.dim()) {
    throw DimensionMismatch("ParametricModel: generator dimension " +
                            std::to_string(generator.dim()) + " vs state " +
                            std::to_string(initial.dim()));
  }
  ParametricModel model;
  model.kind_ = ModelKind::unitary_generator;
  model.dim_ = initial.dim();
  model.initial_ = std::move(initial);
  model.generator_eig_ = hermitian_eigendecomposition(generator.matrix());
  model.generator_ = std::move(generator);
  return model;
}

ParametricModel ParametricModel::unitary(PureState initial,
                                         HermitianObservable generator) {
  ParametricModel model = unitary(DensityMatrix(initial), std::move(generator));
  model.initial_pure_ = std::move(initial);
  return model;
}

ParametricModel ParametricModel::blackbox(Index dim, StateFunction state_fn) {
  if (dim < 1 || !state_fn) {
    throw PreconditionViolated("ParametricModel::blackbox: need dim >= 1 and a "
                               "state function");
  }
  ParametricModel model;
  model.kind_ = ModelKind::blackbox;
  model.dim_ = dim;
  model.state_fn_ = std::move(state_fn);
  return model;
}

DensityMatrix ParametricModel::state(double phi) const {
  if (kind_ == ModelKind::blackbox) {
    return evaluate_blackbox(state_fn_, dim_, phi);
  }
  if (initial_pure_) {
    return DensityMatrix(*pure_state(phi));
  }
  const ComplexMatrix u = evolution(phi);
  return DensityMatrix(hermitian_part(u * initial_->matrix() * u.adjoint()));
}

std::optional<PureState> ParametricModel::pure_state(double phi) const {
  if (!initial_pure_) return std::nullopt;
  const auto& eig = *generator_eig_;
  ComplexVector coeffs = eig.vectors.adjoint() * initial_pure_->amplitudes();
  for (Index k = 0; k < coeffs.size(); ++k) {
    coeffs(k) *= std::exp(-kI * eig.values(k) * phi);
  }
  ComplexVector psi = eig.vectors * coeffs;
  psi.normalize();
  return PureState(std::move(psi));
}

ComplexMatrix ParametricModel::evolution(double phi) const {
  const auto& eig = *generator_eig_;
  ComplexVector phases(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k) {
    phases(k) = std::exp(-kI * eig.values(k) * phi);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

double ParametricModel::fd_step(double phi) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) *
         std::max(1.0, std::abs(phi));
}

ComplexMatrix state_derivative(const ParametricModel& model, double phi) {
  if (model.kind() == ModelKind::unitary_generator) {
    const ComplexMatrix& g = model.generator()->matrix();
    if (const auto psi = model.pure_state(phi)) {
      // -i(G|psi><psi| - |psi><psi|G) without forming rho.
      const ComplexVector& v = psi->amplitudes();
      const ComplexMatrix gv_v = (g * v) * v.adjoint();
      return hermitian_part(-kI * (gv_v - gv_v.adjoint()));
    }
    const ComplexMatrix rho = model.state(phi).matrix();
    return hermitian_part(-kI * (g * rho - rho * g));
  }
  const double h = ParametricModel::fd_step(phi);
  const ComplexMatrix plus = model.state(phi + h).matrix();
  const ComplexMatrix minus = model.state(phi - h).matrix();
  return hermitian_part((plus - minus) / (2.0 * h));
}

ComplexMatrix state_second_derivative(const ParametricModel& model,
                                      double phi) {
  if (model.kind() == ModelKind::unitary_generator) {
    const ComplexMatrix& g = model.generator()->matrix();
    const ComplexMatrix rho = model.state(phi).matrix();
    const ComplexMatrix inner = g * rho - rho * g;
    return hermitian_part(-(g * inner - inner * g));
  }
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25) *
                   std::max(1.0, std::abs(phi));
  const ComplexMatrix plus = model.state(phi + h).matrix();
  const ComplexMatrix mid = model.state(phi).matrix();
  const ComplexMatrix minus = model.state(phi - h).matrix();
  return hermitian_part((plus - 2.0 * mid + minus) / (h * h));
}

SldResult solve_sld(const DensityMatrix& rho, const ComplexMatrix& drho,
                    const Tolerances& tol) {
  if (drho.rows() != rho.dim() || drho.cols() != rho.dim()) {
    throw DimensionMismatch("solve_sld: derivative dimension mismatch");
  }
  const auto eig = hermitian_eigendecomposition(rho.matrix());
  const Index dim = rho.dim();
  const double cutoff = tol.support_cutoff * rho.matrix().trace().real();
  const ComplexMatrix d = eig.vectors.adjoint() * drho * eig.vectors;

  int kernel_dim = 0;
  for (Index j = 0; j < dim; ++j) {
    if (eig.values(j) <= cutoff) ++kernel_dim;
  }

  ComplexMatrix l_eig = ComplexMatrix::Zero(dim, dim);
  double off_support = 0.0;
  for (Index j = 0; j < dim; ++j) {
    for (Index k = 0; k < dim; ++k) {
      const double s = eig.values(j) + eig.values(k);
      if (s > cutoff) {
        l_eig(j, k) = 2.0 * d(j, k) / s;
      } else {
        off_support += std::norm(d(j, k));
      }
    }
  }
  off_support = std::sqrt(off_support);
  const double drho_norm = drho.norm();
  if (off_support > tol.algorithmic * std::max(1.0, drho_norm)) {
    std::ostringstream msg;
    msg << "solve_sld: derivative has weight " << off_support
        << " on the kernel of rho; the SLD equation has no solution";
    throw DerivativeOutsideSupport(msg.str());
  }

  // Residual and Tr(rho L^2) are unitary invariants; evaluate them in the
  // eigenbasis where rho is diagonal.
  double residual_sq = 0.0;
  double qfi = 0.0;
  for (Index j = 0; j < dim; ++j) {
    for (Index k = 0; k < dim; ++k) {
      const double s = eig.values(j) + eig.values(k);
      residual_sq += std::norm(d(j, k) - 0.5 * s * l_eig(j, k));
      qfi += eig.values(j) * std::norm(l_eig(j, k));
    }
  }
  qfi = std::max(0.0, qfi);
  const double residual = std::sqrt(residual_sq);
  ComplexMatrix l =
      hermitian_part(eig.vectors * l_eig * eig.vectors.adjoint());
  return SldResult{HermitianObservable(std::move(l), tol.algorithmic),
                   drho, qfi, residual, kernel_dim};
}

SldResult sld(const ParametricModel& model, double phi,
              const Tolerances& tol) {
  return solve_sld(model.state(phi), state_derivative(model, phi), tol);
}

double qfi(const ParametricModel& model, double phi, const Tolerances& tol) {
  return sld(model, phi, tol).qfi;
}

double qfi_from_generator_variance(const PureState& psi,
                                   const HermitianObservable& generator) {
  if (psi.dim() != generator.dim()) {
    throw DimensionMismatch("qfi_from_generator_variance: dimension mismatch");
  }
  const ComplexVector& v = psi.amplitudes();
  const ComplexVector gv = generator.matrix() * v;
  const double mean = v.dot(gv).real();
  const double second = gv.squaredNorm();
  return 4.0 * std::max(0.0, second - mean * mean);
}

OutcomeDistribution outcome_distribution(const ParametricModel& model,
                                         double phi, const Povm& povm) {
  if (povm.dim() != model.dim()) {
    throw DimensionMismatch("outcome_distribution: POVM dimension " +
                            std::to_string(povm.dim()) + " vs state " +
                            std::to_string(model.dim()));
  }
  const ComplexMatrix rho = model.state(phi).matrix();
  const ComplexMatrix drho = state_derivative(model, phi);
  const ComplexMatrix d2rho = state_second_derivative(model, phi);

  OutcomeDistribution dist;
  for (const auto& element : povm.elements()) {
    // Tr(A B) for Hermitian B without forming the product.
    auto trace_with = [&](const ComplexMatrix& a) {
      return (a.cwiseProduct(element.op.transpose())).sum().real();
    };
    dist.labels.push_back(element.label);
    dist.values.push_back(element.value);
    dist.probabilities.push_back(std::clamp(trace_with(rho), 0.0, 1.0));
    dist.derivatives.push_back(trace_with(drho));
    dist.second_derivatives.push_back(trace_with(d2rho));
  }
  return dist;
}

double cfi(const OutcomeDistribution& dist, const Tolerances& tol) {
  double total = 0.0;
  for (std::size_t x = 0; x < dist.size(); ++x) {
    const double p = dist.probabilities[x];
    const double dp = dist.derivatives[x];
    if (p <= tol.cfi_probability) {
      const double d2p =
          x < dist.second_derivatives.size() ? dist.second_derivatives[x] : 0.0;
      if (std::abs(dp) > tol.cfi_derivative ||
          std::abs(d2p) > tol.cfi_curvature) {
        std::ostringstream msg;
        msg << "cfi: outcome '" << dist.labels[x] << "' has p = " << p
            << " but dp = " << dp << ", d2p = " << d2p
            << "; Fisher information is singular here";
        throw SingularOutcome(msg.str());
      }
      continue;
    }
    total += dp * dp / p;
  }
  return total;
}

}  // namespace qcrb
