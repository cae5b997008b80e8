#include "qcrb/optimality.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qcrb/errors.hpp"

namespace qcrb {

namespace {

// Below this the family is treated as carrying no information.
constexpr double kMinQfi = 1e-12;

void require_same_dim(const ParametricModel& model,
                      const HermitianObservable& obs, const char* where) {
  if (obs.dim() != model.dim()) {
    std::ostringstream msg;
    msg << where << ": observable dimension " << obs.dim() << " vs state "
        << model.dim();
    throw DimensionMismatch(msg.str());
  }
}

double real_checked(Complex z, double scale, const char* what) {
  if (std::abs(z.imag()) > 1e-10 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << what << " has imaginary part " << z.imag();
    throw NumericalFailure(msg.str());
  }
  return z.real();
}

// Real least-squares fit of a ~ coeff * b, with the relative residual
// ||a - coeff b|| / max(||a||, |coeff| ||b||).
struct RealFit {
  double coeff = 0.0;
  double residual_rel = 0.0;
};

template <typename A, typename B>
RealFit fit_real_multiple(const A& a, const B& b) {
  RealFit fit;
  const double b_sq = b.squaredNorm();
  if (b_sq > 0.0) {
    fit.coeff = (b.adjoint() * a).trace().real() / b_sq;
  }
  const double denom = std::max(a.norm(), std::abs(fit.coeff) * std::sqrt(b_sq));
  if (denom > 0.0) {
    fit.residual_rel = (a - fit.coeff * b).norm() / denom;
  }
  return fit;
}

ComplexVector pure_vector(const ParametricModel& model, double phi,
                          const DensityMatrix& rho, double tol) {
  if (auto psi = model.pure_state(phi)) {
    return psi->amplitudes();
  }
  if (std::abs(rho.purity() - 1.0) > tol) {
    std::ostringstream msg;
    msg << "pure-state condition requested but Tr(rho^2) = " << rho.purity();
    throw VariantInapplicable(msg.str());
  }
  const auto eig = hermitian_eigendecomposition(rho.matrix());
  return eig.vectors.col(eig.vectors.cols() - 1);
}

}  // namespace

std::string_view variant_name(ConditionVariant v) {
  switch (v) {
    case ConditionVariant::mixed_state:
      return "mixed_state";
    case ConditionVariant::pure_state:
      return "pure_state";
    case ConditionVariant::pure_unitary:
      return "pure_unitary";
  }
  return "unknown";
}

Expectations observable_expectations(const ParametricModel& model, double phi,
                                     const HermitianObservable& obs) {
  require_same_dim(model, obs, "observable_expectations");
  const DensityMatrix rho = model.state(phi);
  const ComplexMatrix& o = obs.matrix();
  const double scale = o.norm();
  Expectations e;
  e.mean = real_checked(expectation(rho, o), scale, "<O>");
  const ComplexMatrix rho_o = rho.matrix() * o;
  e.second_moment = real_checked(rho_o.cwiseProduct(o.transpose()).sum(),
                                 scale * scale, "<O^2>");
  return e;
}

ErrorPropagationReport error_propagation(const ParametricModel& model,
                                         double phi,
                                         const HermitianObservable& obs,
                                         long long nu, const Tolerances& tol) {
  require_same_dim(model, obs, "error_propagation");
  if (nu < 1) {
    throw PreconditionViolated("error_propagation: nu must be >= 1");
  }
  const DensityMatrix rho = model.state(phi);
  const SldResult s = solve_sld(rho, state_derivative(model, phi), tol);
  const ComplexMatrix& o = obs.matrix();
  const ComplexMatrix& l = s.L.matrix();

  ErrorPropagationReport r;
  r.nu = nu;
  r.qfi = s.qfi;
  const double o_norm = o.norm();
  r.mean = real_checked(expectation(rho, o), o_norm, "<O>");
  // Tr(rho O X) = sum((rho O) .* X^T); one product serves <O^2> and <OL>.
  const ComplexMatrix rho_o = rho.matrix() * o;
  const double second = real_checked(rho_o.cwiseProduct(o.transpose()).sum(),
                                     o_norm * o_norm, "<O^2>");
  r.variance = std::max(0.0, second - r.mean * r.mean);
  r.slope = (s.drho.cwiseProduct(o.transpose())).sum().real();
  const Complex ol = rho_o.cwiseProduct(l.transpose()).sum();
  r.slope_from_sld = ol.real();

  const double scale = std::max(o_norm, std::numeric_limits<double>::min()) *
                       std::max(1.0, s.drho.norm());
  if (std::abs(r.slope - r.slope_from_sld) > 1e-7 * scale) {
    std::ostringstream msg;
    msg << "error_propagation: Tr(d rho O) = " << r.slope
        << " disagrees with <{O, L}>/2 = " << r.slope_from_sld;
    throw NumericalFailure(msg.str());
  }
  if (std::abs(r.slope) <= tol.slope * scale) {
    std::ostringstream msg;
    msg << "error_propagation: d<O>/dphi = " << r.slope << " at phi = " << phi
        << "; the error-propagation estimate is singular";
    throw SingularSensitivity(msg.str());
  }

  const double nu_d = static_cast<double>(nu);
  r.delta_phi_sq = r.variance / (nu_d * r.slope * r.slope);
  if (s.qfi > 0.0) {
    const double ratio = ol.imag() / ol.real();
    r.qcrb = 1.0 / (nu_d * s.qfi);
    r.intermediate_bound = (1.0 + ratio * ratio) * r.qcrb;
  } else {
    r.qcrb = std::numeric_limits<double>::infinity();
    r.intermediate_bound = std::numeric_limits<double>::infinity();
  }
  return r;
}

OptimalityReport check_observable_optimality(const ParametricModel& model,
                                             double phi,
                                             const HermitianObservable& obs,
                                             ConditionVariant variant,
                                             const Tolerances& tol) {
  require_same_dim(model, obs, "check_observable_optimality");
  if (variant == ConditionVariant::pure_unitary &&
      model.kind() != ModelKind::unitary_generator) {
    throw VariantInapplicable(
        "pure_unitary condition needs a unitary-generator model");
  }
  const DensityMatrix rho = model.state(phi);
  const SldResult s = solve_sld(rho, state_derivative(model, phi), tol);
  const ComplexMatrix& o = obs.matrix();
  const ComplexMatrix& l = s.L.matrix();
  const Index dim = model.dim();

  OptimalityReport r;
  r.condition_variant = variant;
  r.qfi = s.qfi;
  const double mean = real_checked(expectation(rho, o), o.norm(), "<O>");
  const ComplexMatrix delta_o = o - mean * ComplexMatrix::Identity(dim, dim);
  const Complex ol = expectation(rho, o * l);
  r.im_part = ol.imag();
  r.anticommutator_mean = 2.0 * ol.real();

  double a_norm = 0.0;
  double b_norm = 0.0;
  RealFit fit;
  switch (variant) {
    case ConditionVariant::mixed_state: {
      const ComplexMatrix root = matrix_sqrt_psd(rho, tol.support_cutoff);
      const ComplexMatrix a = delta_o * root;
      const ComplexMatrix b = l * root;
      fit = fit_real_multiple(a, b);
      a_norm = a.norm();
      b_norm = b.norm();
      break;
    }
    case ConditionVariant::pure_state:
    case ConditionVariant::pure_unitary: {
      const ComplexVector psi = pure_vector(model, phi, rho, tol.input);
      const ComplexVector a = delta_o * psi;
      ComplexVector b;
      if (variant == ConditionVariant::pure_state) {
        b = l * psi;
      } else {
        const ComplexMatrix& g = model.generator()->matrix();
        const double g_mean = psi.dot(g * psi).real();
        b = -2.0 * kI *
            ((g - g_mean * ComplexMatrix::Identity(dim, dim)) * psi);
      }
      fit = fit_real_multiple(a, b);
      a_norm = a.norm();
      b_norm = b.norm();
      break;
    }
  }
  r.residual_rel = fit.residual_rel;

  if (s.qfi <= kMinQfi) {
    r.diagnostic = OptimalityDiagnostic::no_information;
    r.alpha = 0.0;
    r.is_optimal = false;
    return r;
  }
  r.alpha = fit.coeff;
  const double alpha_scale = b_norm > 0.0 ? a_norm / b_norm : 0.0;
  const bool alpha_nonzero = std::abs(r.alpha) > tol.alpha * alpha_scale &&
                             r.alpha != 0.0;
  const bool im_zero =
      std::abs(r.im_part) <= tol.optimality * a_norm * std::sqrt(s.qfi);
  r.is_optimal =
      r.residual_rel <= tol.optimality && alpha_nonzero && im_zero;
  return r;
}

PovmOptimalityReport check_povm_optimality(const ParametricModel& model,
                                           double phi, const Povm& povm,
                                           const Tolerances& tol) {
  if (povm.dim() != model.dim()) {
    throw DimensionMismatch("check_povm_optimality: POVM dimension " +
                            std::to_string(povm.dim()) + " vs state " +
                            std::to_string(model.dim()));
  }
  const DensityMatrix rho = model.state(phi);
  const SldResult s = solve_sld(rho, state_derivative(model, phi), tol);
  const ComplexMatrix root = matrix_sqrt_psd(rho, tol.support_cutoff);
  const ComplexMatrix l_root = s.L.matrix() * root;

  PovmOptimalityReport r;
  r.is_optimal = true;
  for (const auto& element : povm.elements()) {
    const ComplexMatrix m_root =
        psd_sqrt(element.op, tol.algorithmic,
                 tol.support_cutoff * element.op.trace().real());
    const ComplexMatrix a = m_root * root;
    const ComplexMatrix b = m_root * l_root;
    const RealFit fit = fit_real_multiple(a, b);
    r.per_outcome_u.push_back(fit.coeff);
    r.per_outcome_residual.push_back(fit.residual_rel);
    if (fit.residual_rel > tol.optimality) r.is_optimal = false;
  }
  return r;
}

ErrorDecomposition estimator_error_decomposition(std::span<const double> samples,
                                                 double phi_true,
                                                 double slope) {
  if (samples.size() < 2) {
    throw InsufficientSamples("estimator_error_decomposition: need >= 2 samples");
  }
  const double s = std::abs(slope);
  if (!(s > 0.0)) {
    throw PreconditionViolated(
        "estimator_error_decomposition: slope normalizer must be nonzero");
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x / s;
  mean /= n;
  ErrorDecomposition d;
  for (double x : samples) {
    const double y = x / s;
    d.total += (y - phi_true) * (y - phi_true);
    d.variance_term += (y - mean) * (y - mean);
  }
  d.total /= n;
  d.variance_term /= n;
  d.bias_term = (mean - phi_true) * (mean - phi_true);
  return d;
}

UncertaintyTerms uncertainty_relation(const DensityMatrix& rho,
                                      const HermitianObservable& x,
                                      const HermitianObservable& y) {
  if (x.dim() != rho.dim() || y.dim() != rho.dim()) {
    throw DimensionMismatch("uncertainty_relation: dimension mismatch");
  }
  const Index dim = rho.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix dx = x.matrix() - expectation(rho, x.matrix()).real() * id;
  const ComplexMatrix dy = y.matrix() - expectation(rho, y.matrix()).real() * id;
  UncertaintyTerms t;
  t.variance_product =
      expectation(rho, dx * dx).real() * expectation(rho, dy * dy).real();
  t.commutator_term =
      0.25 * std::norm(expectation(rho, commutator(x.matrix(), y.matrix())));
  const double anti = expectation(rho, anticommutator(dx, dy)).real();
  t.anticommutator_term = 0.25 * anti * anti;
  return t;
}

}  // namespace qcrb
