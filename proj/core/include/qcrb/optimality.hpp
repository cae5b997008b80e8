#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qcrb/information.hpp"

namespace qcrb {

struct Expectations {
  double mean = 0.0;
  double second_moment = 0.0;
};

// <O> and <O^2>. Throws DimensionMismatch, or NumericalFailure when an
// imaginary part above 1e-10 survives (i.e. O is not Hermitian enough).
Expectations observable_expectations(const ParametricModel& model, double phi,
                                     const HermitianObservable& obs);

struct ErrorPropagationReport {
  double mean = 0.0;
  double variance = 0.0;
  // d<O>/dphi from Tr(d rho O), and the same from <{O, L}>/2.
  double slope = 0.0;
  double slope_from_sld = 0.0;
  long long nu = 1;
  double qfi = 0.0;
  // Var(O) / (nu slope^2)
  double delta_phi_sq = 0.0;
  // (1 + (Im<OL> / Re<OL>)^2) / (nu F)
  double intermediate_bound = 0.0;
  // 1 / (nu F)
  double qcrb = 0.0;
};

// Throws SingularSensitivity when |slope| <= tol.slope * ||O||_F *
// max(1, ||d rho||_F); the error-propagation estimate is undefined there.
ErrorPropagationReport error_propagation(const ParametricModel& model,
                                         double phi,
                                         const HermitianObservable& obs,
                                         long long nu,
                                         const Tolerances& tol = {});

enum class ConditionVariant {
  // Delta O sqrt(rho) = alpha L sqrt(rho)
  mixed_state,
  // Delta O |psi> = alpha L |psi>
  pure_state,
  // Delta O |psi> = -2i alpha Delta G |psi>
  pure_unitary,
};

std::string_view variant_name(ConditionVariant v);

enum class OptimalityDiagnostic {
  none,
  // F = 0: the family carries no information about phi.
  no_information,
};

struct OptimalityReport {
  double alpha = 0.0;
  double residual_rel = 0.0;
  double im_part = 0.0;
  double anticommutator_mean = 0.0;
  double qfi = 0.0;
  bool is_optimal = false;
  ConditionVariant condition_variant = ConditionVariant::mixed_state;
  OptimalityDiagnostic diagnostic = OptimalityDiagnostic::none;
};

// Fits real alpha by least squares and reports whether the observable
// saturates the quantum Cramer-Rao bound. The pure variants throw
// VariantInapplicable unless rho_phi is pure (and, for pure_unitary, the
// model is a unitary family).
OptimalityReport check_observable_optimality(
    const ParametricModel& model, double phi, const HermitianObservable& obs,
    ConditionVariant variant = ConditionVariant::mixed_state,
    const Tolerances& tol = {});

struct PovmOptimalityReport {
  std::vector<double> per_outcome_u;
  std::vector<double> per_outcome_residual;
  bool is_optimal = false;
};

// Tests sqrt(M_x) sqrt(rho) = u_x sqrt(M_x) L sqrt(rho) with real u_x.
PovmOptimalityReport check_povm_optimality(const ParametricModel& model,
                                           double phi, const Povm& povm,
                                           const Tolerances& tol = {});

struct ErrorDecomposition {
  double total = 0.0;
  double variance_term = 0.0;
  double bias_term = 0.0;
};

// Units-corrected mean-square deviation of the estimates, split into spread
// and squared bias. Means are empirical averages over the samples.
ErrorDecomposition estimator_error_decomposition(std::span<const double> samples,
                                                 double phi_true,
                                                 double slope = 1.0);

struct UncertaintyTerms {
  double variance_product = 0.0;
  double commutator_term = 0.0;      // |<[X, Y]>|^2 / 4
  double anticommutator_term = 0.0;  // <{dX, dY}>^2 / 4
};

// Both sides of the Schrodinger-Robertson relation for X, Y on rho.
UncertaintyTerms uncertainty_relation(const DensityMatrix& rho,
                                      const HermitianObservable& x,
                                      const HermitianObservable& y);

}  // namespace qcrb
