#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcrb/state.hpp"
#include "qcrb/tolerances.hpp"

namespace qcrb {

enum class ModelKind { unitary_generator, blackbox };

// A one-parameter family phi -> rho_phi. Either rho_phi =
// exp(-iG phi) rho_in exp(iG phi), or an arbitrary state function whose
// derivatives are taken by central finite differences.
class ParametricModel {
 public:
  using StateFunction = std::function<DensityMatrix(double)>;

  static ParametricModel unitary(DensityMatrix initial,
                                 HermitianObservable generator);
  static ParametricModel unitary(PureState initial,
                                 HermitianObservable generator);
  static ParametricModel blackbox(Index dim, StateFunction state_fn);

  ModelKind kind() const { return kind_; }
  Index dim() const { return dim_; }

  DensityMatrix state(double phi) const;
  // Present only for unitary models built from a PureState.
  std::optional<PureState> pure_state(double phi) const;
  const std::optional<HermitianObservable>& generator() const {
    return generator_;
  }

  // Finite-difference step h = cbrt(eps) * max(1, |phi|).
  static double fd_step(double phi);

 private:
  ParametricModel() = default;
  ComplexMatrix evolution(double phi) const;

  ModelKind kind_ = ModelKind::blackbox;
  Index dim_ = 0;
  std::optional<DensityMatrix> initial_;
  std::optional<PureState> initial_pure_;
  std::optional<HermitianObservable> generator_;
  std::optional<EigenDecomposition> generator_eig_;
  StateFunction state_fn_;
};

// d rho / d phi. Exact -i[G, rho] for unitary models; central difference
// for black-box models. Throws EvaluationFailure if the state function
// throws.
ComplexMatrix state_derivative(const ParametricModel& model, double phi);

// d^2 rho / d phi^2. Exact -[G,[G,rho]] for unitary models.
ComplexMatrix state_second_derivative(const ParametricModel& model, double phi);

struct SldResult {
  HermitianObservable L;
  ComplexMatrix drho;
  double qfi = 0.0;
  double residual = 0.0;
  int kernel_dim = 0;
};

// Solves d rho = (rho L + L rho)/2 in the eigenbasis of rho. Entries on
// the kernel x kernel block are set to zero.
SldResult solve_sld(const DensityMatrix& rho, const ComplexMatrix& drho,
                    const Tolerances& tol = {});
SldResult sld(const ParametricModel& model, double phi,
              const Tolerances& tol = {});

double qfi(const ParametricModel& model, double phi,
           const Tolerances& tol = {});

// 4 <(Delta G)^2> on a pure state; the QFI of a unitary pure-state family.
double qfi_from_generator_variance(const PureState& psi,
                                   const HermitianObservable& generator);

struct OutcomeDistribution {
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<double> probabilities;
  std::vector<double> derivatives;
  std::vector<double> second_derivatives;

  std::size_t size() const { return probabilities.size(); }
};

// p(x) = Tr(rho M_x) clamped to [0, 1]; dp(x) = Tr(d rho M_x).
OutcomeDistribution outcome_distribution(const ParametricModel& model,
                                         double phi, const Povm& povm);

// Sum over p(x) > eps of dp^2 / p. Throws SingularOutcome when an outcome
// with p <= eps has a nonzero first or second derivative: the term is a
// 0/0 limit that the distribution alone cannot resolve.
double cfi(const OutcomeDistribution& dist, const Tolerances& tol = {});

}  // namespace qcrb
