#pragma once

namespace qcrb {

// Numerical thresholds used across the library. Every entry point takes a
// Tolerances by const reference with a default-constructed value, so callers
// only override what they need.
struct Tolerances {
  // Validation of user-supplied states, observables and POVMs.
  double input = 1e-10;
  // Gates inside algorithms (Hermiticity of intermediate results, PSD roots).
  double algorithmic = 1e-8;
  // Eigenvalues of rho at or below support_cutoff * Tr(rho) count as kernel.
  double support_cutoff = 1e-12;
  // Relative residual below which an optimality condition is accepted.
  double optimality = 1e-8;
  // |alpha| must exceed this times its natural scale to count as nonzero.
  double alpha = 1e-10;
  // |d<O>/dphi| at or below this times its scale is a singular sensitivity.
  double slope = 1e-10;
  // Outcomes with p <= cfi_probability are treated as impossible.
  double cfi_probability = 1e-12;
  // Derivatives of impossible outcomes larger than this make CFI singular.
  double cfi_derivative = 1e-9;
  // Same for second derivatives; an impossible outcome with curvature c
  // contributes 2c to the CFI in the limit.
  double cfi_curvature = 1e-6;
  // Half-width of the window around analytically singular phases.
  double singular_window = 1e-10;
};

}  // namespace qcrb
