#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcrb/qcrb.hpp"

namespace qcrb::cli {

// Malformed or invalid model file. `field` is a dotted path such as
// "observable.pauli_product[1]"; line/column are 1-based, 0 when unknown.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string field, int line, int column, const std::string& what);

  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

// Evaluates an angle expression: numbers, "pi", + - * /, parentheses and
// unary minus ("pi/8", "-3*pi/4", "0.25"). Throws std::invalid_argument.
double parse_angle(std::string_view text);

// steps >= 2 points from start to stop inclusive.
std::vector<double> phi_range(double start, double stop, int steps);

// "START:STOP:STEPS" as accepted by --phi-range.
std::vector<double> parse_phi_range(std::string_view text);

enum class PovmKind {
  none,
  x_basis_product,
  y_basis_product,
  computational,
  eigenprojectors_of_observable,
  custom,
};

struct ModelSpec {
  std::string source;
  std::optional<ParametricModel> model;
  Index dim = 0;
  // Number of qubits when dim is a power of two, otherwise 0.
  int n_qubits = 0;
  bool ghz = false;

  std::optional<HermitianObservable> observable;
  std::string observable_kind;  // pauli_product | parity | matrix

  PovmKind povm_kind = PovmKind::none;
  std::optional<Povm> povm;

  std::vector<double> phis;
  bool phi_is_range = false;
  long long nu = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  Tolerances tol;

  ghz::LocalBasis basis = ghz::LocalBasis::x_basis;
  std::optional<double> branch_center;
  bool run_mle = true;
  std::optional<Interval> mle_interval;
};

ModelSpec parse_model_spec(const std::string& text, const std::string& source = "<string>");
ModelSpec load_model_spec(const std::string& path);

}  // namespace qcrb::cli
