// Acceptance checks. One line per criterion: PASS/FAIL, id, name, detail.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace qcrb;
using qcrb::testing::random_density;
using qcrb::testing::random_family_member;
using qcrb::testing::random_hermitian;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Phase at least margin * spacing away from every singular point.
double generic_phi(std::mt19937_64& rng, const ghz::SingularSet& set, double margin) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (;;) {
    const double phi = u(rng);
    if (set.distance(phi) >= margin * set.spacing) return phi;
  }
}

void heisenberg_limit(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int cases = 0;
  for (int n = 1; n <= 8; ++n) {
    const auto model = ghz::ghz_model(n);
    for (int k = 0; k < 20; ++k) {
      const auto c = random_family_member(rng);
      const double phi = generic_phi(rng, ghz::singular_points(n, c), 0.05);
      const long long nu = 1000;
      const auto r = error_propagation(model, phi, ghz::optimal_separable_observable(n, c), nu);
      worst = std::max(worst, std::abs(r.delta_phi_sq * nu * n * n - 1.0));
      ++cases;
    }
  }
  const double secs = seconds_since(t0);
  if (worst > 1e-8) o.fail("max |dphi^2 nu N^2 - 1| = " + std::to_string(worst));
  if (secs >= 10.0) o.fail("runtime " + std::to_string(secs) + " s");
  o.detail << cases << " cases, max rel dev " << worst << ", " << secs << " s";
}

void qfi_two_paths(Outcome& o) {
  double worst_solver = 0.0, worst_oracle = 0.0, worst_gap = 0.0;
  for (int n = 1; n <= 8; ++n) {
    for (double phi : {0.0, 0.37, 1.3, -2.2}) {
      const double a = qfi(ghz::ghz_model(n), phi);
      const double b = qfi_from_generator_variance(ghz::ghz_state(n, phi),
                                                   collective_spin(Axis::z, n));
      worst_solver = std::max(worst_solver, std::abs(a - n * n));
      worst_oracle = std::max(worst_oracle, std::abs(b - n * n));
      worst_gap = std::max(worst_gap, std::abs(a - b));
    }
  }
  if (worst_solver > 1e-9) o.fail("solver off by " + std::to_string(worst_solver));
  if (worst_oracle > 1e-9) o.fail("variance oracle off by " + std::to_string(worst_oracle));
  if (worst_gap > 1e-9) o.fail("paths disagree by " + std::to_string(worst_gap));
  o.detail << "max |F - N^2|: solver " << worst_solver << ", oracle " << worst_oracle
           << ", gap " << worst_gap;
}

void optimality_discrimination(Outcome& o) {
  std::mt19937_64 rng(202);
  int false_verdicts = 0, accepted = 0, rejected = 0;
  double worst_residual = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const auto model = ghz::ghz_model(n);
    for (int k = 0; k < 5; ++k) {
      const auto c = random_family_member(rng);
      const double phi = generic_phi(rng, ghz::singular_points(n, c), 0.05);
      const auto rep =
          check_observable_optimality(model, phi, ghz::optimal_separable_observable(n, c));
      worst_residual = std::max(worst_residual, rep.residual_rel);
      if (!rep.is_optimal || rep.residual_rel > 1e-9) ++false_verdicts; else ++accepted;
    }
    const double phi = 0.3 + 0.1 * n;
    if (check_observable_optimality(model, phi, HermitianObservable::product({0, 0, 0, 1}, n))
            .is_optimal)
      ++false_verdicts;
    else
      ++rejected;
  }
  if (check_observable_optimality(ghz::ghz_model(2), 0.41,
                                  HermitianObservable::product({{0, 1, 0, 0}, {0, 0, 0, 1}}))
          .is_optimal)
    ++false_verdicts;
  else
    ++rejected;

  // Product observables with a0 or a3 nonzero on every site. N = 1 is
  // excluded: a0 drops out of Delta O there, so a0 != 0 alone stays optimal.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick_n(2, 6);
  std::uniform_real_distribution<double> pick_phi(-kPi, kPi);
  for (int k = 0; k < 50; ++k) {
    const int n = pick_n(rng);
    std::vector<PauliCoefficients> sites;
    for (int s = 0; s < n; ++s) {
      PauliCoefficients c{u(rng), u(rng), u(rng), u(rng)};
      if (k % 3 == 0) c.a3 = 0.0;
      if (k % 3 == 1) c.a0 = 0.0;
      sites.push_back(c);
    }
    const auto rep = check_observable_optimality(ghz::ghz_model(n), pick_phi(rng),
                                                 HermitianObservable::product(sites));
    if (rep.is_optimal) ++false_verdicts; else ++rejected;
  }
  if (false_verdicts != 0) o.fail(std::to_string(false_verdicts) + " false verdicts");
  o.detail << accepted << " accepted, " << rejected << " rejected, " << false_verdicts
           << " false, max family residual " << worst_residual;
}

void two_qubit_lambda(Outcome& o) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  const auto povm = ghz::local_product_povm(2, ghz::LocalBasis::x_basis);
  const auto model = ghz::ghz_model(2);
  double worst_lambda = 0.0, worst_cfi = 0.0;
  int povm_failures = 0, flag_errors = 0, n = 0;
  while (n < 100) {
    const double phi = u(rng);
    const double k = std::round(phi / (kPi / 2));
    if (std::abs(phi - k * kPi / 2) < 1e-3) continue;
    ++n;
    const auto sol = ghz::two_qubit_lambda_solution(phi, ghz::LocalBasis::x_basis);
    if (sol.singular) ++flag_errors;
    const double t = -2 * std::tan(phi), c = 2 * std::cos(phi) / std::sin(phi);
    const double ref[4] = {t, c, c, t};
    for (int i = 0; i < 4; ++i) {
      worst_lambda = std::max(worst_lambda, std::abs(sol.lambda[i] - ref[i]) /
                                                std::max(1.0, std::abs(ref[i])));
    }
    if (!check_povm_optimality(model, phi, povm).is_optimal) ++povm_failures;
    worst_cfi = std::max(worst_cfi, std::abs(cfi(outcome_distribution(model, phi, povm)) - 4.0));
  }
  for (int k = -4; k <= 4; ++k) {
    if (!ghz::two_qubit_lambda_solution(k * kPi / 2, ghz::LocalBasis::x_basis).singular)
      ++flag_errors;
  }
  if (worst_lambda > 1e-9) o.fail("lambda off by " + std::to_string(worst_lambda));
  if (flag_errors) o.fail(std::to_string(flag_errors) + " singular-flag errors");
  if (povm_failures) o.fail(std::to_string(povm_failures) + " POVM verdicts not optimal");
  if (worst_cfi > 1e-9) o.fail("CFI off by " + std::to_string(worst_cfi));
  o.detail << n << " phases, max lambda rel dev " << worst_lambda << ", max |CFI - 4| "
           << worst_cfi << ", grid k = -4..4 flagged";
}

void singular_points(Outcome& o) {
  int raised = 0, missed = 0, spurious = 0;
  for (int n = 1; n <= 6; ++n) {
    const auto model = ghz::ghz_model(n);
    const auto obs = ghz::optimal_separable_observable(n, {0, 1, 0, 0});
    for (int k = 0; k < 2 * n; ++k) {
      const double phi = k * kPi / n;
      try {
        error_propagation(model, phi, obs, 1);
        ++missed;
      } catch (const SingularSensitivity&) {
        ++raised;
      }
      for (double off : {-1e-6, 1e-6, kPi / (2 * n)}) {
        try {
          error_propagation(model, phi + off, obs, 1);
        } catch (const SingularSensitivity&) {
          ++spurious;
        }
      }
    }
  }
  if (missed) o.fail(std::to_string(missed) + " singular points not raised");
  if (spurious) o.fail(std::to_string(spurious) + " raised off the grid");
  o.detail << raised << " raised on k pi/N, " << spurious << " off-grid raises";
}

void parity_and_ramsey(Outcome& o) {
  double worst_parity = 0.0, worst_ramsey = 0.0;
  std::mt19937_64 rng(606);
  for (int n = 1; n <= 8; ++n) {
    worst_parity = std::max(worst_parity, (ghz::parity_observable(n).matrix() -
                                           ghz::parity_from_collective_spin(n).matrix())
                                              .cwiseAbs()
                                              .maxCoeff());
    for (int k = 0; k < 3; ++k) {
      const auto c = k == 0 ? PauliCoefficients{0, 1, 0, 0} : random_family_member(rng);
      const auto r = ghz::ramsey_rotate(ghz::optimal_separable_observable(n, c), n);
      if (!r.sigma_z_sign) {
        o.fail("no sign for optimal-family input");
        continue;
      }
      const auto target =
          HermitianObservable::product({0, 0, c.a2, *r.sigma_z_sign * c.a1}, n).matrix();
      worst_ramsey =
          std::max(worst_ramsey, (r.observable.matrix() - target).cwiseAbs().maxCoeff());
    }
  }
  if (worst_parity != 0.0) o.fail("parity identity off by " + std::to_string(worst_parity));
  if (worst_ramsey > 1e-10) o.fail("Ramsey map off by " + std::to_string(worst_ramsey));
  o.detail << "parity max |diff| " << worst_parity << ", Ramsey max |diff| " << worst_ramsey;
}

// a >= b with -1e-9 slack, relative above unit scale.
bool holds(double a, double b) { return a >= b - 1e-9 * std::max(1.0, std::abs(b)); }

void bound_chain(Outcome& o) {
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> pick_dim(2, 16);
  int violations = 0, optimal = 0, equality_failures = 0, singular = 0;
  for (int k = 0; k < 200; ++k) {
    const Index dim = pick_dim(rng);
    const Index rank =
        k % 2 == 0 ? dim : std::uniform_int_distribution<Index>(1, dim - 1)(rng);
    const auto model = ParametricModel::unitary(random_density(dim, rank, rng),
                                                HermitianObservable(random_hermitian(dim, rng)));
    const double phi = 0.1 * k;
    HermitianObservable obs(random_hermitian(dim, rng));
    // Every fourth pair uses an affine function of the SLD, which is optimal.
    if (k % 4 == 3) {
      const ComplexMatrix l = sld(model, phi).L.matrix();
      obs = HermitianObservable(ComplexMatrix(0.8 * l + 0.3 * ComplexMatrix::Identity(dim, dim)));
    }
    const HermitianObservable other(random_hermitian(dim, rng));
    const auto u = uncertainty_relation(model.state(phi), obs, other);
    if (!holds(u.variance_product, u.commutator_term + u.anticommutator_term)) ++violations;

    ErrorPropagationReport r;
    try {
      r = error_propagation(model, phi, obs, 3);
    } catch (const SingularSensitivity&) {
      ++singular;
      continue;
    }
    if (!holds(r.delta_phi_sq, r.intermediate_bound) || !holds(r.intermediate_bound, r.qcrb))
      ++violations;
    if (check_observable_optimality(model, phi, obs).is_optimal) {
      ++optimal;
      if (rel(r.delta_phi_sq, r.qcrb) > 1e-7 || rel(r.intermediate_bound, r.qcrb) > 1e-7)
        ++equality_failures;
    }
  }
  if (violations) o.fail(std::to_string(violations) + " inequality violations");
  if (equality_failures)
    o.fail(std::to_string(equality_failures) + " optimal verdicts without equality");
  if (optimal == 0) o.fail("no optimal verdicts exercised");
  o.detail << "200 pairs, " << violations << " violations, " << optimal
           << " optimal verdicts with equality, " << singular << " singular";
}

void monte_carlo_saturation(Outcome& o) {
  const auto t0 = Clock::now();
  SimulationConfig cfg;
  cfg.nu = 100000;
  cfg.trials = 200;
  cfg.seed = 42;
  cfg.phi_true = kPi / 8;
  cfg.branch_center = kPi / 8;
  cfg.threads = worker_count();
  const auto s = simulate(ghz::ghz_model(2), ghz::optimal_separable_observable(2, {0, 1, 0, 0}),
                          ghz::local_product_povm(2, ghz::LocalBasis::x_basis), cfg);
  const double secs = seconds_since(t0);
  const double target = 1.0 / (static_cast<double>(cfg.nu) * 4.0);
  const double dev_sm = rel(s.mse_sample_mean, target);
  const double dev_mle = rel(*s.mse_mle, target);
  if (dev_sm > 0.10) o.fail("sample-mean MSE off by " + std::to_string(dev_sm));
  if (dev_mle > 0.15) o.fail("MLE MSE off by " + std::to_string(dev_mle));
  if (s.decomposition_residual > 1e-9) o.fail("decomposition residual too large");
  if (secs >= 60.0) o.fail("runtime " + std::to_string(secs) + " s");
  o.detail << "MSE sample-mean " << s.mse_sample_mean << " (" << dev_sm * 100 << "%), MLE "
           << *s.mse_mle << " (" << dev_mle * 100 << "%), target " << target
           << ", decomposition residual " << s.decomposition_residual << ", " << secs << " s";
}

void cross_path_consistency(Outcome& o) {
  std::mt19937_64 rng(909);
  std::uniform_int_distribution<int> pick_n(1, 6);
  std::uniform_real_distribution<double> pick_phi(-kPi, kPi);
  double worst_exp = 0.0, worst_sld = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = pick_n(rng);
    const auto c = random_family_member(rng);
    const double phi = pick_phi(rng);
    const auto closed = ghz::ghz_closed_form_expectations(n, phi, c);
    const auto generic =
        observable_expectations(ghz::ghz_model(n), phi, ghz::optimal_separable_observable(n, c));
    worst_exp = std::max({worst_exp, std::abs(closed.mean - generic.mean),
                          std::abs(closed.second_moment - generic.second_moment)});
    const auto psi = ghz::ghz_state(n, phi).amplitudes();
    const ComplexVector a = ghz::ghz_sld_closed_form(n, phi).matrix() * psi;
    const ComplexVector b = sld(ghz::ghz_model(n), phi).L.matrix() * psi;
    worst_sld = std::max(worst_sld, (a - b).norm());
  }
  if (worst_exp > 1e-10) o.fail("expectations off by " + std::to_string(worst_exp));
  if (worst_sld > 1e-9) o.fail("SLD action off by " + std::to_string(worst_sld));
  o.detail << "100 triples, max expectation diff " << worst_exp << ", max SLD action diff "
           << worst_sld;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"heisenberg_limit", heisenberg_limit},
      {"qfi_two_paths", qfi_two_paths},
      {"optimality_discrimination", optimality_discrimination},
      {"two_qubit_lambda", two_qubit_lambda},
      {"singular_points", singular_points},
      {"parity_and_ramsey", parity_and_ramsey},
      {"bound_chain", bound_chain},
      {"monte_carlo_saturation", monte_carlo_saturation},
      {"cross_path_consistency", cross_path_consistency},
  };
  int failures = 0;
  int id = 0;
  for (const auto& [name, fn] : criteria) {
    ++id;
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
