#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace qcrb;
using namespace qcrb::ghz;

namespace {
constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(GhzState, Examples) {
  const auto s2 = ghz_state(2, 0.0).amplitudes();
  EXPECT_NEAR(s2(0).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s2(3).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s2(1), Complex(0.0));

  const auto s1 = ghz_state(1, kPi).amplitudes();
  EXPECT_NEAR(s1(1).real(), -1 / std::sqrt(2.0), 1e-15);

  const auto s3 = ghz_state(3, kPi / 3).amplitudes();
  EXPECT_NEAR(s3(7).real(), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s3(7).imag(), 0.0, 1e-15);

  EXPECT_THROW(ghz_state(0, 0.0), PreconditionViolated);
}

TEST(GhzState, DensitySpectrum) {
  const auto e = hermitian_eigendecomposition(ghz_state(2, 0.0).projector());
  EXPECT_NEAR(e.values(0), 0.0, 1e-14);
  EXPECT_NEAR(e.values(2), 0.0, 1e-14);
  EXPECT_NEAR(e.values(3), 1.0, 1e-14);
}

TEST(GhzSld, ClosedForm) {
  const double phi = 0.21;
  const auto l = ghz_sld_closed_form(2, phi).matrix();
  EXPECT_LT(std::abs(l(0, 3) - (-2.0 * kI * std::exp(-2.0 * kI * phi))), 1e-15);
  EXPECT_LT(std::abs(l(3, 0) - (2.0 * kI * std::exp(2.0 * kI * phi))), 1e-15);
  EXPECT_LT((ghz_sld_closed_form(1, 0.0).matrix() - pauli::sigma_y()).norm(), 1e-15);
}

TEST(GhzSld, MatchesSolverOnState) {
  for (int n = 1; n <= 6; ++n) {
    for (double phi : {0.0, 0.3, 1.9}) {
      const auto psi = ghz_state(n, phi).amplitudes();
      const ComplexVector closed = ghz_sld_closed_form(n, phi).matrix() * psi;
      const ComplexVector solver = sld(ghz_model(n), phi).L.matrix() * psi;
      EXPECT_LT((closed - solver).norm(), 1e-9) << n << " " << phi;
    }
  }
}

TEST(OptimalFamily, Construction) {
  for (int n = 1; n <= 4; ++n) {
    EXPECT_LT((optimal_separable_observable(n, {0, 1, 0, 0}).matrix() -
               tensor_power(pauli::sigma_x(), n)).norm(), 1e-15);
    EXPECT_LT((optimal_separable_observable(n, {0, 0, 1, 0}).matrix() -
               tensor_power(pauli::sigma_y(), n)).norm(), 1e-15);
    EXPECT_NEAR(ghz_closed_form_expectations(n, 0.2, {0, 1, 1, 0}).second_moment,
                std::pow(2.0, n), 1e-12);
  }
  EXPECT_THROW(optimal_separable_observable(2, {0.1, 1, 0, 0}), InvalidCoefficients);
  EXPECT_THROW(optimal_separable_observable(2, {0, 1, 0, 0.2}), InvalidCoefficients);
  EXPECT_THROW(optimal_separable_observable(2, {0, 0, 0, 0}), InvalidCoefficients);
}

TEST(OptimalFamily, ClosedFormExpectations) {
  EXPECT_NEAR(ghz_closed_form_expectations(3, 0.0, {0, 1, 0, 0}).mean, 1.0, 1e-15);
  EXPECT_NEAR(ghz_closed_form_expectations(2, 0.0, {0, 0, 1, 0}).mean, -1.0, 1e-15);
  EXPECT_NEAR(ghz_closed_form_expectations(5, 0.7, {0, 0.6, 0.8, 0}).second_moment, 1.0, 1e-14);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 6;
    const auto c = qcrb::testing::random_family_member(rng);
    const double phi = u(rng);
    const auto closed = ghz_closed_form_expectations(n, phi, c);
    const auto generic = observable_expectations(ghz_model(n), phi,
                                                 optimal_separable_observable(n, c));
    EXPECT_NEAR(closed.mean, generic.mean, 1e-10);
    EXPECT_NEAR(closed.second_moment, generic.second_moment, 1e-10);
  }
}

TEST(SingularPoints, Examples) {
  for (int n = 1; n <= 6; ++n) {
    const auto x = singular_points(n, {0, 1, 0, 0});
    EXPECT_NEAR(x.offset, 0.0, 1e-15);
    EXPECT_NEAR(x.spacing, kPi / n, 1e-15);
    for (int k = -3; k <= 3; ++k) EXPECT_TRUE(x.contains(k * kPi / n)) << n << k;
    EXPECT_FALSE(x.contains(kPi / (2 * n)));

    const auto y = singular_points(n, {0, 0, 1, 0});
    if (n % 2 == 1) {
      for (int k = -2; k <= 2; ++k) EXPECT_TRUE(y.contains((2 * k + 1) * kPi / (2 * n)));
      EXPECT_FALSE(y.contains(0.0));
    } else {
      EXPECT_TRUE(y.contains(kPi / n));
      EXPECT_TRUE(y.contains(0.0));
    }
  }
  const auto pts = singular_points(2, {0, 1, 0, 0}).points_in(0.0, kPi);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_NEAR(pts[1], kPi / 2, 1e-15);
}

TEST(SingularPoints, SlopeVanishesThere) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const auto c = qcrb::testing::random_family_member(rng);
    const auto set = singular_points(n, c);
    const auto o = optimal_separable_observable(n, c);
    for (double phi : set.points_in(-1.0, 1.0)) {
      EXPECT_THROW(error_propagation(ghz_model(n), phi, o, 1), SingularSensitivity)
          << trial << " " << phi;
    }
  }
}

TEST(Ramsey, Examples) {
  for (int n = 1; n <= 5; ++n) {
    const auto rx = ramsey_rotate(optimal_separable_observable(n, {0, 1, 0, 0}), n);
    ASSERT_TRUE(rx.sigma_z_sign.has_value());
    const double s = *rx.sigma_z_sign;
    EXPECT_LT((rx.observable.matrix() - std::pow(s, n) * parity_observable(n).matrix()).norm(),
              1e-10);
    const auto ry = ramsey_rotate(optimal_separable_observable(n, {0, 0, 1, 0}), n);
    EXPECT_LT((ry.observable.matrix() - tensor_power(pauli::sigma_y(), n)).norm(), 1e-10);
    const Index dim = Index{1} << n;
    const auto ri = ramsey_rotate(HermitianObservable(ComplexMatrix::Identity(dim, dim)), n);
    EXPECT_LT((ri.observable.matrix() - ComplexMatrix::Identity(dim, dim)).norm(), 1e-12);
    EXPECT_FALSE(ri.sigma_z_sign.has_value());
  }
}

TEST(Ramsey, FamilyMapsToRotatedFamily) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    const auto c = qcrb::testing::random_family_member(rng);
    const auto r = ramsey_rotate(optimal_separable_observable(n, c), n);
    ASSERT_TRUE(r.sigma_z_sign.has_value());
    const PauliCoefficients target{0, 0, c.a2, *r.sigma_z_sign * c.a1};
    EXPECT_LT((r.observable.matrix() - HermitianObservable::product(target, n).matrix()).norm(),
              1e-10);
  }
}

TEST(Ramsey, PreservesSpectrum) {
  std::mt19937_64 rng(14);
  for (int n = 1; n <= 4; ++n) {
    const Index dim = Index{1} << n;
    const HermitianObservable o(qcrb::testing::random_hermitian(dim, rng));
    const auto r = ramsey_rotate(o, n);
    const auto a = hermitian_eigendecomposition(o.matrix()).values;
    const auto b = hermitian_eigendecomposition(r.observable.matrix()).values;
    EXPECT_LT((a - b).norm(), 1e-10);
  }
}

TEST(Parity, Identities) {
  EXPECT_LT((parity_observable(1).matrix() - pauli::sigma_z()).norm(), 1e-15);
  const auto p2 = parity_observable(2).matrix();
  EXPECT_EQ(p2(0, 0), Complex(1.0));
  EXPECT_EQ(p2(1, 1), Complex(-1.0));
  EXPECT_EQ(p2(2, 2), Complex(-1.0));
  EXPECT_EQ(p2(3, 3), Complex(1.0));
  for (int n = 1; n <= 8; ++n) {
    EXPECT_EQ((parity_observable(n).matrix() - parity_from_collective_spin(n).matrix()).norm(),
              0.0)
        << n;
  }
}

TEST(Lambda, Examples) {
  const auto q = two_qubit_lambda_solution(kPi / 4, LocalBasis::x_basis);
  EXPECT_FALSE(q.singular);
  EXPECT_NEAR(q.lambda[0], -2.0, 1e-9);
  EXPECT_NEAR(q.lambda[1], 2.0, 1e-9);
  EXPECT_NEAR(q.lambda[2], 2.0, 1e-9);
  EXPECT_NEAR(q.lambda[3], -2.0, 1e-9);

  const auto s = two_qubit_lambda_solution(kPi / 6, LocalBasis::x_basis);
  EXPECT_NEAR(s.lambda[0], -2 / std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(s.lambda[1], 2 * std::sqrt(3.0), 1e-9);

  EXPECT_TRUE(two_qubit_lambda_solution(0.0, LocalBasis::x_basis).singular);
  EXPECT_TRUE(two_qubit_lambda_solution(kPi / 2, LocalBasis::y_basis).singular);
  EXPECT_TRUE(two_qubit_lambda_solution(-kPi, LocalBasis::x_basis).singular);
}

TEST(Lambda, YBasisSwapsPairs) {
  const auto y = two_qubit_lambda_solution(kPi / 6, LocalBasis::y_basis);
  EXPECT_NEAR(y.lambda[0], 2 * std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(y.lambda[1], -2 / std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(y.lambda[2], -2 / std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(y.lambda[3], 2 * std::sqrt(3.0), 1e-9);
}

TEST(Lambda, KOperatorReproducesSldAction) {
  for (auto basis : {LocalBasis::x_basis, LocalBasis::y_basis}) {
    for (double phi : {0.2, 0.9, 2.0, -1.2}) {
      const auto sol = two_qubit_lambda_solution(phi, basis);
      const auto psi = ghz_state(2, phi).amplitudes();
      const ComplexVector got = assemble_k_operator(sol) * psi;
      const ComplexVector ref = ghz_sld_closed_form(2, phi).matrix() * psi;
      EXPECT_LT((got - ref).norm(), 1e-9);
      // K is itself a valid SLD for the pure state.
      const ComplexMatrix rho = ghz_state(2, phi).projector();
      const ComplexMatrix k = assemble_k_operator(sol);
      const ComplexMatrix d = 0.5 * (rho * k + k * rho);
      EXPECT_LT((d - state_derivative(ghz_model(2), phi)).norm(), 1e-9);
    }
  }
  EXPECT_THROW(assemble_k_operator(two_qubit_lambda_solution(0.0, LocalBasis::x_basis)),
               PreconditionViolated);
}

TEST(Lambda, ProductBasisCfiIsHeisenberg) {
  for (auto basis : {LocalBasis::x_basis, LocalBasis::y_basis}) {
    for (double phi : {0.2, 0.9, 2.0}) {
      const auto d = outcome_distribution(ghz_model(2), phi, local_product_povm(2, basis));
      EXPECT_NEAR(cfi(d), 4.0, 1e-9);
    }
  }
}
