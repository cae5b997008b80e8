#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "support.hpp"

using namespace qcrb;

namespace {
constexpr double kPi = std::numbers::pi;

OutcomeDistribution two_outcomes(double p0) {
  OutcomeDistribution d;
  d.labels = {"+", "-"};
  d.values = {1.0, -1.0};
  d.probabilities = {p0, 1.0 - p0};
  d.derivatives = {0.0, 0.0};
  d.second_derivatives = {0.0, 0.0};
  return d;
}

ShotRecord exact_record(const OutcomeDistribution& d, std::vector<std::uint64_t> counts) {
  ShotRecord r;
  r.labels = d.labels;
  r.values = d.values;
  r.counts = std::move(counts);
  for (auto c : r.counts) r.total += c;
  return r;
}

MeanCurve sxsx_curve() {
  return MeanCurve(ghz::ghz_model(2), HermitianObservable::product({0, 1, 0, 0}, 2));
}
}  // namespace

TEST(Sampling, Deterministic) {
  const auto r = sample_shots(two_outcomes(1.0), 1000, 5);
  EXPECT_EQ(r.counts[0], 1000u);
  EXPECT_EQ(r.counts[1], 0u);
  EXPECT_EQ(r.total, 1000u);
  EXPECT_DOUBLE_EQ(r.sample_mean(), 1.0);
}

TEST(Sampling, BinomialConcentration) {
  const std::uint64_t nu = 1000000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = sample_shots(two_outcomes(0.5), nu, seed);
    const double sigma = std::sqrt(nu / 4.0);
    EXPECT_LT(std::abs(static_cast<double>(r.counts[0]) - nu / 2.0), 5 * sigma);
    EXPECT_EQ(r.counts[0] + r.counts[1], nu);
  }
}

TEST(Sampling, ReproducibleForSeed) {
  const auto d = outcome_distribution(ghz::ghz_model(2), 0.3,
                                      ghz::local_product_povm(2, ghz::LocalBasis::x_basis));
  const auto a = sample_shots(d, 5000, 77);
  const auto b = sample_shots(d, 5000, 77);
  const auto c = sample_shots(d, 5000, 78);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
  EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
  EXPECT_EQ(trial_seed(1, 4), trial_seed(1, 4));
}

TEST(SampleMean, NoiselessInversion) {
  // At pi/6 the x-basis probabilities are (3, 1, 1, 3)/8.
  const double phi0 = kPi / 6;
  const auto d = outcome_distribution(ghz::ghz_model(2), phi0,
                                      ghz::local_product_povm(2, ghz::LocalBasis::x_basis));
  const auto rec = exact_record(d, {3, 1, 1, 3});
  const auto curve = sxsx_curve();
  const auto est = estimate_phi_sample_mean(rec, curve, kPi / 8);
  EXPECT_NEAR(est.phi_hat, phi0, 1e-9);
  EXPECT_FALSE(est.out_of_branch);
  EXPECT_TRUE(est.branch.contains(est.phi_hat));
  EXPECT_NEAR(est.branch.lo, 0.0, 1e-9);
  EXPECT_NEAR(est.branch.hi, kPi / 2, 1e-9);
}

TEST(SampleMean, SingularCenterIsRejected) {
  const auto d = outcome_distribution(ghz::ghz_model(2), 0.3,
                                      ghz::local_product_povm(2, ghz::LocalBasis::x_basis));
  const auto rec = exact_record(d, {3, 1, 1, 3});
  EXPECT_THROW(estimate_phi_sample_mean(rec, sxsx_curve(), kPi / 2), PreconditionViolated);
}

TEST(SampleMean, OutOfBranchIsClipped) {
  const auto d = outcome_distribution(ghz::ghz_model(2), 0.3,
                                      ghz::local_product_povm(2, ghz::LocalBasis::x_basis));
  // Every shot reads +1: mean 1 is the image of the branch endpoint.
  auto rec = exact_record(d, {8, 0, 0, 0});
  const Interval narrow{0.2, 0.6};
  const auto est = estimate_phi_sample_mean(rec, sxsx_curve(), kPi / 8, narrow);
  EXPECT_TRUE(est.out_of_branch);
  EXPECT_DOUBLE_EQ(est.phi_hat, 0.2);
}

TEST(Mle, NoiselessRecord) {
  const double phi0 = kPi / 6;
  const auto povm = ghz::local_product_povm(2, ghz::LocalBasis::x_basis);
  const auto d = outcome_distribution(ghz::ghz_model(2), phi0, povm);
  const auto rec = exact_record(d, {3, 1, 1, 3});
  const auto est = estimate_phi_mle(rec, ghz::ghz_model(2), povm, default_mle_interval(kPi / 8, 2));
  EXPECT_NEAR(est.phi_hat, phi0, 1e-8);
  EXPECT_EQ(est.method, EstimatorMethod::maximum_likelihood);
}

TEST(Mle, FlatLikelihood) {
  const auto povm = Povm::computational_basis(4);
  const auto d = outcome_distribution(ghz::ghz_model(2), 0.3, povm);
  const auto rec = exact_record(d, {5, 0, 0, 5});
  EXPECT_THROW(estimate_phi_mle(rec, ghz::ghz_model(2), povm, {0.0, 1.0}), FlatLikelihood);
}

TEST(Clt, Binomial) {
  const long long nu = 10000;
  std::vector<double> means;
  for (int t = 0; t < 500; ++t) {
    means.push_back(sample_shots(two_outcomes(0.5), nu, trial_seed(3, t)).sample_mean());
  }
  const auto rep = verify_clt_link(means, 1.0, nu);
  EXPECT_NEAR(rep.empirical_variance, 1e-4, 0.2e-4);
  EXPECT_TRUE(rep.within_three_se);
  std::vector<double> few(50, 0.0);
  EXPECT_THROW(verify_clt_link(few, 1.0, nu), InsufficientTrials);
}

TEST(Clt, GhzParityVariance) {
  const long long nu = 10000;
  const auto d = outcome_distribution(ghz::ghz_model(2), kPi / 8,
                                      ghz::local_product_povm(2, ghz::LocalBasis::x_basis));
  std::vector<double> means;
  for (int t = 0; t < 500; ++t) means.push_back(sample_shots(d, nu, trial_seed(8, t)).sample_mean());
  const double var = std::pow(std::sin(kPi / 4), 2);
  const auto rep = verify_clt_link(means, var, nu);
  EXPECT_NEAR(rep.empirical_variance, var / nu, 0.2 * var / nu);
}

TEST(Clt, DeterministicDistribution) {
  std::vector<double> means;
  for (int t = 0; t < 100; ++t) means.push_back(sample_shots(two_outcomes(1.0), 100, t).sample_mean());
  EXPECT_EQ(verify_clt_link(means, 0.0, 100).empirical_variance, 0.0);
}

namespace {
SimulationSummary run(long long nu, int trials, std::uint64_t seed, unsigned threads) {
  SimulationConfig cfg;
  cfg.nu = nu;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.phi_true = kPi / 8;
  cfg.branch_center = kPi / 8;
  cfg.threads = threads;
  return simulate(ghz::ghz_model(2), HermitianObservable::product({0, 1, 0, 0}, 2),
                  ghz::local_product_povm(2, ghz::LocalBasis::x_basis), cfg);
}
}  // namespace

TEST(Simulate, IndependentOfThreadCount) {
  const auto a = run(2000, 20, 4, 1);
  const auto b = run(2000, 20, 4, 3);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    EXPECT_EQ(a.trials[i].sample_mean_estimate.phi_hat, b.trials[i].sample_mean_estimate.phi_hat);
    EXPECT_EQ(a.trials[i].mle_estimate->phi_hat, b.trials[i].mle_estimate->phi_hat);
  }
  EXPECT_EQ(a.mse_sample_mean, b.mse_sample_mean);
  EXPECT_LE(a.decomposition_residual, 1e-12);
}

TEST(Simulate, MseScalesAsInverseNu) {
  // log-log slope of MSE against nu.
  std::vector<double> xs, ys;
  for (long long nu : {1000LL, 4000LL, 16000LL, 64000LL}) {
    const auto s = run(nu, 200, 11, 1);
    xs.push_back(std::log(static_cast<double>(nu)));
    ys.push_back(std::log(s.mse_sample_mean));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, -1.0, 0.1);
}

TEST(Simulate, ErrorOrdering) {
  // At the optimal point the predicted error equals the bound; both
  // estimators sit near it and never clearly below it.
  const auto s = run(20000, 200, 21, 1);
  EXPECT_NEAR(s.predicted_ep, s.qcrb, 1e-12);
  EXPECT_GT(s.mse_sample_mean, 0.7 * s.qcrb);
  ASSERT_TRUE(s.mse_mle.has_value());
  EXPECT_GT(*s.mse_mle, 0.7 * s.qcrb);
}
