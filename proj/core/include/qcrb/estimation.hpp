#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcrb/optimality.hpp"

namespace qcrb {

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 seeded with splitmix64(seed + (trial+1)*0x9E3779B97F4A7C15); "
    "uniforms from the top 53 bits; inverse-CDF categorical draws";

struct ShotRecord {
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;

  // Average outcome value over the shots.
  double sample_mean() const;
};

// Seed of the independent stream used by trial `trial` of a run seeded
// with `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

// nu i.i.d. draws from dist. Bit-identical for a fixed seed.
ShotRecord sample_shots(const OutcomeDistribution& dist, std::uint64_t nu,
                        std::uint64_t seed);

// phi -> <O>_phi together with its slope and variance.
class MeanCurve {
 public:
  MeanCurve(ParametricModel model, HermitianObservable obs);

  double mean(double phi) const;
  double slope(double phi) const;
  double variance(double phi) const;
  const ParametricModel& model() const { return model_; }
  const HermitianObservable& observable() const { return obs_; }

 private:
  ParametricModel model_;
  HermitianObservable obs_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double center() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// The interval around center on which the curve is strictly monotone,
// bounded by the nearest zeros of the slope (at most max_half_width away).
// Throws SingularSensitivity when the slope vanishes at center.
Interval monotone_branch(const MeanCurve& curve, double center,
                         double max_half_width, const Tolerances& tol = {});

enum class EstimatorMethod { sample_mean_inversion, maximum_likelihood };

std::string_view method_name(EstimatorMethod m);

struct EstimatorResult {
  double phi_hat = 0.0;
  EstimatorMethod method = EstimatorMethod::sample_mean_inversion;
  // Error-propagation (sample mean) or Cramer-Rao (MLE) standard error.
  double se_predicted = 0.0;
  // Spread over repeated trials; filled by simulate().
  std::optional<double> se_empirical;
  Interval branch;
  // The empirical mean fell outside the branch image; phi_hat was clipped
  // to the nearest branch endpoint.
  bool out_of_branch = false;
};

// Inverts phi -> <O> on the branch. Returns the flagged clipped endpoint
// when target lies outside the branch image.
EstimatorResult invert_mean(const MeanCurve& curve, const Interval& branch,
                            double target, long long nu);

// Sample-mean inversion. The branch defaults to monotone_branch(curve,
// branch_center, pi). Throws PreconditionViolated when branch_center is a
// singular point of the curve.
EstimatorResult estimate_phi_sample_mean(const ShotRecord& record,
                                         const MeanCurve& curve,
                                         double branch_center,
                                         std::optional<Interval> branch = {},
                                         const Tolerances& tol = {});

// Maximum of sum_x counts(x) ln p_phi(x) over the interval: grid search
// followed by golden-section refinement to 1e-10. Throws FlatLikelihood if
// the outcome probabilities do not depend on phi over the interval.
EstimatorResult estimate_phi_mle(const ShotRecord& record,
                                 const ParametricModel& model, const Povm& povm,
                                 const Interval& search_interval,
                                 const Tolerances& tol = {});

// Default MLE window around a branch center: center +- (pi/(2N) - margin).
Interval default_mle_interval(double branch_center, int n_qubits,
                              double margin_fraction = 0.01);

struct CltReport {
  double empirical_variance = 0.0;
  double predicted_variance = 0.0;
  double standard_error = 0.0;
  bool within_three_se = false;
};

// Compares the spread of per-trial sample means with Var(O)/nu. Throws
// InsufficientTrials below 100 trials.
CltReport verify_clt_link(std::span<const double> trial_means,
                          double obs_variance, long long nu);

struct SimulationConfig {
  long long nu = 1;
  int trials = 1;
  std::uint64_t seed = 0;
  double phi_true = 0.0;
  double branch_center = 0.0;
  std::optional<Interval> branch;
  bool run_mle = true;
  std::optional<Interval> mle_interval;
  unsigned threads = 1;
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  double sample_mean = 0.0;
  EstimatorResult sample_mean_estimate;
  std::optional<EstimatorResult> mle_estimate;
};

struct SimulationSummary {
  std::vector<TrialOutcome> trials;
  double mse_sample_mean = 0.0;
  std::optional<double> mse_mle;
  ErrorDecomposition decomposition;
  double decomposition_residual = 0.0;
  double predicted_ep = 0.0;
  double qcrb = 0.0;
  std::optional<CltReport> clt;
  Interval branch;
  std::string rng_algorithm;
};

// Runs independent trials at phi_true: shots are drawn from povm, whose
// outcome values must realize obs (sum_x value_x M_x = obs). Per-trial
// streams come from trial_seed(seed, t); aggregation is by trial index.
SimulationSummary simulate(const ParametricModel& model,
                           const HermitianObservable& obs, const Povm& povm,
                           const SimulationConfig& config,
                           const Tolerances& tol = {});

}  // namespace qcrb
