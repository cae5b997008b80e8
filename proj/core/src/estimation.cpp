#include "qcrb/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qcrb/errors.hpp"
#include "qcrb/parallel.hpp"

namespace qcrb {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::vector<double> probabilities_at(const ParametricModel& model, double phi,
                                     const Povm& povm) {
  const ComplexMatrix rho = model.state(phi).matrix();
  std::vector<double> p;
  p.reserve(povm.size());
  for (const auto& e : povm.elements()) {
    p.push_back(std::clamp(
        (rho.cwiseProduct(e.op.transpose())).sum().real(), 0.0, 1.0));
  }
  return p;
}

double log_likelihood(const ShotRecord& record, const std::vector<double>& p) {
  double ll = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (record.counts[x] == 0) continue;
    if (p[x] <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(record.counts[x]) * std::log(p[x]);
  }
  return ll;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Zero of the slope between a (same sign as s0) and b (sign change).
double bisect_slope_zero(const MeanCurve& curve, double a, double b, int s0) {
  for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(a));
       ++it) {
    const double m = 0.5 * (a + b);
    if (sign_of(curve.slope(m)) == s0) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Returns the slope at center; throws SingularSensitivity if it vanishes.
double require_nonsingular(const MeanCurve& curve, double center,
                           const Tolerances& tol) {
  const double s0 = curve.slope(center);
  const double scale =
      curve.observable().matrix().norm() *
      std::max(1.0, state_derivative(curve.model(), center).norm());
  if (std::abs(s0) <= tol.slope * scale) {
    std::ostringstream msg;
    msg << "slope of <O> vanishes at branch center " << center;
    throw SingularSensitivity(msg.str());
  }
  return s0;
}

}  // namespace

double ShotRecord::sample_mean() const {
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t x = 0; x < counts.size(); ++x) {
    sum += static_cast<double>(counts[x]) * values[x];
  }
  return sum / static_cast<double>(total);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed + (trial + 1) * 0x9E3779B97F4A7C15ULL);
}

ShotRecord sample_shots(const OutcomeDistribution& dist, std::uint64_t nu,
                        std::uint64_t seed) {
  if (dist.size() == 0) {
    throw PreconditionViolated("sample_shots: empty distribution");
  }
  std::vector<double> cumulative(dist.size());
  double acc = 0.0;
  for (std::size_t x = 0; x < dist.size(); ++x) {
    acc += dist.probabilities[x];
    cumulative[x] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "sample_shots: probabilities sum to " << acc;
    throw PreconditionViolated(msg.str());
  }
  for (auto& c : cumulative) c /= acc;
  // Outcomes past the last nonzero probability can never be drawn.
  std::size_t last = dist.size() - 1;
  while (last > 0 && dist.probabilities[last] <= 0.0) --last;
  cumulative[last] = 1.0;

  ShotRecord record;
  record.labels = dist.labels;
  record.values = dist.values;
  record.counts.assign(dist.size(), 0);
  record.total = nu;
  record.seed = seed;
  std::mt19937_64 gen(seed);
  for (std::uint64_t shot = 0; shot < nu; ++shot) {
    const double u = uniform01(gen);
    const auto it = std::upper_bound(cumulative.begin(),
                                     cumulative.begin() + static_cast<long>(last) + 1, u);
    const auto x = static_cast<std::size_t>(
        std::min<long>(it - cumulative.begin(), static_cast<long>(last)));
    ++record.counts[x];
  }
  return record;
}

MeanCurve::MeanCurve(ParametricModel model, HermitianObservable obs)
    : model_(std::move(model)), obs_(std::move(obs)) {
  if (obs_.dim() != model_.dim()) {
    throw DimensionMismatch("MeanCurve: observable dimension mismatch");
  }
}

double MeanCurve::mean(double phi) const {
  return expectation(model_.state(phi), obs_.matrix()).real();
}

double MeanCurve::slope(double phi) const {
  return (state_derivative(model_, phi).cwiseProduct(obs_.matrix().transpose()))
      .sum()
      .real();
}

double MeanCurve::variance(double phi) const {
  const DensityMatrix rho = model_.state(phi);
  const double m = expectation(rho, obs_.matrix()).real();
  const double s = expectation(rho, obs_.matrix() * obs_.matrix()).real();
  return std::max(0.0, s - m * m);
}

Interval monotone_branch(const MeanCurve& curve, double center,
                         double max_half_width, const Tolerances& tol) {
  const double s0 = require_nonsingular(curve, center, tol);
  const int sign0 = sign_of(s0);
  constexpr int kSteps = 512;
  const double step = max_half_width / kSteps;
  auto walk = [&](double dir) {
    double x = center;
    for (int k = 1; k <= kSteps; ++k) {
      const double next = center + dir * step * k;
      if (sign_of(curve.slope(next)) != sign0) {
        return bisect_slope_zero(curve, x, next, sign0);
      }
      x = next;
    }
    return center + dir * max_half_width;
  };
  return {walk(-1.0), walk(1.0)};
}

std::string_view method_name(EstimatorMethod m) {
  return m == EstimatorMethod::sample_mean_inversion ? "sample_mean_inversion"
                                                     : "maximum_likelihood";
}

EstimatorResult invert_mean(const MeanCurve& curve, const Interval& branch,
                            double target, long long nu) {
  EstimatorResult r;
  r.method = EstimatorMethod::sample_mean_inversion;
  r.branch = branch;
  const double center = branch.center();
  const double slope_c = curve.slope(center);
  r.se_predicted = std::sqrt(curve.variance(center) /
                             (static_cast<double>(nu) * slope_c * slope_c));

  double lo = branch.lo;
  double hi = branch.hi;
  const double m_lo = curve.mean(lo);
  const double m_hi = curve.mean(hi);
  const bool increasing = m_hi > m_lo;
  const double m_min = std::min(m_lo, m_hi);
  const double m_max = std::max(m_lo, m_hi);
  if (target <= m_min || target >= m_max) {
    const bool at_lo = (target <= m_min) == increasing;
    r.phi_hat = at_lo ? lo : hi;
    r.out_of_branch = target < m_min || target > m_max;
    return r;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double m = curve.mean(mid);
    if ((m < target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.phi_hat = 0.5 * (lo + hi);
  return r;
}

EstimatorResult estimate_phi_sample_mean(const ShotRecord& record,
                                         const MeanCurve& curve,
                                         double branch_center,
                                         std::optional<Interval> branch,
                                         const Tolerances& tol) {
  if (record.total == 0) {
    throw PreconditionViolated("estimate_phi_sample_mean: empty record");
  }
  try {
    require_nonsingular(curve, branch_center, tol);
  } catch (const SingularSensitivity& e) {
    throw PreconditionViolated(std::string("estimate_phi_sample_mean: ") +
                               e.what());
  }
  const Interval b = branch ? *branch
                            : monotone_branch(curve, branch_center,
                                              std::numbers::pi, tol);
  if (!b.contains(branch_center)) {
    throw PreconditionViolated(
        "estimate_phi_sample_mean: branch does not contain its center");
  }
  EstimatorResult r = invert_mean(curve, b, record.sample_mean(),
                                  static_cast<long long>(record.total));
  const double s = curve.slope(branch_center);
  r.se_predicted = std::sqrt(curve.variance(branch_center) /
                             (static_cast<double>(record.total) * s * s));
  return r;
}

EstimatorResult estimate_phi_mle(const ShotRecord& record,
                                 const ParametricModel& model, const Povm& povm,
                                 const Interval& search_interval,
                                 const Tolerances& tol) {
  if (record.counts.size() != povm.size()) {
    throw DimensionMismatch("estimate_phi_mle: record has " +
                            std::to_string(record.counts.size()) +
                            " outcomes, POVM has " + std::to_string(povm.size()));
  }
  if (!(search_interval.hi > search_interval.lo)) {
    throw PreconditionViolated("estimate_phi_mle: empty search interval");
  }
  constexpr int kGrid = 256;
  const double lo = search_interval.lo;
  const double hi = search_interval.hi;
  const double width = hi - lo;
  const double center = search_interval.center();

  std::vector<double> grid(kGrid + 1);
  std::vector<double> ll(kGrid + 1);
  const std::vector<double> p_ref = probabilities_at(model, lo, povm);
  double variation = 0.0;
  for (int k = 0; k <= kGrid; ++k) {
    grid[k] = lo + width * k / kGrid;
    const auto p = probabilities_at(model, grid[k], povm);
    for (std::size_t x = 0; x < p.size(); ++x) {
      variation = std::max(variation, std::abs(p[x] - p_ref[x]));
    }
    ll[k] = log_likelihood(record, p);
  }
  if (variation <= tol.cfi_probability) {
    throw FlatLikelihood(
        "estimate_phi_mle: outcome probabilities do not depend on phi");
  }

  int best = 0;
  for (int k = 1; k <= kGrid; ++k) {
    if (ll[k] > ll[best] ||
        (ll[k] == ll[best] &&
         std::abs(grid[k] - center) < std::abs(grid[best] - center))) {
      best = k;
    }
  }
  if (!std::isfinite(ll[best])) {
    throw FlatLikelihood("estimate_phi_mle: likelihood is zero on the interval");
  }

  double a = grid[std::max(0, best - 1)];
  double b = grid[std::min(kGrid, best + 1)];
  auto f = [&](double phi) {
    return log_likelihood(record, probabilities_at(model, phi, povm));
  };
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double phi_hat = 0.5 * (a + b);
  if (f(phi_hat) < ll[best]) phi_hat = grid[best];

  // Value comparisons stall near sqrt(eps) on a flat peak. Polish with a
  // bisection on the score sum_x n_x dp/p, which keeps full precision.
  auto score = [&](double phi) {
    const auto dist = outcome_distribution(model, phi, povm);
    double s = 0.0;
    for (std::size_t x = 0; x < dist.size(); ++x) {
      if (record.counts[x] == 0) continue;
      s += static_cast<double>(record.counts[x]) * dist.derivatives[x] /
           dist.probabilities[x];
    }
    return s;
  };
  double sl = std::max(lo, phi_hat - 1e-7);
  double sh = std::min(hi, phi_hat + 1e-7);
  if (score(sl) > 0.0 && score(sh) < 0.0) {
    for (int it = 0; it < 80 && sh - sl > 1e-15; ++it) {
      const double mid = 0.5 * (sl + sh);
      if (score(mid) > 0.0) sl = mid; else sh = mid;
    }
    phi_hat = 0.5 * (sl + sh);
  }

  EstimatorResult r;
  r.method = EstimatorMethod::maximum_likelihood;
  r.phi_hat = phi_hat;
  r.branch = search_interval;
  try {
    const double fisher = cfi(outcome_distribution(model, phi_hat, povm), tol);
    r.se_predicted =
        fisher > 0.0
            ? 1.0 / std::sqrt(static_cast<double>(record.total) * fisher)
            : std::numeric_limits<double>::infinity();
  } catch (const SingularOutcome&) {
    r.se_predicted = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

Interval default_mle_interval(double branch_center, int n_qubits,
                              double margin_fraction) {
  const double half = std::numbers::pi / (2.0 * n_qubits);
  const double w = half * (1.0 - margin_fraction);
  return {branch_center - w, branch_center + w};
}

CltReport verify_clt_link(std::span<const double> trial_means,
                          double obs_variance, long long nu) {
  if (trial_means.size() < 100) {
    throw InsufficientTrials("verify_clt_link: need >= 100 trials, got " +
                             std::to_string(trial_means.size()));
  }
  const double t = static_cast<double>(trial_means.size());
  double mean = 0.0;
  for (double m : trial_means) mean += m;
  mean /= t;
  double var = 0.0;
  for (double m : trial_means) var += (m - mean) * (m - mean);
  var /= (t - 1.0);
  CltReport r;
  r.empirical_variance = var;
  r.predicted_variance = obs_variance / static_cast<double>(nu);
  r.standard_error = r.predicted_variance * std::sqrt(2.0 / (t - 1.0));
  r.within_three_se =
      std::abs(var - r.predicted_variance) <= 3.0 * r.standard_error;
  return r;
}

SimulationSummary simulate(const ParametricModel& model,
                           const HermitianObservable& obs, const Povm& povm,
                           const SimulationConfig& config,
                           const Tolerances& tol) {
  if (config.nu < 1 || config.trials < 1) {
    throw PreconditionViolated("simulate: nu and trials must be >= 1");
  }
  if (povm.dim() != obs.dim()) {
    throw DimensionMismatch("simulate: POVM and observable dimensions differ");
  }
  ComplexMatrix realized = ComplexMatrix::Zero(obs.dim(), obs.dim());
  for (const auto& e : povm.elements()) realized += e.value * e.op;
  if ((realized - obs.matrix()).norm() > 1e-9 * std::max(1.0, obs.matrix().norm())) {
    throw PreconditionViolated(
        "simulate: POVM outcome values do not realize the observable");
  }

  const MeanCurve curve(model, obs);
  SimulationSummary summary;
  summary.rng_algorithm = std::string(kRngAlgorithm);
  summary.branch = config.branch ? *config.branch
                                 : monotone_branch(curve, config.branch_center,
                                                   std::numbers::pi, tol);
  const Interval mle_interval =
      config.mle_interval ? *config.mle_interval : summary.branch;

  const OutcomeDistribution dist =
      outcome_distribution(model, config.phi_true, povm);
  const auto n_trials = static_cast<std::size_t>(config.trials);
  summary.trials.resize(n_trials);
  parallel_for(n_trials, config.threads, [&](std::size_t t) {
    TrialOutcome& out = summary.trials[t];
    out.seed = trial_seed(config.seed, t);
    const ShotRecord record =
        sample_shots(dist, static_cast<std::uint64_t>(config.nu), out.seed);
    out.sample_mean = record.sample_mean();
    out.sample_mean_estimate = estimate_phi_sample_mean(
        record, curve, config.branch_center, summary.branch, tol);
    if (config.run_mle) {
      out.mle_estimate = estimate_phi_mle(record, model, povm, mle_interval, tol);
    }
  });

  std::vector<double> estimates;
  std::vector<double> means;
  estimates.reserve(n_trials);
  means.reserve(n_trials);
  double sq = 0.0;
  double sq_mle = 0.0;
  for (const auto& t : summary.trials) {
    const double e = t.sample_mean_estimate.phi_hat;
    estimates.push_back(e);
    means.push_back(t.sample_mean);
    sq += (e - config.phi_true) * (e - config.phi_true);
    if (t.mle_estimate) {
      const double m = t.mle_estimate->phi_hat - config.phi_true;
      sq_mle += m * m;
    }
  }
  const double n = static_cast<double>(n_trials);
  summary.mse_sample_mean = sq / n;
  if (config.run_mle) summary.mse_mle = sq_mle / n;

  auto spread = [&](auto get) {
    double mu = 0.0;
    for (const auto& t : summary.trials) mu += get(t);
    mu /= n;
    double v = 0.0;
    for (const auto& t : summary.trials) v += (get(t) - mu) * (get(t) - mu);
    return n > 1 ? std::sqrt(v / (n - 1.0)) : 0.0;
  };
  const double se_sm =
      spread([](const TrialOutcome& t) { return t.sample_mean_estimate.phi_hat; });
  std::optional<double> se_mle;
  if (config.run_mle) {
    se_mle = spread([](const TrialOutcome& t) { return t.mle_estimate->phi_hat; });
  }
  for (auto& t : summary.trials) {
    t.sample_mean_estimate.se_empirical = se_sm;
    if (t.mle_estimate) t.mle_estimate->se_empirical = se_mle;
  }

  if (n_trials >= 2) {
    summary.decomposition =
        estimator_error_decomposition(estimates, config.phi_true);
    summary.decomposition_residual =
        std::abs(summary.mse_sample_mean - (summary.decomposition.variance_term +
                                            summary.decomposition.bias_term));
  }
  if (n_trials >= 100) {
    summary.clt = verify_clt_link(means, curve.variance(config.phi_true), config.nu);
  }
  const auto ep = error_propagation(model, config.phi_true, obs, config.nu, tol);
  summary.predicted_ep = ep.delta_phi_sq;
  summary.qcrb = ep.qcrb;
  return summary;
}

}  // namespace qcrb
