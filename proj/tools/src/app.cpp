#include "qcrb_cli/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qcrb/qcrb.hpp"
#include "qcrb_cli/output.hpp"
#include "qcrb_cli/spec_file.hpp"

namespace qcrb::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Format { csv, json, text };

struct Options {
  std::string command;
  std::string model_path;
  std::string phi;
  std::string phi_range;
  std::string nu;
  std::string seed;
  std::string trials;
  std::string output;
  std::string out_path;
  std::optional<double> tol;
  bool show_sld = false;
  std::string basis;
  std::string variant;
};

// A usage problem on the command line; reported like a spec error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A field the command needs but the model file does not provide.
SpecError missing(const std::string& field, const std::string& what) {
  return SpecError(field, 0, 0, field + ": " + what);
}

// Integer flag values; integral floats such as 1e5 are accepted.
long long parse_count(const std::string& flag, const std::string& text) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && end == text.data() + text.size()) return v;
  double d = 0.0;
  const auto [dend, dec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (dec == std::errc() && dend == text.data() + text.size() && std::isfinite(d) &&
      d == std::floor(d) && std::abs(d) < 9.0e18) {
    return static_cast<long long>(d);
  }
  throw UsageError(flag + ": expected an integer, got '" + text + "'");
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && end == text.data() + text.size()) return v;
  throw UsageError("--seed: expected a non-negative integer, got '" + text + "'");
}

// The model file merged with command-line overrides.
struct Context {
  Options opt;
  ModelSpec spec;
  Format format = Format::text;
  Tolerances tol;
  std::string model_name;

  const ParametricModel& model() const { return *spec.model; }

  const HermitianObservable& observable() const {
    if (!spec.observable) {
      throw missing("observable", opt.command + " needs an observable");
    }
    return *spec.observable;
  }

  const std::vector<double>& phis() const {
    if (spec.phis.empty()) {
      throw missing("phi", opt.command + " needs phi (model file, --phi or --phi-range)");
    }
    return spec.phis;
  }

  double single_phi() const {
    const auto& p = phis();
    if (p.size() != 1) {
      throw missing("phi", opt.command + " takes a single phi, got " +
                                        std::to_string(p.size()));
    }
    return p.front();
  }

  // The measurement for cfi and simulate: the model's POVM, or the
  // observable's eigenprojectors when none is given.
  Povm povm(bool default_to_observable) const {
    if (spec.povm) return *spec.povm;
    if (default_to_observable && spec.observable) return Povm::eigenprojectors(*spec.observable);
    throw missing("povm", opt.command + " needs a povm");
  }
};

Json document(const Context& ctx, const Table& t) {
  Json doc = Json::object();
  doc["command"] = ctx.opt.command;
  doc["model"] = ctx.model_name;
  doc["rows"] = rows_json(t);
  return doc;
}

void emit_table(const Context& ctx, const Table& t, std::ostream& out) {
  switch (ctx.format) {
    case Format::csv: write_csv(t, out); break;
    case Format::text: write_text(t, out); break;
    case Format::json: out << document(ctx, t).dump(2) << '\n'; break;
  }
}

// d<O>/dphi = Tr(d rho O)
double trace_slope(const ParametricModel& model, double phi, const HermitianObservable& obs) {
  const ComplexMatrix drho = state_derivative(model, phi);
  return drho.cwiseProduct(obs.matrix().transpose()).sum().real();
}

double qcrb_of(double qfi, long long nu) {
  return qfi > 0.0 ? 1.0 / (static_cast<double>(nu) * qfi)
                   : std::numeric_limits<double>::infinity();
}

ConditionVariant parse_variant(const std::string& name) {
  if (name.empty() || name == "mixed_state") return ConditionVariant::mixed_state;
  if (name == "pure_state") return ConditionVariant::pure_state;
  if (name == "pure_unitary") return ConditionVariant::pure_unitary;
  throw UsageError("--variant: expected mixed_state, pure_state or pure_unitary");
}

std::string_view diagnostic_name(OptimalityDiagnostic d) {
  return d == OptimalityDiagnostic::no_information ? "no_information" : "none";
}

std::string_view basis_name(ghz::LocalBasis b) {
  return b == ghz::LocalBasis::x_basis ? "x_basis" : "y_basis";
}

struct RunResult {
  int code = kExitOk;
  std::string message;  // printed on stderr when non-empty
};

RunResult cmd_qfi(const Context& ctx, std::ostream& out) {
  Table t{{"phi", "qfi"}, {}};
  if (ctx.opt.show_sld) t.columns.push_back("sld");
  for (double phi : ctx.phis()) {
    const SldResult r = sld(ctx.model(), phi, ctx.tol);
    std::vector<Cell> row{phi, r.qfi};
    if (ctx.opt.show_sld) row.emplace_back(matrix_json(r.L.matrix()));
    t.rows.push_back(std::move(row));
  }
  emit_table(ctx, t, out);
  return {};
}

RunResult cmd_sld(const Context& ctx, std::ostream& out) {
  Table t{{"phi", "qfi", "residual", "kernel_dim", "sld"}, {}};
  for (double phi : ctx.phis()) {
    const SldResult r = sld(ctx.model(), phi, ctx.tol);
    t.rows.push_back({phi, r.qfi, r.residual, static_cast<long long>(r.kernel_dim),
                      matrix_json(r.L.matrix())});
  }
  emit_table(ctx, t, out);
  return {};
}

RunResult cmd_errprop(const Context& ctx, std::ostream& out) {
  Table t{{"phi", "mean", "variance", "slope", "slope_from_sld", "nu", "qfi", "delta_phi_sq",
           "intermediate_bound", "qcrb", "singular_flag"},
          {}};
  const auto& obs = ctx.observable();
  const long long nu = ctx.spec.nu;
  std::size_t singular = 0;
  for (double phi : ctx.phis()) {
    try {
      const auto r = error_propagation(ctx.model(), phi, obs, nu, ctx.tol);
      t.rows.push_back({phi, r.mean, r.variance, r.slope, r.slope_from_sld, nu, r.qfi,
                        r.delta_phi_sq, r.intermediate_bound, r.qcrb, false});
    } catch (const SingularSensitivity&) {
      ++singular;
      const auto e = observable_expectations(ctx.model(), phi, obs);
      const double f = qfi(ctx.model(), phi, ctx.tol);
      t.rows.push_back({phi, e.mean, e.second_moment - e.mean * e.mean,
                        trace_slope(ctx.model(), phi, obs), std::monostate{}, nu, f,
                        std::monostate{}, std::monostate{}, qcrb_of(f, nu), true});
    }
  }
  emit_table(ctx, t, out);
  if (singular > 0) {
    return {kExitRuntimeError, "SingularSensitivity: d<O>/dphi vanishes at " +
                                   std::to_string(singular) + " phi value(s)"};
  }
  return {};
}

bool is_singular(const Context& ctx, double phi) {
  try {
    error_propagation(ctx.model(), phi, ctx.observable(), ctx.spec.nu, ctx.tol);
    return false;
  } catch (const SingularSensitivity&) {
    return true;
  }
}

RunResult cmd_check_optimal(const Context& ctx, std::ostream& out) {
  Table t{{"phi", "alpha", "residual_rel", "im_part", "anticommutator_mean", "qfi", "is_optimal",
           "condition_variant", "diagnostic", "singular_flag"},
          {}};
  const auto& obs = ctx.observable();
  const ConditionVariant variant = parse_variant(ctx.opt.variant);
  bool all_optimal = true;
  for (double phi : ctx.phis()) {
    const auto r = check_observable_optimality(ctx.model(), phi, obs, variant, ctx.tol);
    const bool singular = is_singular(ctx, phi);
    const bool optimal = r.is_optimal && !singular;
    all_optimal = all_optimal && optimal;
    t.rows.push_back({phi, r.alpha, r.residual_rel, r.im_part, r.anticommutator_mean, r.qfi,
                      optimal, std::string(variant_name(r.condition_variant)),
                      std::string(diagnostic_name(r.diagnostic)), singular});
  }
  emit_table(ctx, t, out);
  return {all_optimal ? kExitOk : kExitNotOptimal, ""};
}

RunResult cmd_scan(const Context& ctx, std::ostream& out) {
  std::vector<double> phis = ctx.phis();
  if (phis.size() < 2) {
    throw missing("phi", "scan needs a range with steps >= 2");
  }
  std::sort(phis.begin(), phis.end());
  const auto& obs = ctx.observable();
  const ConditionVariant variant = parse_variant(ctx.opt.variant);
  std::optional<Povm> povm;
  if (ctx.spec.povm) povm = *ctx.spec.povm;
  const long long nu = ctx.spec.nu;

  Table t{{"phi", "qfi", "cfi", "variance", "slope", "delta_phi_ep", "qcrb", "alpha",
           "residual_rel", "is_optimal", "singular_flag"},
          {}};
  t.rows.resize(phis.size());
  parallel_for(phis.size(), worker_count(), [&](std::size_t i) {
    const double phi = phis[i];
    const double f = qfi(ctx.model(), phi, ctx.tol);
    Cell cfi_cell = std::monostate{};
    if (povm) {
      try {
        cfi_cell = cfi(outcome_distribution(ctx.model(), phi, *povm), ctx.tol);
      } catch (const SingularOutcome&) {
      }
    }
    const auto e = observable_expectations(ctx.model(), phi, obs);
    const double slope = trace_slope(ctx.model(), phi, obs);
    Cell ep = std::monostate{};
    bool singular = false;
    try {
      ep = error_propagation(ctx.model(), phi, obs, nu, ctx.tol).delta_phi_sq;
    } catch (const SingularSensitivity&) {
      singular = true;
    }
    const auto r = check_observable_optimality(ctx.model(), phi, obs, variant, ctx.tol);
    t.rows[i] = {phi,          f,           cfi_cell, e.second_moment - e.mean * e.mean,
                 slope,        ep,          qcrb_of(f, nu), r.alpha,
                 r.residual_rel, r.is_optimal && !singular, singular};
  });
  emit_table(ctx, t, out);
  return {};
}

RunResult cmd_cfi(const Context& ctx, std::ostream& out) {
  const Povm povm = ctx.povm(false);
  Table t{{"phi", "cfi", "qfi", "singular_outcome"}, {}};
  for (const auto& e : povm.elements()) t.columns.push_back("p_" + e.label);
  std::size_t singular = 0;
  for (double phi : ctx.phis()) {
    const auto dist = outcome_distribution(ctx.model(), phi, povm);
    std::vector<Cell> row{phi, std::monostate{}, qfi(ctx.model(), phi, ctx.tol), false};
    try {
      row[1] = cfi(dist, ctx.tol);
    } catch (const SingularOutcome&) {
      row[3] = true;
      ++singular;
    }
    for (double p : dist.probabilities) row.emplace_back(p);
    t.rows.push_back(std::move(row));
  }
  emit_table(ctx, t, out);
  if (singular > 0) {
    return {kExitRuntimeError, "SingularOutcome: an impossible outcome has a nonzero "
                               "derivative at " + std::to_string(singular) + " phi value(s)"};
  }
  return {};
}

RunResult cmd_lambda(const Context& ctx, std::ostream& out) {
  Table t{{"phi", "basis", "singular", "lambda_pp", "lambda_pm", "lambda_mp", "lambda_mm",
           "residual", "closed_form_gap"},
          {}};
  for (double phi : ctx.phis()) {
    const auto s = ghz::two_qubit_lambda_solution(phi, ctx.spec.basis, ctx.tol);
    std::vector<Cell> row{phi, std::string(basis_name(s.basis)), s.singular};
    for (double l : s.lambda) row.emplace_back(s.singular ? Cell{} : Cell{l});
    row.emplace_back(s.singular ? Cell{} : Cell{s.residual});
    row.emplace_back(s.singular ? Cell{} : Cell{s.closed_form_gap});
    t.rows.push_back(std::move(row));
  }
  emit_table(ctx, t, out);
  return {};
}

Json interval_json(const Interval& iv) {
  return Json::array({json_number(iv.lo), json_number(iv.hi)});
}

RunResult cmd_simulate(const Context& ctx, std::ostream& out) {
  const auto& obs = ctx.observable();
  if (!ctx.spec.seed) throw missing("seed", "simulate needs a seed");
  if (!ctx.spec.trials) throw missing("trials", "simulate needs trials");
  const Povm povm = ctx.povm(true);

  SimulationConfig cfg;
  cfg.nu = ctx.spec.nu;
  cfg.trials = *ctx.spec.trials;
  cfg.seed = *ctx.spec.seed;
  cfg.phi_true = ctx.single_phi();
  cfg.branch_center = ctx.spec.branch_center.value_or(cfg.phi_true);
  cfg.run_mle = ctx.spec.run_mle;
  cfg.mle_interval = ctx.spec.mle_interval;
  cfg.threads = worker_count();
  const SimulationSummary s = simulate(ctx.model(), obs, povm, cfg, ctx.tol);

  Table trials{{"trial", "seed", "sample_mean", "phi_hat_sample_mean", "out_of_branch",
                "se_predicted_sample_mean", "phi_hat_mle", "se_predicted_mle"},
               {}};
  for (std::size_t i = 0; i < s.trials.size(); ++i) {
    const auto& tr = s.trials[i];
    std::vector<Cell> row{static_cast<long long>(i), std::to_string(tr.seed), tr.sample_mean,
                          tr.sample_mean_estimate.phi_hat, tr.sample_mean_estimate.out_of_branch,
                          tr.sample_mean_estimate.se_predicted};
    if (tr.mle_estimate) {
      row.emplace_back(tr.mle_estimate->phi_hat);
      row.emplace_back(tr.mle_estimate->se_predicted);
    } else {
      row.emplace_back(std::monostate{});
      row.emplace_back(std::monostate{});
    }
    trials.rows.push_back(std::move(row));
  }

  if (ctx.format == Format::csv) {
    write_csv(trials, out);
    return {};
  }

  const double se_sm = s.trials.empty() ? kNaN : s.trials.front().sample_mean_estimate.se_empirical.value_or(kNaN);
  double se_mle = kNaN;
  if (!s.trials.empty() && s.trials.front().mle_estimate) {
    se_mle = s.trials.front().mle_estimate->se_empirical.value_or(kNaN);
  }

  Json summary = Json::object();
  summary["mse_sample_mean"] = json_number(s.mse_sample_mean);
  summary["mse_mle"] = s.mse_mle ? json_number(*s.mse_mle) : Json(nullptr);
  summary["predicted_ep"] = json_number(s.predicted_ep);
  summary["qcrb"] = json_number(s.qcrb);
  summary["se_empirical_sample_mean"] = json_number(se_sm);
  summary["se_empirical_mle"] = json_number(se_mle);
  summary["decomposition"] = {{"total", json_number(s.decomposition.total)},
                              {"variance_term", json_number(s.decomposition.variance_term)},
                              {"bias_term", json_number(s.decomposition.bias_term)}};
  summary["decomposition_residual"] = json_number(s.decomposition_residual);
  if (s.clt) {
    summary["clt"] = {{"empirical_variance", json_number(s.clt->empirical_variance)},
                      {"predicted_variance", json_number(s.clt->predicted_variance)},
                      {"standard_error", json_number(s.clt->standard_error)},
                      {"within_three_se", s.clt->within_three_se}};
  } else {
    summary["clt"] = nullptr;
  }

  if (ctx.format == Format::text) {
    Table t{{"quantity", "value"}, {}};
    t.rows.push_back({std::string("phi"), cfg.phi_true});
    t.rows.push_back({std::string("nu"), cfg.nu});
    t.rows.push_back({std::string("trials"), static_cast<long long>(cfg.trials)});
    t.rows.push_back({std::string("seed"), std::to_string(cfg.seed)});
    for (const auto& [k, v] : summary.items()) {
      if (v.is_number()) t.rows.push_back({k, v.get<double>()});
      else if (v.is_null()) t.rows.push_back({k, std::monostate{}});
    }
    write_text(t, out);
    return {};
  }

  Json povm_labels = Json::array();
  for (const auto& e : povm.elements()) povm_labels.push_back(e.label);
  Json config = Json::object();
  config["phi"] = json_number(cfg.phi_true);
  config["nu"] = cfg.nu;
  config["trials"] = cfg.trials;
  config["seed"] = cfg.seed;
  config["branch_center"] = json_number(cfg.branch_center);
  config["branch"] = interval_json(s.branch);
  config["run_mle"] = cfg.run_mle;
  config["mle_interval"] = interval_json(cfg.mle_interval.value_or(s.branch));
  config["povm_labels"] = povm_labels;

  Json doc = Json::object();
  doc["command"] = "simulate";
  doc["model"] = ctx.model_name;
  doc["config"] = config;
  doc["rng_algorithm"] = s.rng_algorithm;
  doc["summary"] = summary;
  Json rows = rows_json(trials);
  for (auto& r : rows) r["seed"] = std::stoull(r["seed"].get<std::string>());
  doc["trials"] = rows;
  out << doc.dump(2) << '\n';
  return {};
}

using Command = RunResult (*)(const Context&, std::ostream&);

const std::map<std::string, std::pair<Command, Format>>& commands() {
  static const std::map<std::string, std::pair<Command, Format>> table{
      {"qfi", {cmd_qfi, Format::text}},
      {"sld", {cmd_sld, Format::text}},
      {"errprop", {cmd_errprop, Format::text}},
      {"check-optimal", {cmd_check_optimal, Format::text}},
      {"scan", {cmd_scan, Format::csv}},
      {"cfi", {cmd_cfi, Format::text}},
      {"lambda", {cmd_lambda, Format::text}},
      {"simulate", {cmd_simulate, Format::json}},
  };
  return table;
}

Context build_context(const Options& opt) {
  Context ctx;
  ctx.opt = opt;
  if (!opt.model_path.empty()) {
    ctx.spec = load_model_spec(opt.model_path);
    ctx.model_name = opt.model_path;
  } else if (opt.command != "lambda") {
    throw UsageError(opt.command + " needs --model FILE");
  }
  if (opt.command != "lambda" && !ctx.spec.model) {
    throw missing("state", "model file defines no state");
  }

  if (!opt.phi.empty() && !opt.phi_range.empty()) {
    throw UsageError("--phi and --phi-range are mutually exclusive");
  }
  try {
    if (!opt.phi.empty()) {
      ctx.spec.phis = {parse_angle(opt.phi)};
      ctx.spec.phi_is_range = false;
    } else if (!opt.phi_range.empty()) {
      ctx.spec.phis = parse_phi_range(opt.phi_range);
      ctx.spec.phi_is_range = true;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(opt.phi.empty() ? "--phi-range" : "--phi") + ": " + e.what());
  }
  if (!opt.nu.empty()) {
    ctx.spec.nu = parse_count("--nu", opt.nu);
    if (ctx.spec.nu < 1) throw UsageError("--nu: must be >= 1");
  }
  if (!opt.seed.empty()) ctx.spec.seed = parse_seed(opt.seed);
  if (!opt.trials.empty()) {
    const long long n = parse_count("--trials", opt.trials);
    if (n < 1 || n > std::numeric_limits<int>::max()) throw UsageError("--trials: must be >= 1");
    ctx.spec.trials = static_cast<int>(n);
  }
  if (!opt.basis.empty()) {
    if (opt.basis == "x" || opt.basis == "x_basis") ctx.spec.basis = ghz::LocalBasis::x_basis;
    else if (opt.basis == "y" || opt.basis == "y_basis") ctx.spec.basis = ghz::LocalBasis::y_basis;
    else throw UsageError("--basis: expected x_basis or y_basis");
  }
  ctx.tol = ctx.spec.tol;
  if (opt.tol) {
    if (!(*opt.tol > 0.0)) throw UsageError("--tol: must be positive");
    ctx.tol.optimality = *opt.tol;
  }

  const auto& cmd = commands().at(opt.command);
  ctx.format = cmd.second;
  if (opt.output == "csv") ctx.format = Format::csv;
  else if (opt.output == "json") ctx.format = Format::json;
  else if (opt.output == "text") ctx.format = Format::text;
  return ctx;
}

// The parser's messages already name the field and position.
std::string spec_error_message(const SpecError& e, const std::string& source) {
  return "error: " + (source.empty() ? std::string() : source + ": ") + e.what();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Fisher information and Cramer-Rao bound laboratory", "qcrb-lab"};
  app.fallthrough();
  app.require_subcommand(1);
  Options opt;
  app.add_option("--model", opt.model_path, "Model file (YAML)");
  app.add_option("--phi", opt.phi, "Single phase, e.g. 0.3 or pi/8");
  app.add_option("--phi-range", opt.phi_range, "START:STOP:STEPS grid");
  app.add_option("--nu", opt.nu, "Number of repetitions");
  app.add_option("--seed", opt.seed, "RNG seed (simulate)");
  app.add_option("--trials", opt.trials, "Number of trials (simulate)");
  app.add_option("--output", opt.output, "Output format")
      ->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_option("--out", opt.out_path, "Write results to FILE instead of stdout");
  app.add_option("--tol", opt.tol, "Relative residual accepted by the optimality test");
  app.add_flag("--show-sld", opt.show_sld, "Print the SLD matrix (qfi)");
  app.add_option("--basis", opt.basis, "Local basis for lambda: x_basis or y_basis");
  app.add_option("--variant", opt.variant,
                 "Optimality condition: mixed_state, pure_state or pure_unitary");

  const std::map<std::string, std::string> about{
      {"qfi", "Quantum Fisher information at each phi"},
      {"sld", "Symmetric logarithmic derivative, residual and kernel dimension"},
      {"errprop", "Error-propagation variance and the bounds below it"},
      {"check-optimal", "Test whether the observable saturates the QCRB (exit 3 if not)"},
      {"scan", "Table of information and precision quantities over a phi grid"},
      {"cfi", "Classical Fisher information of the model's POVM"},
      {"lambda", "Two-qubit GHZ product-basis SLD coefficients"},
      {"simulate", "Monte Carlo estimation trials"},
  };
  for (const auto& [name, help] : about) {
    app.add_subcommand(name, help)->callback([&opt, name = name] { opt.command = name; });
  }

  std::vector<const char*> argv{"qcrb-lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitSpecError;
  }

  std::string source = opt.model_path;
  try {
    const Context ctx = build_context(opt);
    const Command cmd = commands().at(opt.command).first;
    RunResult result;
    if (opt.out_path.empty()) {
      result = cmd(ctx, out);
    } else {
      std::ostringstream buf;
      result = cmd(ctx, buf);
      std::ofstream file(opt.out_path, std::ios::binary);
      if (!(file << buf.str()) || !file.flush()) {
        err << "error: cannot write '" << opt.out_path << "'\n";
        return kExitRuntimeError;
      }
    }
    if (!result.message.empty()) err << "error: " << result.message << '\n';
    return result.code;
  } catch (const SpecError& e) {
    err << spec_error_message(e, source) << '\n';
    return kExitSpecError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSpecError;
  } catch (const Error& e) {
    err << "error: " << error_kind_name(e.kind()) << ": " << e.what() << '\n';
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace qcrb::cli
