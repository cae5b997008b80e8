#include "qcrb_cli/spec_file.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace qcrb::cli {

SpecError::SpecError(std::string field, int line, int column, const std::string& what)
    : std::runtime_error(what), field_(std::move(field)), line_(line), column_(column) {}

// ---------------------------------------------------------------------------
// angle expressions

namespace {

class AngleParser {
 public:
  explicit AngleParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip_ws();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  // expr := term (('+'|'-') term)*
  double expr() {
    double v = term();
    for (;;) {
      skip_ws();
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  // term := unary (('*'|'/') unary)*
  double term() {
    double v = unary();
    for (;;) {
      skip_ws();
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const double d = unary();
        if (d == 0.0) error("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    skip_ws();
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }

  double primary() {
    skip_ws();
    if (accept('(')) {
      const double v = expr();
      skip_ws();
      if (!accept(')')) error("missing ')'");
      return v;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || end == begin) error("expected a number or 'pi'");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void error(const std::string& what) const {
    throw std::invalid_argument("bad angle '" + std::string(s_) + "': " + what + " at offset " +
                                std::to_string(pos_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

double parse_angle(std::string_view text) {
  const double v = AngleParser(text).parse();
  if (!std::isfinite(v)) throw std::invalid_argument("bad angle '" + std::string(text) + "'");
  return v;
}

std::vector<double> phi_range(double start, double stop, int steps) {
  if (steps < 2) throw std::invalid_argument("phi range needs steps >= 2");
  if (!(stop > start)) throw std::invalid_argument("phi range needs stop > start");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    out[static_cast<std::size_t>(k)] = start + (stop - start) * k / (steps - 1);
  }
  out.back() = stop;
  return out;
}

std::vector<double> parse_phi_range(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) {
    throw std::invalid_argument("--phi-range expects START:STOP:STEPS, got '" +
                                std::string(text) + "'");
  }
  const std::string_view steps_text = text.substr(b + 1);
  int steps = 0;
  const auto [end, ec] =
      std::from_chars(steps_text.data(), steps_text.data() + steps_text.size(), steps);
  if (ec != std::errc() || end != steps_text.data() + steps_text.size()) {
    throw std::invalid_argument("--phi-range: STEPS must be an integer, got '" +
                                std::string(steps_text) + "'");
  }
  return phi_range(parse_angle(text.substr(0, a)), parse_angle(text.substr(a + 1, b - a - 1)),
                   steps);
}

// ---------------------------------------------------------------------------
// model files

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  const auto mark = node.Mark();
  const int line = mark.line >= 0 ? mark.line + 1 : 0;
  const int col = mark.column >= 0 ? mark.column + 1 : 0;
  std::ostringstream msg;
  msg << field;
  if (line > 0) msg << " (line " << line << ", column " << col << ")";
  msg << ": " << what;
  throw SpecError(field, line, col, msg.str());
}

std::string scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(n, field, "expected a scalar");
  return n.Scalar();
}

double real(const YAML::Node& n, const std::string& field) {
  const std::string s = scalar(n, field);
  try {
    return parse_angle(s);
  } catch (const std::invalid_argument& e) {
    fail(n, field, e.what());
  }
}

long long integer(const YAML::Node& n, const std::string& field) {
  const std::string s = scalar(n, field);
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && end == s.data() + s.size()) return v;
  // Allow integral floats such as 1e5.
  double d = 0.0;
  const auto [dend, dec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (dec == std::errc() && dend == s.data() + s.size() && std::floor(d) == d &&
      std::abs(d) < 9e18) {
    return static_cast<long long>(d);
  }
  fail(n, field, "expected an integer, got '" + s + "'");
}

Complex complex_entry(const YAML::Node& n, const std::string& field) {
  if (n.IsScalar()) return {real(n, field), 0.0};
  if (!n.IsSequence() || n.size() != 2) fail(n, field, "expected [re, im]");
  return {real(n[0], field + "[0]"), real(n[1], field + "[1]")};
}

ComplexVector complex_vector(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() == 0) fail(n, field, "expected a nonempty list");
  ComplexVector v(static_cast<Index>(n.size()));
  for (std::size_t i = 0; i < n.size(); ++i) {
    v(static_cast<Index>(i)) = complex_entry(n[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

ComplexMatrix complex_matrix(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() == 0) fail(n, field, "expected a nonempty list of rows");
  const auto rows = static_cast<Index>(n.size());
  ComplexMatrix m;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    const ComplexVector row = complex_vector(n[i], rf);
    if (i == 0) m.resize(rows, row.size());
    if (row.size() != m.cols()) fail(n[i], rf, "row length differs from row 0");
    m.row(static_cast<Index>(i)) = row.transpose();
  }
  if (m.rows() != m.cols()) fail(n, field, "matrix must be square");
  return m;
}

void check_keys(const YAML::Node& n, const std::string& field,
                const std::set<std::string>& allowed) {
  if (!n.IsMap()) fail(n, field, "expected a mapping");
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(kv.first, field.empty() ? key : field + "." + key,
           "unknown key (expected one of: " + list + ")");
    }
  }
}

// Wraps library validation errors with the field that produced them.
template <typename Fn>
auto validated(const YAML::Node& n, const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const qcrb::Error& e) {
    fail(n, field, std::string(error_kind_name(e.kind())) + ": " + e.what());
  }
}

int qubits_for(Index dim) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  return (Index{1} << n) == dim ? n : 0;
}

PauliCoefficients pauli_site(const YAML::Node& n, const std::string& field) {
  if (n.IsSequence()) {
    if (n.size() != 4) fail(n, field, "expected [a0, a1, a2, a3]");
    return {real(n[0], field + "[0]"), real(n[1], field + "[1]"), real(n[2], field + "[2]"),
            real(n[3], field + "[3]")};
  }
  check_keys(n, field, {"a0", "a1", "a2", "a3"});
  PauliCoefficients c;
  if (n["a0"]) c.a0 = real(n["a0"], field + ".a0");
  if (n["a1"]) c.a1 = real(n["a1"], field + ".a1");
  if (n["a2"]) c.a2 = real(n["a2"], field + ".a2");
  if (n["a3"]) c.a3 = real(n["a3"], field + ".a3");
  return c;
}

void parse_state(const YAML::Node& n, ModelSpec& spec,
                 std::optional<PureState>& pure, std::optional<DensityMatrix>& mixed) {
  check_keys(n, "state", {"ghz", "custom"});
  if (n["ghz"] && n["custom"]) fail(n, "state", "give exactly one of ghz, custom");
  if (const auto g = n["ghz"]) {
    check_keys(g, "state.ghz", {"n"});
    if (!g["n"]) fail(g, "state.ghz.n", "missing");
    const long long q = integer(g["n"], "state.ghz.n");
    if (q < 1 || q > 12) fail(g["n"], "state.ghz.n", "must be in [1, 12]");
    spec.ghz = true;
    pure = ghz::ghz_state(static_cast<int>(q), 0.0);
    spec.dim = pure->dim();
    return;
  }
  const auto c = n["custom"];
  if (!c) fail(n, "state", "give one of ghz, custom");
  check_keys(c, "state.custom", {"amplitudes", "density"});
  if (c["amplitudes"] && c["density"]) {
    fail(c, "state.custom", "give exactly one of amplitudes, density");
  }
  if (const auto a = c["amplitudes"]) {
    ComplexVector v = complex_vector(a, "state.custom.amplitudes");
    pure = validated(a, "state.custom.amplitudes", [&] { return PureState(v); });
    spec.dim = pure->dim();
  } else if (const auto d = c["density"]) {
    ComplexMatrix m = complex_matrix(d, "state.custom.density");
    mixed = validated(d, "state.custom.density", [&] { return DensityMatrix(m); });
    spec.dim = mixed->dim();
  } else {
    fail(c, "state.custom", "give one of amplitudes, density");
  }
}

HermitianObservable parse_generator(const YAML::Node& n, const ModelSpec& spec) {
  const std::string field = "parametrization.generator";
  if (n.IsScalar()) {
    const std::string name = n.Scalar();
    if (name == "blackbox") fail(n, field, "black-box models are not supported in files");
    if (name == "zero") return HermitianObservable(ComplexMatrix::Zero(spec.dim, spec.dim));
    Axis axis;
    if (name == "half_sigma_z_sum") axis = Axis::z;
    else if (name == "half_sigma_x_sum") axis = Axis::x;
    else if (name == "half_sigma_y_sum") axis = Axis::y;
    else
      fail(n, field,
           "unknown generator '" + name +
               "' (expected half_sigma_z_sum, half_sigma_x_sum, half_sigma_y_sum, zero or a matrix)");
    if (spec.n_qubits == 0) fail(n, field, "named generators need a qubit register (dim 2^N)");
    return collective_spin(axis, spec.n_qubits);
  }
  ComplexMatrix m = complex_matrix(n, field);
  if (m.rows() != spec.dim) fail(n, field, "dimension differs from the state");
  return validated(n, field, [&] { return HermitianObservable(m); });
}

void parse_observable(const YAML::Node& n, ModelSpec& spec) {
  const std::string field = "observable";
  if (n.IsScalar()) {
    if (n.Scalar() != "parity") {
      fail(n, field, "expected 'parity', {pauli_product: ...} or {matrix: ...}");
    }
    if (spec.n_qubits == 0) fail(n, field, "parity needs a qubit register");
    spec.observable = ghz::parity_observable(spec.n_qubits);
    spec.observable_kind = "parity";
    return;
  }
  check_keys(n, field, {"pauli_product", "matrix"});
  if (n["pauli_product"] && n["matrix"]) fail(n, field, "give exactly one of pauli_product, matrix");
  if (const auto p = n["pauli_product"]) {
    const std::string pf = field + ".pauli_product";
    if (spec.n_qubits == 0) fail(p, pf, "pauli_product needs a qubit register");
    std::vector<PauliCoefficients> sites;
    if (p.IsMap()) {
      sites.assign(static_cast<std::size_t>(spec.n_qubits), pauli_site(p, pf));
    } else if (p.IsSequence()) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        sites.push_back(pauli_site(p[i], pf + "[" + std::to_string(i) + "]"));
      }
      if (static_cast<int>(sites.size()) != spec.n_qubits) {
        fail(p, pf, "has " + std::to_string(sites.size()) + " sites, the register has " +
                        std::to_string(spec.n_qubits));
      }
    } else {
      fail(p, pf, "expected a per-site list or a single {a0, a1, a2, a3} map");
    }
    spec.observable = HermitianObservable::product(sites);
    spec.observable_kind = "pauli_product";
    return;
  }
  const auto m = n["matrix"];
  if (!m) fail(n, field, "give one of pauli_product, matrix");
  ComplexMatrix mat = complex_matrix(m, field + ".matrix");
  if (mat.rows() != spec.dim) fail(m, field + ".matrix", "dimension differs from the state");
  spec.observable = validated(m, field + ".matrix", [&] { return HermitianObservable(mat); });
  spec.observable_kind = "matrix";
}

void parse_povm(const YAML::Node& n, ModelSpec& spec) {
  const std::string field = "povm";
  if (n.IsScalar()) {
    const std::string name = n.Scalar();
    if (name == "x_basis_product" || name == "y_basis_product") {
      if (spec.n_qubits == 0) fail(n, field, name + " needs a qubit register");
      const auto b = name[0] == 'x' ? ghz::LocalBasis::x_basis : ghz::LocalBasis::y_basis;
      spec.povm = ghz::local_product_povm(spec.n_qubits, b);
      spec.povm_kind = name[0] == 'x' ? PovmKind::x_basis_product : PovmKind::y_basis_product;
    } else if (name == "computational") {
      spec.povm = Povm::computational_basis(spec.dim);
      spec.povm_kind = PovmKind::computational;
    } else if (name == "eigenprojectors_of_observable") {
      if (!spec.observable) fail(n, field, "eigenprojectors_of_observable needs an observable");
      spec.povm = Povm::eigenprojectors(*spec.observable);
      spec.povm_kind = PovmKind::eigenprojectors_of_observable;
    } else {
      fail(n, field,
           "unknown POVM '" + name +
               "' (expected x_basis_product, y_basis_product, computational, "
               "eigenprojectors_of_observable or {custom: ...})");
    }
    return;
  }
  check_keys(n, field, {"custom"});
  const auto c = n["custom"];
  if (!c || !c.IsSequence() || c.size() == 0) fail(n, field + ".custom", "expected a list of elements");
  std::vector<PovmElement> elements;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::string ef = field + ".custom[" + std::to_string(i) + "]";
    check_keys(c[i], ef, {"label", "value", "matrix"});
    if (!c[i]["matrix"]) fail(c[i], ef + ".matrix", "missing");
    PovmElement e;
    e.label = c[i]["label"] ? scalar(c[i]["label"], ef + ".label") : std::to_string(i);
    e.value = c[i]["value"] ? real(c[i]["value"], ef + ".value") : static_cast<double>(i);
    e.op = complex_matrix(c[i]["matrix"], ef + ".matrix");
    if (e.op.rows() != spec.dim) fail(c[i]["matrix"], ef + ".matrix", "dimension differs from the state");
    elements.push_back(std::move(e));
  }
  spec.povm = validated(c, field + ".custom", [&] { return Povm(std::move(elements)); });
  spec.povm_kind = PovmKind::custom;
}

void parse_phi(const YAML::Node& n, ModelSpec& spec) {
  if (n.IsScalar()) {
    spec.phis = {real(n, "phi")};
    return;
  }
  if (n.IsSequence()) {
    for (std::size_t i = 0; i < n.size(); ++i) {
      spec.phis.push_back(real(n[i], "phi[" + std::to_string(i) + "]"));
    }
    if (spec.phis.empty()) fail(n, "phi", "empty list");
    return;
  }
  check_keys(n, "phi", {"start", "stop", "steps"});
  for (const char* k : {"start", "stop", "steps"}) {
    if (!n[k]) fail(n, std::string("phi.") + k, "missing");
  }
  const long long steps = integer(n["steps"], "phi.steps");
  try {
    spec.phis = phi_range(real(n["start"], "phi.start"), real(n["stop"], "phi.stop"),
                          static_cast<int>(steps));
  } catch (const std::invalid_argument& e) {
    fail(n, "phi", e.what());
  }
  spec.phi_is_range = true;
}

void parse_tolerances(const YAML::Node& n, Tolerances& tol) {
  check_keys(n, "tolerances",
             {"input", "algorithmic", "support_cutoff", "optimality", "alpha", "slope",
              "cfi_probability", "cfi_derivative", "cfi_curvature", "singular_window"});
  auto set = [&](const char* key, double& slot) {
    if (const auto v = n[key]) {
      slot = real(v, std::string("tolerances.") + key);
      if (!(slot > 0.0)) fail(v, std::string("tolerances.") + key, "must be positive");
    }
  };
  set("input", tol.input);
  set("algorithmic", tol.algorithmic);
  set("support_cutoff", tol.support_cutoff);
  set("optimality", tol.optimality);
  set("alpha", tol.alpha);
  set("slope", tol.slope);
  set("cfi_probability", tol.cfi_probability);
  set("cfi_derivative", tol.cfi_derivative);
  set("cfi_curvature", tol.cfi_curvature);
  set("singular_window", tol.singular_window);
}

}  // namespace

ModelSpec parse_model_spec(const std::string& text, const std::string& source) {
  YAML::Node loaded;
  try {
    loaded = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SpecError("", e.mark.line + 1, e.mark.column + 1,
                    "YAML syntax error (line " + std::to_string(e.mark.line + 1) + ", column " +
                        std::to_string(e.mark.column + 1) + "): " + e.msg);
  }
  // Const access only: operator[] on a non-const node can insert keys.
  const YAML::Node& root = loaded;
  if (!root.IsMap()) throw SpecError("", 0, 0, "model file must be a mapping");
  check_keys(root, "",
             {"state", "parametrization", "observable", "povm", "phi", "nu", "seed", "trials",
              "tolerances", "basis", "branch_center", "run_mle", "mle_interval"});

  ModelSpec spec;
  spec.source = source;
  if (!root["state"]) throw SpecError("state", 0, 0, "state: missing (give ghz or custom)");

  std::optional<PureState> pure;
  std::optional<DensityMatrix> mixed;
  parse_state(root["state"], spec, pure, mixed);
  spec.n_qubits = qubits_for(spec.dim);

  std::optional<HermitianObservable> generator;
  if (const auto p = root["parametrization"]) {
    check_keys(p, "parametrization", {"generator"});
    if (!p["generator"]) fail(p, "parametrization.generator", "missing");
    generator = parse_generator(p["generator"], spec);
  } else if (spec.n_qubits > 0) {
    generator = collective_spin(Axis::z, spec.n_qubits);
  } else {
    throw SpecError("parametrization", 0, 0,
                    "parametrization: missing (no default generator for dim " +
                        std::to_string(spec.dim) + ")");
  }
  spec.model = pure ? ParametricModel::unitary(*pure, *generator)
                    : ParametricModel::unitary(*mixed, *generator);

  if (const auto o = root["observable"]) parse_observable(o, spec);
  if (const auto p = root["povm"]) parse_povm(p, spec);
  if (const auto p = root["phi"]) parse_phi(p, spec);
  if (const auto v = root["nu"]) {
    spec.nu = integer(v, "nu");
    if (spec.nu < 1) fail(v, "nu", "must be a positive integer");
  }
  if (const auto v = root["seed"]) {
    const long long s = integer(v, "seed");
    if (s < 0) fail(v, "seed", "must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(s);
  }
  if (const auto v = root["trials"]) {
    const long long t = integer(v, "trials");
    if (t < 1 || t > 10000000) fail(v, "trials", "must be in [1, 1e7]");
    spec.trials = static_cast<int>(t);
  }
  if (const auto t = root["tolerances"]) parse_tolerances(t, spec.tol);
  if (const auto b = root["basis"]) {
    const std::string s = scalar(b, "basis");
    if (s == "x_basis") spec.basis = ghz::LocalBasis::x_basis;
    else if (s == "y_basis") spec.basis = ghz::LocalBasis::y_basis;
    else fail(b, "basis", "expected x_basis or y_basis");
  }
  if (const auto b = root["branch_center"]) spec.branch_center = real(b, "branch_center");
  if (const auto r = root["run_mle"]) {
    const std::string s = scalar(r, "run_mle");
    if (s == "true") spec.run_mle = true;
    else if (s == "false") spec.run_mle = false;
    else fail(r, "run_mle", "expected true or false");
  }
  if (const auto m = root["mle_interval"]) {
    if (!m.IsSequence() || m.size() != 2) fail(m, "mle_interval", "expected [lo, hi]");
    Interval iv{real(m[0], "mle_interval[0]"), real(m[1], "mle_interval[1]")};
    if (!(iv.hi > iv.lo)) fail(m, "mle_interval", "needs lo < hi");
    spec.mle_interval = iv;
  }
  return spec;
}

ModelSpec load_model_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("", 0, 0, "cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_spec(buf.str(), path);
}

}  // namespace qcrb::cli
