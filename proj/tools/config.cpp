#include "app.hpp"

#include "qbeckner/random.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qb::app {

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(Errc::ConfigError, (field.empty() ? std::string("config") : field) + ": " + what);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void expect_object(const json& j, const std::string& field, const std::set<std::string>& allowed) {
  if (!j.is_object()) config_error(field, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) config_error(join(field, it.key()), "unknown key");
}

double get_double(const json& j, const std::string& field) {
  if (!j.is_number()) config_error(field, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) config_error(field, "must be finite");
  return v;
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) config_error(field, "expected an integer");
  return j.get<int>();
}

std::uint64_t get_seed(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    config_error(field, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::vector<double> get_doubles(const json& j, const std::string& field) {
  if (!j.is_array()) config_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

// Read key into out if present.
template <class T, class F>
void opt(const json& j, const std::string& parent, const char* key, T& out, F get) {
  if (j.contains(key)) out = get(j.at(key), join(parent, key));
}

void positive(double v, const std::string& field) {
  if (!(v > 0)) config_error(field, "must be positive");
}

void positive_int(int v, const std::string& field) {
  if (v < 1) config_error(field, "must be at least 1");
}

SigmaSpec parse_sigma(const json& j, const std::string& f) {
  expect_object(j, f, {"eigenvalues", "basis"});
  SigmaSpec s;
  opt(j, f, "eigenvalues", s.eigenvalues, get_doubles);
  if (j.contains("basis")) s.basis = matrix_from_json(j.at("basis"), join(f, "basis"));
  return s;
}

GeneratorSpec parse_generator(const json& j, const std::string& f) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) config_error(join(f, "kind"), "missing or not a string");
  GeneratorSpec g;
  g.kind = j.at("kind").get<std::string>();
  if (g.kind == "depolarizing") {
    expect_object(j, f, {"kind", "gamma"});
    opt(j, f, "gamma", g.gamma, get_double);
    positive(g.gamma, join(f, "gamma"));
  } else if (g.kind == "jumps") {
    expect_object(j, f, {"kind", "list"});
    if (!j.contains("list") || !j.at("list").is_array()) config_error(join(f, "list"), "expected an array");
    const json& list = j.at("list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::string lf = join(f, "list[" + std::to_string(i) + "]");
      expect_object(list[i], lf, {"V", "omega"});
      if (!list[i].contains("V")) config_error(join(lf, "V"), "missing");
      JumpTerm t;
      t.V = matrix_from_json(list[i].at("V"), join(lf, "V"));
      opt(list[i], lf, "omega", t.omega, get_double);
      g.jumps.push_back(std::move(t));
    }
  } else if (g.kind == "random_dbc") {
    expect_object(j, f, {"kind", "pairs", "diag", "seed"});
    opt(j, f, "pairs", g.pairs, get_int);
    opt(j, f, "diag", g.diag, get_int);
    opt(j, f, "seed", g.seed, get_seed);
    if (j.contains("pairs") && g.pairs < 0) config_error(join(f, "pairs"), "must be nonnegative");
    if (g.diag < 0) config_error(join(f, "diag"), "must be nonnegative");
  } else if (g.kind == "superoperator") {
    expect_object(j, f, {"kind", "matrix"});
    if (!j.contains("matrix")) config_error(join(f, "matrix"), "missing");
    g.matrix = matrix_from_json(j.at("matrix"), join(f, "matrix"));
  } else {
    config_error(join(f, "kind"), "unknown generator kind '" + g.kind + "'");
  }
  return g;
}

void check_grid(const std::vector<double>& g, double lo, bool lo_open, double hi, const std::string& f) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = g[i];
    if ((lo_open ? v <= lo : v < lo) || v > hi) {
      std::ostringstream os;
      os << "value " << v << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
      config_error(f + "[" + std::to_string(i) + "]", os.str());
    }
  }
}

}  // namespace

json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < M.cols(); ++k) row.push_back({M(i, k).real(), M(i, k).imag()});
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) config_error(field, "expected a nonempty array of rows");
  const std::size_t n = j.size();
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array()) config_error(field, "row " + std::to_string(i) + " is not an array");
    if (i == 0) m = j[i].size();
    if (j[i].size() != m || m == 0) config_error(field, "ragged rows");
  }
  Mat M(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const json& e = j[i][k];
      std::string ef = field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      if (!e.is_array() || e.size() != 2) config_error(ef, "expected a [re, im] pair");
      M(i, k) = cplx(get_double(e[0], ef), get_double(e[1], ef));
    }
  return M;
}

bool SigmaSpec::operator==(const SigmaSpec& o) const {
  if (eigenvalues != o.eigenvalues || basis.has_value() != o.basis.has_value()) return false;
  return !basis || (basis->rows() == o.basis->rows() && basis->cols() == o.basis->cols() && *basis == *o.basis);
}

bool GeneratorSpec::operator==(const GeneratorSpec& o) const {
  if (kind != o.kind || gamma != o.gamma || pairs != o.pairs || diag != o.diag || seed != o.seed) return false;
  if (jumps.size() != o.jumps.size()) return false;
  for (std::size_t i = 0; i < jumps.size(); ++i)
    if (jumps[i].omega != o.jumps[i].omega || jumps[i].V.rows() != o.jumps[i].V.rows() ||
        jumps[i].V.cols() != o.jumps[i].V.cols() || jumps[i].V != o.jumps[i].V)
      return false;
  return matrix.rows() == o.matrix.rows() && matrix.cols() == o.matrix.cols() && matrix == o.matrix;
}

ExperimentConfig parse_config(const json& j) {
  expect_object(j, "", {"dimension", "sigma", "generator", "p_grid", "q_grid", "tolerances", "seeds", "estimate",
                        "decay", "mixing", "transport", "ricci", "tasks"});
  ExperimentConfig c;
  opt(j, "", "dimension", c.dimension, get_int);
  positive_int(c.dimension, "dimension");
  if (j.contains("sigma")) c.sigma = parse_sigma(j.at("sigma"), "sigma");
  if (j.contains("generator")) c.generator = parse_generator(j.at("generator"), "generator");
  opt(j, "", "p_grid", c.p_grid, get_doubles);
  opt(j, "", "q_grid", c.q_grid, get_doubles);
  check_grid(c.p_grid, 1.0, true, 2.0, "p_grid");
  check_grid(c.q_grid, 1.0, false, 2.0, "q_grid");
  for (std::size_t i = 0; i < c.q_grid.size(); ++i)
    if (c.q_grid[i] >= 2.0) config_error("q_grid[" + std::to_string(i) + "]", "dual Beckner needs q < 2");

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    expect_object(t, "tolerances", {"decay", "properties"});
    opt(t, "tolerances", "decay", c.tolerances.decay, get_double);
    opt(t, "tolerances", "properties", c.tolerances.properties, get_double);
    positive(c.tolerances.decay, "tolerances.decay");
    positive(c.tolerances.properties, "tolerances.properties");
  }
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    expect_object(s, "seeds", {"states", "estimate", "ricci"});
    opt(s, "seeds", "states", c.seeds.states, get_seed);
    opt(s, "seeds", "estimate", c.seeds.estimate, get_seed);
    opt(s, "seeds", "ricci", c.seeds.ricci, get_seed);
  }
  if (j.contains("estimate")) {
    const json& e = j.at("estimate");
    expect_object(e, "estimate", {"num_starts", "max_iters", "tol"});
    opt(e, "estimate", "num_starts", c.estimate.num_starts, get_int);
    opt(e, "estimate", "max_iters", c.estimate.max_iters, get_int);
    opt(e, "estimate", "tol", c.estimate.tol, get_double);
    positive_int(c.estimate.num_starts, "estimate.num_starts");
    positive_int(c.estimate.max_iters, "estimate.max_iters");
    positive(c.estimate.tol, "estimate.tol");
  }
  if (j.contains("decay")) {
    const json& d = j.at("decay");
    expect_object(d, "decay", {"states", "times"});
    opt(d, "decay", "states", c.decay.states, get_int);
    opt(d, "decay", "times", c.decay.times, get_doubles);
    positive_int(c.decay.states, "decay.states");
    check_grid(c.decay.times, 0.0, false, 1e6, "decay.times");
  }
  if (j.contains("mixing")) {
    const json& m = j.at("mixing");
    expect_object(m, "mixing", {"eps"});
    opt(m, "mixing", "eps", c.mixing.eps, get_doubles);
    check_grid(c.mixing.eps, 0.0, true, 2.0, "mixing.eps");
  }
  if (j.contains("transport")) {
    const json& t = j.at("transport");
    expect_object(t, "transport", {"p", "pairs", "steps", "tol", "max_iters"});
    opt(t, "transport", "p", c.transport.p, get_doubles);
    opt(t, "transport", "pairs", c.transport.pairs, get_int);
    opt(t, "transport", "steps", c.transport.steps, get_int);
    opt(t, "transport", "tol", c.transport.tol, get_double);
    opt(t, "transport", "max_iters", c.transport.max_iters, get_int);
    check_grid(c.transport.p, 1.0, true, 2.0, "transport.p");
    positive_int(c.transport.pairs, "transport.pairs");
    if (c.transport.steps < 2) config_error("transport.steps", "must be at least 2");
    positive(c.transport.tol, "transport.tol");
    positive_int(c.transport.max_iters, "transport.max_iters");
  }
  if (j.contains("ricci")) {
    const json& r = j.at("ricci");
    expect_object(r, "ricci", {"p", "samples", "check_states"});
    opt(r, "ricci", "p", c.ricci.p, get_doubles);
    opt(r, "ricci", "samples", c.ricci.samples, get_int);
    opt(r, "ricci", "check_states", c.ricci.check_states, get_int);
    check_grid(c.ricci.p, 1.0, true, 2.0, "ricci.p");
    positive_int(c.ricci.samples, "ricci.samples");
    positive_int(c.ricci.check_states, "ricci.check_states");
  }
  if (j.contains("tasks")) {
    const json& t = j.at("tasks");
    if (!t.is_array()) config_error("tasks", "expected an array of task names");
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::string f = "tasks[" + std::to_string(i) + "]";
      if (!t[i].is_string()) config_error(f, "expected a string");
      std::string name = t[i].get<std::string>();
      if (std::find(kTaskOrder.begin(), kTaskOrder.end(), name) == kTaskOrder.end())
        config_error(f, "unknown task '" + name + "'");
      c.tasks.push_back(name);
    }
  }

  // Cross-field consistency; defaults that depend on the dimension are filled in.
  const int d = c.dimension;
  if (c.sigma.eigenvalues.empty()) c.sigma.eigenvalues.assign(d, 1.0 / d);
  if (c.generator.kind == "random_dbc" && c.generator.pairs < 0) c.generator.pairs = d;
  if (!c.sigma.eigenvalues.empty()) {
    if (static_cast<int>(c.sigma.eigenvalues.size()) != d)
      config_error("sigma.eigenvalues", "length differs from dimension " + std::to_string(d));
    double sum = 0.0;
    for (std::size_t i = 0; i < c.sigma.eigenvalues.size(); ++i) {
      if (!(c.sigma.eigenvalues[i] > 0))
        config_error("sigma.eigenvalues[" + std::to_string(i) + "]", "must be positive (full rank)");
      sum += c.sigma.eigenvalues[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) config_error("sigma.eigenvalues", "must sum to 1");
  }
  if (c.sigma.basis) {
    const Mat& U = *c.sigma.basis;
    if (U.rows() != d || U.cols() != d) config_error("sigma.basis", "must be dimension x dimension");
    if ((U.adjoint() * U - Mat::Identity(d, d)).norm() > 1e-9) config_error("sigma.basis", "must be unitary");
  }
  for (std::size_t i = 0; i < c.generator.jumps.size(); ++i)
    if (c.generator.jumps[i].V.rows() != d || c.generator.jumps[i].V.cols() != d)
      config_error("generator.list[" + std::to_string(i) + "].V", "must be dimension x dimension");
  if (c.generator.kind == "superoperator" && (c.generator.matrix.rows() != d * d || c.generator.matrix.cols() != d * d))
    config_error("generator.matrix", "must be dimension^2 x dimension^2");
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Report the line of the failing byte.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    fail(Errc::ConfigError, "line " + std::to_string(line) + ": " + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["dimension"] = c.dimension;
  json s = json::object();
  s["eigenvalues"] = c.sigma.eigenvalues;
  if (c.sigma.basis) s["basis"] = matrix_to_json(*c.sigma.basis);
  j["sigma"] = s;
  json g;
  g["kind"] = c.generator.kind;
  if (c.generator.kind == "depolarizing") {
    g["gamma"] = c.generator.gamma;
  } else if (c.generator.kind == "jumps") {
    json list = json::array();
    for (const auto& t : c.generator.jumps) list.push_back({{"V", matrix_to_json(t.V)}, {"omega", t.omega}});
    g["list"] = list;
  } else if (c.generator.kind == "random_dbc") {
    g["pairs"] = c.generator.pairs;
    g["diag"] = c.generator.diag;
    g["seed"] = c.generator.seed;
  } else {
    g["matrix"] = matrix_to_json(c.generator.matrix);
  }
  j["generator"] = g;
  j["p_grid"] = c.p_grid;
  j["q_grid"] = c.q_grid;
  j["tolerances"] = {{"decay", c.tolerances.decay}, {"properties", c.tolerances.properties}};
  j["seeds"] = {{"states", c.seeds.states}, {"estimate", c.seeds.estimate}, {"ricci", c.seeds.ricci}};
  j["estimate"] = {{"num_starts", c.estimate.num_starts}, {"max_iters", c.estimate.max_iters}, {"tol", c.estimate.tol}};
  j["decay"] = {{"states", c.decay.states}, {"times", c.decay.times}};
  j["mixing"] = {{"eps", c.mixing.eps}};
  j["transport"] = {{"p", c.transport.p},       {"pairs", c.transport.pairs}, {"steps", c.transport.steps},
                    {"tol", c.transport.tol},   {"max_iters", c.transport.max_iters}};
  j["ricci"] = {{"p", c.ricci.p}, {"samples", c.ricci.samples}, {"check_states", c.ricci.check_states}};
  j["tasks"] = c.tasks;
  return j;
}

ExperimentConfig fixture(const std::string& name, double theta) {
  ExperimentConfig c;
  c.sigma.eigenvalues = {0.5, 0.5};
  if (name == "depol2") {
    c.dimension = 2;
    c.sigma.eigenvalues = {0.75, 0.25};
  } else if (name == "depol3") {
    c.dimension = 3;
    c.sigma.eigenvalues = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  } else if (name == "random_dbc_seeded") {
    c.dimension = 3;
    c.sigma.eigenvalues = {0.5, 0.3, 0.2};
    Rng rng(11);
    c.sigma.basis = random_unitary(3, rng);
    c.generator.kind = "random_dbc";
    c.generator.pairs = 3;
    c.generator.diag = 1;
    c.generator.seed = 11;
  } else if (name == "classical_embed") {
    if (!(theta > 0 && theta < 1)) fail(Errc::DomainViolation, "classical_embed needs 0 < theta < 1");
    // The two-point chain with stationary law (theta, 1 - theta), carried by
    // the depolarizing jumps on the diagonal reference state.
    c.dimension = 2;
    c.sigma.eigenvalues = {theta, 1 - theta};
    DbcLindbladian L = depolarizing(diag_state(c.sigma.eigenvalues), 1.0);
    c.generator.kind = "jumps";
    c.generator.jumps = L.jumps();
  } else {
    fail(Errc::UnknownFixture, "unknown fixture '" + name + "'");
  }
  return c;
}

Mat build_sigma(const ExperimentConfig& c) {
  const int d = c.dimension;
  std::vector<double> ev = c.sigma.eigenvalues;
  if (ev.empty()) ev.assign(d, 1.0 / d);
  Mat D = diag_state(ev);
  if (!c.sigma.basis) return D;
  return herm(*c.sigma.basis * D * c.sigma.basis->adjoint());
}

DbcLindbladian build_model(const ExperimentConfig& c) {
  Mat sigma = build_sigma(c);
  const GeneratorSpec& g = c.generator;
  if (g.kind == "depolarizing") return depolarizing(sigma, g.gamma);
  if (g.kind == "jumps") return build_from_jumps(sigma, g.jumps);
  if (g.kind == "random_dbc") return random_dbc(sigma, g.pairs < 0 ? c.dimension : g.pairs, g.diag, g.seed);
  Superoperator gen{c.dimension, g.matrix};
  std::vector<JumpTerm> jumps = alicki_decompose(gen, sigma);
  return DbcLindbladian(sigma, std::move(jumps), gen);
}

}  // namespace qb::app
