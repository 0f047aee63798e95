// Acceptance suite: one PASS/FAIL line per criterion.
#include "app.hpp"

#include "qbeckner/constants.hpp"
#include "qbeckner/dirichlet.hpp"
#include "qbeckner/entropy.hpp"
#include "qbeckner/random.hpp"
#include "qbeckner/ricci.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace qb;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
};

// Tracks the worst margin of a family of checks "value <= limit".
struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  int count = 0, failed = 0;
  std::string where;
  void add(double value, double limit, const std::string& at = "") {
    ++count;
    double m = limit - value;
    if (m < 0) ++failed;
    if (m < margin) {
      margin = m;
      where = at;
    }
  }
  bool ok() const { return failed == 0; }
  std::string str() const {
    std::ostringstream os;
    os << count << " checks, " << failed << " failed, worst margin " << margin;
    if (!where.empty()) os << " at " << where;
    return os.str();
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Mat traceless(const Mat& X) {
  const int d = static_cast<int>(X.rows());
  return X - X.trace() / double(d) * identity(d);
}

Mat interior(const DbcLindbladian& L, Rng& rng) { return herm(0.5 * random_density(L.dim(), rng) + 0.5 * L.sigma()); }

DbcLindbladian random_model(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_dbc(random_density(d, rng), d, 1, seed);
}

EstimateOptions estimate_opts() {
  EstimateOptions o;
  o.num_starts = 16;
  o.seed = 7;
  return o;
}

DbcLindbladian depol_uniform(int d, double gamma = 1.0) { return depolarizing(identity(d) / double(d), gamma); }

// 1. Jump reconstruction round trip.
Outcome c1() {
  Worst w;
  for (int d : {2, 3, 4}) {
    std::vector<DbcLindbladian> models{depolarizing(identity(d) / double(d), 1.0)};
    Rng rng(100 + d);
    models.push_back(depolarizing(random_density(d, rng), 0.7));
    for (int s = 0; s < 10; ++s) models.push_back(random_model(d, 1000 * d + s));
    for (const auto& L : models) {
      DbcLindbladian R = build_from_jumps(L.sigma(), alicki_decompose(L.generator(), L.sigma()));
      w.add(rel_diff(R.generator().matrix, L.generator().matrix), 1e-8, "d=" + std::to_string(d));
    }
  }
  return {w.ok(), w.str()};
}

// 2. Spectral anchors of depolarizing noise.
Outcome c2() {
  Worst gap, beck;
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (const Mat& s : {Mat(diag_state({0.75, 0.25})), Mat(identity(3) / 3.0)}) {
      DbcLindbladian L = depolarizing(s, gamma);
      double lam = estimate_constant(L, ConstantKind::Poincare, 0.0, estimate_opts()).value;
      double a2 = estimate_constant(L, ConstantKind::Beckner, 2.0, estimate_opts()).value;
      gap.add(std::abs(lam - gamma), 1e-10, fmt("gamma=%g", gamma));
      beck.add(std::abs(a2 - gamma), 1e-6, fmt("gamma=%g", gamma));
    }
  }
  return {gap.ok() && beck.ok(), "gap: " + gap.str() + "; alpha_2: " + beck.str()};
}

// 3. Optimizer against the two-point reduction.
Outcome c3() {
  DbcLindbladian L = depol_uniform(2);
  Worst w;
  for (double p : {1.1, 1.25, 1.5, 1.75}) {
    double q = estimate_constant(L, ConstantKind::Beckner, p, estimate_opts()).value;
    double c = depol_classical(p, 2);
    w.add(std::abs(q - c) / c, 1e-3, fmt("p=%g", p));
  }
  bool exact = depol_classical(2.0, 2) == 1.0;
  return {w.ok() && exact, w.str() + (exact ? "; p=2 gives exactly 1" : "; p=2 is not exactly 1")};
}

// 4. Two-sided bound with exact or classical constants.
Outcome c4() {
  struct Fx {
    std::string name;
    double smin;
    std::function<double(double)> alpha;
  };
  std::vector<Fx> fx{
      {"depol2", 0.25, [](double p) { return depol_classical_theta(p, 0.25); }},
      {"depol3", 1.0 / 3, [](double p) { return depol_classical(p, 3); }},
      {"classical_embed", 0.5, [](double p) { return depol_classical_theta(p, 0.5); }},
  };
  Worst w;
  const double lambda = 1.0;
  for (const auto& f : fx) {
    for (double p : {1.05, 1.1, 1.25, 1.5, 1.75, 2.0}) {
      double a = f.alpha(p);
      std::string at = f.name + fmt(" p=%g", p);
      w.add(p * p * std::pow(f.smin, 2 - p) * lambda / 4, a + 1e-6, at);
      w.add(a, p * lambda / 2 + 1e-6, at);
      w.add(lambda * (p - 1), a + 1e-6, at);
    }
  }
  return {w.ok(), w.str() + " (margins include the 1e-6 allowance)"};
}

// 5. Stroock-Varopoulos and L_p regularity.
Outcome c5() {
  Rng rng(5);
  Worst w;
  for (int i = 0; i < 200; ++i) {
    int d = 2 + i % 2;
    DbcLindbladian L = random_model(d, 5000 + i);
    Mat X = random_psd(d, rng) + 0.05 * identity(d);
    const Eigh& s = L.sigma_eigh();
    double p = 1.0 + rng.uniform(), q = p + (2.0 - p) * rng.uniform();
    double ep = dirichlet_form(L, herm(power_operator(X, s, p, 2.0)), p).value;
    double eq = dirichlet_form(L, herm(power_operator(X, s, q, 2.0)), q).value;
    w.add(eq, ep + 1e-9, fmt("sv sample %g", i));
    double r = std::array<double, 3>{1.25, 1.5, 2.0}[i % 3];
    double e2 = dirichlet_form(L, herm(power_operator(X, s, 2.0, r)), 2.0).value;
    double er = dirichlet_form(L, X, r).value;
    w.add(e2, er + 1e-9, fmt("regularity lower sample %g", i));
    w.add(er, r * r / (4 * (r - 1)) * e2 + 1e-9, fmt("regularity upper sample %g", i));
  }
  return {w.ok(), w.str()};
}

// 6. Chi-square sandwich.
Outcome c6() {
  Rng rng(6);
  Worst w;
  for (int i = 0; i < 100; ++i) {
    int d = 2 + i % 2;
    Mat s = random_density(d, rng), rho = random_density(d, rng);
    double p = 1.05 + 0.95 * rng.uniform();
    double c = std::exp(relative_entropy(rho, s, RelKind::Max).value);
    double chi = chi2_divergence(rho, s, fn_kappa(1.0 / p)).value;
    double F = p_divergence(rho, s, p).value;
    w.add(sandwich_k(p, c) * chi, F + 1e-9, fmt("sample %g", i));
    w.add(F, chi / p + 1e-9, fmt("sample %g", i));
  }
  return {w.ok(), w.str()};
}

// 7. Gradient-flow identity.
Outcome c7() {
  Rng rng(7);
  Worst w;
  for (int i = 0; i < 50; ++i) {
    int d = 2 + i % 2;
    DbcLindbladian L = random_model(d, 7000 + i);
    double p = 1.05 + 0.95 * rng.uniform();
    w.add(grad_flow_residual(L, random_density(d, rng), p), 1e-8, fmt("sample %g", i));
  }
  return {w.ok(), w.str()};
}

// 8. Flat metric anchor.
Outcome c8() {
  Worst w;
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    int d = 2 + i % 2;
    DbcLindbladian L = i % 4 == 0 ? depol_uniform(d) : random_model(d, 8000 + i);
    Mat a = random_density(d, rng), b = random_density(d, rng);
    double flat = flat_w22(L, a, b);
    double sol = w2p_solve(L, a, b, 2.0).distance;
    w.add(std::abs(sol - flat), 0.01 * flat, fmt("pair %g", i));
  }
  double anti = w2p_solve(depol_uniform(2), diag_state({1.0, 0.0}), diag_state({0.0, 1.0}), 2.0).distance;
  bool ok = std::abs(anti - 2.0) <= 0.02;
  return {w.ok() && ok, w.str() + fmt("; antipodal W = %.6f", anti)};
}

// 9. Constant speed and the trace-distance lower bound.
Outcome c9() {
  Worst speed, lower;
  Rng rng(9);
  std::vector<std::pair<std::string, DbcLindbladian>> models{{"depol(I/2)", depol_uniform(2)},
                                                             {"random d=3", random_model(3, 9)}};
  for (const auto& [name, L] : models) {
    const int d = L.dim();
    std::vector<std::pair<Mat, Mat>> pairs;
    for (int i = 0; i < 3; ++i) {
      Mat a = random_density(d, rng);
      pairs.emplace_back(a, random_density(d, rng));
    }
    if (d == 2) pairs.emplace_back(diag_state({1.0, 0.0}), diag_state({0.0, 1.0}));
    for (double p : {1.25, 1.5, 1.75, 2.0}) {
      double C = transport_lower_bound_constant(L, p);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        W2pResult r = w2p_solve(L, pairs[i].first, pairs[i].second, p);
        const auto& s2 = r.path.speed2;
        double hi = *std::max_element(s2.begin(), s2.end()), lo = *std::min_element(s2.begin(), s2.end());
        std::string at = name + fmt(" p=%g pair=%g", p, double(i));
        speed.add(hi / lo - 1.0, 0.02, at);
        lower.add(trace_norm(pairs[i].first - pairs[i].second), C * r.distance, at);
      }
    }
  }
  return {speed.ok() && lower.ok(), "speed: " + speed.str() + "; lower bound: " + lower.str()};
}

// 10. Curvature of depolarizing noise and the Hessian.
Outcome c10() {
  Worst kap, hess;
  std::vector<std::pair<std::string, DbcLindbladian>> models{
      {"depol(I/2)", depol_uniform(2)}, {"depol2", depolarizing(diag_state({0.75, 0.25}), 1.0)}, {"depol3", depol_uniform(3)}};
  for (const auto& [name, L] : models)
    for (double p : {1.25, 1.5, 2.0}) {
      double k = ricci_estimate(L, p, {64, 10}).kappa;
      kap.add(p / 2 - 1e-6, k, name + fmt(" p=%g", p));
    }
  Rng rng(10);
  for (int i = 0; i < 6; ++i) {
    DbcLindbladian L = i % 2 ? random_model(3, 10 + i) : depolarizing(diag_state({0.75, 0.25}), 1.0);
    double p = std::array<double, 3>{1.25, 1.5, 2.0}[i % 3];
    Mat rho = interior(L, rng);
    Mat U = traceless(random_hermitian(L.dim(), rng));
    U *= std::sqrt(0.01 / Onsager(L, rho, p).form(U));
    double h = hessian_form(L, rho, p, U), fd = hessian_finite_difference(L, rho, p, U);
    hess.add(std::abs(h - fd), 1e-3 * std::abs(h), fmt("sample %g p=%g", i, p));
  }
  return {kap.ok() && hess.ok(), "kappa: " + kap.str() + "; hessian: " + hess.str()};
}

// 11. Inequality chain on depolarizing(I/2, 1).
Outcome c11() {
  DbcLindbladian L = depol_uniform(2);
  Rng rng(11);
  std::vector<Mat> states;
  for (int i = 0; i < 4; ++i) states.push_back(random_density(2, rng));
  Worst w;  // slack relative to the right-hand side scale, floor -2%
  bool ok = true;
  std::string notes;
  for (double p : {1.5, 2.0}) {
    const double kappa = p / 2;
    std::vector<CheckReport> reps{
        inequality_checks(L, p, kappa, states,
                          {InequalityCheck::Hwi, InequalityCheck::Tcp, InequalityCheck::Diameter}),
        dynamic_checks(L, p, kappa, DynamicMode::Contraction, states),
        dynamic_checks(L, p, kappa, DynamicMode::GradientEstimate, states, {0.1, 0.5, 1.0}, 11)};
    for (const auto& r : reps)
      for (const auto& e : r.entries) {
        ok = ok && e.pass;
        double scale = std::max({std::abs(e.lhs), std::abs(e.rhs), 1e-12});
        w.add(-e.slack / scale, 0.02, e.check + fmt(" p=%g state=%g t=%g", p, e.index, e.t));
      }
    // transport cost with the classical constant: W <= sqrt((p / alpha) F)
    double alpha = depol_classical(p, 2);
    for (std::size_t i = 0; i < states.size(); ++i) {
      double W = w2p_solve(L, states[i], L.sigma(), p).distance;
      double F = p_divergence(states[i], L.sigma(), p).value;
      double rhs = std::sqrt(p / alpha * F);
      w.add((W - rhs) / rhs, 0.02, fmt("tcp(alpha) p=%g state=%g", p, double(i)));
    }
    if (p == 2.0) {
      for (const auto& e : reps[1].entries) {
        bool eq = std::abs(e.lhs - e.rhs) <= 0.01 * e.rhs;
        ok = ok && eq;
        if (!eq) notes += fmt(" contraction not an equality at t=%g", e.t);
      }
    }
  }
  return {ok && w.ok(), w.str() + " (relative)" + notes};
}

// 12. Mixing time against the Beckner bound.
Outcome c12() {
  Worst w;
  double h = mixing_bound(2.0, 1.0, 0.25, 0.01);
  bool anchor = std::abs(h - std::log(100 * std::sqrt(3.0))) <= 1e-10;
  std::vector<std::pair<std::string, DbcLindbladian>> models{{"depol(I/2)", depol_uniform(2)},
                                                             {"depol2", depolarizing(diag_state({0.75, 0.25}), 1.0)},
                                                             {"depol3", depol_uniform(3)}};
  for (const auto& [name, L] : models) {
    std::map<double, double> alpha;
    for (double p : {1.05, 1.1, 1.25, 1.5, 1.75, 2.0})
      alpha[p] = estimate_constant(L, ConstantKind::Beckner, p, estimate_opts()).value;
    for (double eps : {0.1, 0.01}) {
      MixingBracket b = mixing_empirical_bracket(L, eps, 7);
      w.add(b.lower, mixing_bound_inf(alpha, L.sigma_min(), eps), name + fmt(" eps=%g", eps));
    }
  }
  return {w.ok() && anchor, w.str() + fmt("; h(2, 1/4, 0.01) - log(100 sqrt 3) = %.3g", h - std::log(100 * std::sqrt(3.0)))};
}

// 13. Moments and concentration for sigma = I/d.
Outcome c13() {
  Worst w;
  Rng rng(13);
  for (int d : {2, 3}) {
    DbcLindbladian L = depol_uniform(d);
    // alpha_p >= a on the grid, including a point next to p = 1
    double a = std::numeric_limits<double>::infinity();
    for (double p : {1.0001, 1.05, 1.1, 1.25, 1.5, 1.75, 2.0}) a = std::min(a, depol_classical(p, d));
    for (int i = 0; i < 50; ++i) {
      Mat X = random_hermitian(d, rng);
      double t = 0.5 + rng.uniform();
      for (double r : {2.0, 3.0, 4.0, 6.0}) {
        MomentReport m = moment_concentration_check(L, X, r, a, 0.0, t);
        std::string at = fmt("d=%g sample=%g r=%g", d, i, r);
        w.add(-m.moment_slack(), 1e-8, at + " moment");
        w.add(-m.exp_slack(), 1e-8, at + " exponential");
        w.add(-m.tail_slack(), 1e-8, at + " tail");
      }
    }
  }
  return {w.ok(), w.str() + " (margin = slack + 1e-8)"};
}

// 14. Limits p -> 1.
Outcome c14() {
  Worst lim, ker;
  std::vector<std::pair<std::string, DbcLindbladian>> models{{"depol(I/2)", depol_uniform(2)},
                                                             {"depol2", depolarizing(diag_state({0.75, 0.25}), 1.0)},
                                                             {"depol3", depol_uniform(3)}};
  for (const auto& [name, L] : models) {
    double a1 = estimate_constant(L, ConstantKind::Mlsi, 0.0, estimate_opts()).value;
    for (double p : {1.05, 1.02, 1.01}) {
      double ap = estimate_constant(L, ConstantKind::Beckner, p, estimate_opts()).value;
      lim.add(std::abs(ap - a1), 5e-2 * a1, name + fmt(" p=%g (alpha_p=%.6f, alpha_1=%.6f)", p, ap, a1));
    }
  }
  Rng rng(14);
  for (int i = 0; i < 10; ++i) {
    int d = 2 + i % 2;
    Mat s = random_density(d, rng), rho = random_density(d, rng), A = random_ginibre(d, rng);
    double om = rng.uniform(-1, 1);
    Mat ref = log_mean_kernel_apply(rho, om, A);
    Mat k = metric_kernel_apply({rho, s, 1.001, om}, A);
    ker.add(fro(k - ref), 1e-2 * fro(ref), fmt("sample %g", i));
  }
  return {lim.ok() && ker.ok(), "alpha_p vs alpha_1: " + lim.str() + "; kernel: " + ker.str()};
}

// 15. Determinism of the full runner.
Outcome c15() {
  app::ExperimentConfig cfg = app::parse_config(app::json::object());
  cfg.tasks = app::kTaskOrder;
  std::string a = app::run(cfg).to_json(false).dump();
  std::string b = app::run(cfg).to_json(false).dump();
  return {a == b && !a.empty(), a == b ? fmt("reports identical (%g bytes)", double(a.size())) : "reports differ"};
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "jump reconstruction round trip", c1},
    {2, "depolarizing spectral anchors", c2},
    {3, "optimizer vs two-point reduction", c3},
    {4, "two-sided Beckner bound", c4},
    {5, "Stroock-Varopoulos and L_p regularity", c5},
    {6, "chi-square sandwich", c6},
    {7, "gradient-flow identity", c7},
    {8, "flat-metric transport anchor", c8},
    {9, "geodesic speed and trace-distance bound", c9},
    {10, "depolarizing curvature and Hessian", c10},
    {11, "curvature inequality chain", c11},
    {12, "mixing time bound", c12},
    {13, "moments and concentration", c13},
    {14, "p -> 1 limits", c14},
    {15, "determinism", c15},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("--criterion", only, "run only these criteria (1-15)")->check(CLI::Range(1, 15));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const Error& e) {
      o = {false, std::string("error ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.1fs]\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.note.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
