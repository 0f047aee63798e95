#include "app.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace qb;
using namespace qb::app;

namespace {

constexpr int kExitOk = 0, kExitCheck = 1, kExitConfig = 2;

struct Options {
  std::string config, fixture, out, format = "json";
  std::optional<std::uint64_t> seed;
  std::vector<double> p;
  std::optional<int> steps, samples;
  std::optional<double> tol;
};

ExperimentConfig load(const Options& o) {
  if (!o.config.empty() && !o.fixture.empty()) fail(Errc::ConfigError, "give either --config or --fixture");
  ExperimentConfig c = !o.config.empty()    ? load_config(o.config)
                       : !o.fixture.empty() ? parse_config(config_to_json(fixture(o.fixture)))
                                            : parse_config(json::object());
  if (o.seed) c.set_seed(*o.seed);
  return c;
}

int finish(const RunReport& r, const Options& o, bool verbose_failures) {
  if (o.out.empty()) {
    std::cout << r.to_json().dump(2) << "\n";
  } else {
    for (const auto& path : emit(r, parse_format(o.format), o.out)) std::cerr << "wrote " << path << "\n";
  }
  std::string table = failure_table(r);
  if (!table.empty() && verbose_failures) std::cerr << table;
  return r.hard_pass() ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beckner constants, transport distances and curvature for detailed-balance Lindbladians"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "experiment config (JSON)");
  app.add_option("--fixture", o.fixture, "use a named fixture as the config");
  app.add_option("--out", o.out, "output directory (default: report JSON on stdout)");
  app.add_option("--seed", o.seed, "seed for states, optimizer starts and curvature samples");
  app.add_option("--format", o.format, "json, csv or plotdata")->check(CLI::IsMember({"json", "csv", "plotdata"}));

  std::vector<std::pair<std::string, CLI::App*>> task_cmds;
  for (const char* name : {"constants", "decay", "mixing", "transport", "ricci", "verify"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " task");
    sub->fallthrough();
    task_cmds.emplace_back(name, sub);
  }
  auto* transport = task_cmds[3].second;
  transport->add_option("--p", o.p, "exponents p in (1, 2]");
  transport->add_option("--steps", o.steps, "time steps N");
  transport->add_option("--tol", o.tol, "relative stopping tolerance");
  auto* ricci = task_cmds[4].second;
  ricci->add_option("--p", o.p, "exponents p in (1, 2]");
  ricci->add_option("--samples", o.samples, "number of sampled states");

  auto* run_cmd = app.add_subcommand("run", "run the tasks listed in the config");
  run_cmd->fallthrough();
  std::string fixture_name;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "list fixtures, or print one as a config");
  fixtures_cmd->fallthrough();
  fixtures_cmd->add_option("name", fixture_name, "fixture name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (fixtures_cmd->parsed()) {
      if (fixture_name.empty()) {
        for (const auto& n : kFixtureNames) std::cout << n << "\n";
        return kExitOk;
      }
      std::string text = config_to_json(parse_config(config_to_json(fixture(fixture_name)))).dump(2) + "\n";
      if (o.out.empty()) {
        std::cout << text;
      } else {
        std::filesystem::create_directories(o.out);
        write_atomic((std::filesystem::path(o.out) / (fixture_name + ".json")).string(), text);
      }
      return kExitOk;
    }

    ExperimentConfig cfg = load(o);
    if (!run_cmd->parsed()) {
      for (const auto& [name, sub] : task_cmds)
        if (sub->parsed()) cfg.tasks = {name};
    }
    if (!o.p.empty()) {
      for (double p : o.p)
        if (!(p > 1.0 && p <= 2.0)) fail(Errc::ConfigError, "--p: values must lie in (1, 2]");
      (transport->parsed() ? cfg.transport.p : cfg.ricci.p) = o.p;
    }
    if (o.steps) {
      if (*o.steps < 2) fail(Errc::ConfigError, "--steps: must be at least 2");
      cfg.transport.steps = *o.steps;
    }
    if (o.tol) {
      if (!(*o.tol > 0)) fail(Errc::ConfigError, "--tol: must be positive");
      cfg.transport.tol = *o.tol;
    }
    if (o.samples) {
      if (*o.samples < 1) fail(Errc::ConfigError, "--samples: must be at least 1");
      cfg.ricci.samples = *o.samples;
    }
    RunReport r = run(cfg);
    bool is_verify = task_cmds[5].second->parsed();
    int code = finish(r, o, true);
    if (is_verify && code == kExitOk)
      std::cerr << "verify: " << r.checks.size() << " checks passed\n";
    return code;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    if (e.code() == Errc::ConfigError || e.code() == Errc::UnknownFixture || e.code() == Errc::IoError)
      return kExitConfig;
    return kExitCheck;
  }
}
