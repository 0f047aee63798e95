#include "app.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace qb;
using namespace qb::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("qb_app_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

int cli(const std::string& args) {
  std::string cmd = std::string(QB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::optional<Errc> config_code(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string config_message(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// I/2 depolarizing generator X -> tr(X) I/2 - X as a column-stacked matrix.
json depolarizing_superoperator() {
  Mat M = Mat::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Mat E = Mat::Zero(2, 2);
      E(a, b) = 1;
      Mat Y = E.trace() * Mat::Identity(2, 2) / 2.0 - E;
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i) M(k * 2 + i, b * 2 + a) = Y(i, k);
    }
  return matrix_to_json(M);
}

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
  ExperimentConfig c = parse_config(json::object());
  EXPECT_EQ(c.dimension, 2);
  EXPECT_EQ(c.sigma.eigenvalues, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(c.ricci.samples, 64);
  for (const auto& name : kFixtureNames) {
    ExperimentConfig f = parse_config(config_to_json(fixture(name)));
    EXPECT_TRUE(parse_config(config_to_json(f)) == f) << name;
  }
}

TEST(Config, TextRoundTripPreservesBits) {
  ExperimentConfig f = parse_config(config_to_json(fixture("random_dbc_seeded")));
  ExperimentConfig g = parse_config_text(config_to_json(f).dump(2));
  EXPECT_TRUE(g == f);
}

TEST(Config, RejectsUnknownKeysWithPath) {
  EXPECT_EQ(config_code(R"({"bogus": 1})"), Errc::ConfigError);
  EXPECT_NE(config_message(R"({"transport": {"step": 3}})").find("transport.step"), std::string::npos);
  EXPECT_NE(config_message(R"({"generator": {"kind": "depolarizing", "gama": 1}})").find("generator.gama"),
            std::string::npos);
}

TEST(Config, RejectsInconsistentFields) {
  EXPECT_EQ(config_code(R"({"dimension": 3, "sigma": {"eigenvalues": [0.5, 0.5]}})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"sigma": {"eigenvalues": [0.6, 0.6]}})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"sigma": {"eigenvalues": [1.0, 0.0]}})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"p_grid": [1.0]})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"p_grid": [2.5]})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"q_grid": [2.0]})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"tasks": ["constants", "nope"]})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"generator": {"kind": "magic"}})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"sigma": {"basis": [[[1,0],[1,0]],[[0,0],[1,0]]]}})"), Errc::ConfigError);
  EXPECT_EQ(config_code(R"({"transport": {"steps": 1}})"), Errc::ConfigError);
}

TEST(Config, SyntaxErrorReportsLine) {
  std::string msg = config_message("{\n  \"dimension\": 2,\n  oops\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, UnknownFixture) {
  try {
    fixture("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownFixture);
  }
}

TEST(Config, FixtureModels) {
  for (const auto& name : kFixtureNames) {
    DbcLindbladian L = build_model(parse_config(config_to_json(fixture(name))));
    EXPECT_LT(L.residuals().worst(), 1e-8) << name;
  }
  // the classical embedding reproduces the two-point chain constant
  DbcLindbladian L = build_model(fixture("classical_embed", 0.25));
  EXPECT_NEAR(L.sigma_min(), 0.25, 1e-15);
}

TEST(Config, SuperoperatorGenerator) {
  json j = {{"generator", {{"kind", "superoperator"}, {"matrix", depolarizing_superoperator()}}}};
  DbcLindbladian L = build_model(parse_config(j));
  DbcLindbladian ref = depolarizing(identity(2) / 2.0, 1.0);
  EXPECT_LT(rel_diff(L.generator().matrix, ref.generator().matrix), 1e-12);
}

TEST(Run, CorruptedGeneratorIsReported) {
  json j = {{"sigma", {{"eigenvalues", {0.7, 0.3}}}},
            {"generator", {{"kind", "superoperator"}, {"matrix", depolarizing_superoperator()}}},
            {"tasks", {"verify"}}};
  RunReport r = run(parse_config(j));
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, "NotDbc");
  EXPECT_EQ(r.errors[0].message.find("NotDbc"), std::string::npos);
  EXPECT_FALSE(r.hard_pass());
}

TEST(Run, DimensionOneSkips) {
  ExperimentConfig c = parse_config(json{{"dimension", 1}});
  c.tasks = kTaskOrder;
  RunReport r = run(c);
  EXPECT_TRUE(r.hard_pass());
  EXPECT_TRUE(r.checks.empty());
  for (const auto& t : kTaskOrder) EXPECT_TRUE(r.results[t].contains("skipped")) << t;
}

TEST(Run, ResolveAddsPrerequisites) {
  EXPECT_EQ(resolve_tasks({"ricci"}), (std::vector<std::string>{"constants", "ricci"}));
  EXPECT_EQ(resolve_tasks({"verify", "decay"}), (std::vector<std::string>{"constants", "decay", "verify"}));
}

TEST(Run, VerifyPassesOnFixtures) {
  for (const auto& name : kFixtureNames) {
    ExperimentConfig c = parse_config(config_to_json(fixture(name)));
    c.tasks = {"verify"};
    RunReport r = run(c);
    EXPECT_TRUE(r.hard_pass()) << name << "\n" << failure_table(r);
    EXPECT_GT(r.checks.size(), 20u);
  }
}

TEST(Run, SeedChangesStates) {
  ExperimentConfig c = parse_config(json::object());
  c.tasks = {"decay"};
  std::string a = run(c).to_json(false).dump();
  c.set_seed(99);
  std::string b = run(c).to_json(false).dump();
  EXPECT_NE(a, b);
}

TEST(Emit, Formats) {
  ExperimentConfig c = parse_config(config_to_json(fixture("depol2")));
  c.tasks = {"constants"};
  RunReport r = run(c);
  fs::path dir = scratch("emit");
  auto json_files = emit(r, Format::Json, dir.string());
  ASSERT_EQ(json_files.size(), 1u);
  std::ifstream in(json_files[0]);
  json back = json::parse(in);
  EXPECT_EQ(back["summary"]["pass"], r.hard_pass());
  auto csv = emit(r, Format::Csv, dir.string());
  EXPECT_TRUE(fs::exists(dir / "constants.csv"));
  auto dat = emit(r, Format::Plotdata, dir.string());
  EXPECT_TRUE(fs::exists(dir / "constants_vs_p.dat"));
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Emit, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
  EXPECT_EQ(parse_format("csv"), Format::Csv);
  EXPECT_THROW(parse_format("xml"), Error);
}

TEST(Cli, ExitCodes) {
  fs::path bad = scratch("bad.json"), d1 = scratch("d1.json"), corrupt = scratch("corrupt.json");
  write(bad, R"({"dimension": 2, "bogus": 1})");
  write(d1, R"({"dimension": 1})");
  json j = {{"sigma", {{"eigenvalues", {0.7, 0.3}}}},
            {"generator", {{"kind", "superoperator"}, {"matrix", depolarizing_superoperator()}}}};
  write(corrupt, j.dump());
  EXPECT_EQ(cli("verify"), 0);
  EXPECT_EQ(cli("verify --config " + d1.string()), 0);
  EXPECT_EQ(cli("verify --config " + bad.string()), 2);
  EXPECT_EQ(cli("verify --config " + corrupt.string()), 1);
  EXPECT_EQ(cli("verify --config /nonexistent/config.json"), 2);
  EXPECT_EQ(cli("verify --format xml"), 2);
  EXPECT_EQ(cli("fixtures nope"), 2);
  EXPECT_EQ(cli("fixtures"), 0);
  EXPECT_EQ(cli("transport --p 3"), 2);
  EXPECT_EQ(cli("bogus"), 2);
}

TEST(Cli, FixtureFileRoundTrip) {
  fs::path dir = scratch("fx");
  ASSERT_EQ(cli("fixtures depol3 --out " + dir.string()), 0);
  ExperimentConfig c = load_config((dir / "depol3.json").string());
  EXPECT_TRUE(c == parse_config(config_to_json(fixture("depol3"))));
}
