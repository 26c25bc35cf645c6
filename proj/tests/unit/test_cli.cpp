#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "tariffkit/cli/cli.hpp"
#include "tariffkit/datagen.hpp"
#include "tariffkit/econometrics/did.hpp"
#include "tariffkit/io/csv.hpp"
#include "tariffkit/io/json_io.hpp"
#include "tariffkit/presets.hpp"
#include "temp_dir.hpp"

using namespace tariffkit;
using tariffkit::testing::slurp;
using tariffkit::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Exit status of the installed binary, for checks that go through main().
int binary(const std::string& args) {
  const std::string cmd = std::string(TARIFFKIT_CLI_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::pair<std::string, std::string>> files(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> v;
  for (const auto& e : fs::directory_iterator(dir)) v.emplace_back(e.path().filename(), slurp(e.path()));
  std::sort(v.begin(), v.end());
  return v;
}

void write(const fs::path& p, const std::string& text) { io::write_text(p, text); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes of the binary") {
  TempDir d("cli_exit");
  const std::string out = " --out " + (d / "o").string();
  CHECK(binary("--help") == 0);
  CHECK(binary("simulate" + out) == 0);
  CHECK(binary("simulate --preset nosuch" + out) == 2);
  CHECK(binary("simulate --no-such-flag" + out) == 2);
  CHECK(binary("") == 2);
  CHECK(binary("estimate --method did --input " + (d / "missing.csv").string() + out) == 2);
  CHECK(binary("report --input " + (d / "empty").string() + out) == 2);
}

TEST_CASE("unknown names list the alternatives") {
  TempDir d("cli_names");
  const Outcome p = invoke({"simulate", "--preset", "nosuch", "--out", (d / "o").string()});
  CHECK(p.code == 2);
  CHECK(p.err.find("paper2018") != std::string::npos);
  const Outcome e = invoke({"montecarlo", "--experiment", "nosuch", "--out", (d / "o").string()});
  CHECK(e.code == 2);
  CHECK(e.err.find("did-recovery") != std::string::npos);
  const Outcome m = invoke({"estimate", "--method", "gmm", "--input", "x.csv"});
  CHECK(m.code == 2);
  CHECK(m.err.find("shrunk") != std::string::npos);
}

TEST_CASE("config blocks are checked against the command") {
  TempDir d("cli_config");
  write(d / "wrong.json", R"({"datagen": {"kind": "panel"}})");
  CHECK(invoke({"simulate", "--config", (d / "wrong.json").string(), "--out", (d / "o").string()}).code == 2);
  write(d / "typo.json", R"({"simulate": {"seasonz": 3}})");
  const Outcome t = invoke({"simulate", "--config", (d / "typo.json").string(), "--out", (d / "o").string()});
  CHECK(t.code == 2);
  CHECK(t.err.find("seasonz") != std::string::npos);
  write(d / "bad.json", "{not json");
  CHECK(invoke({"simulate", "--config", (d / "bad.json").string()}).code == 2);
}

TEST_CASE("flags override the config file, which overrides the preset") {
  TempDir d("cli_precedence");
  write(d / "c.json", R"({"out": "ignored", "simulate": {"seasons": 3}})");
  const auto o = (d / "o").string();
  REQUIRE(invoke({"simulate", "--config", (d / "c.json").string(), "--out", o}).code == 0);
  const io::CsvTable path = io::read_csv(d / "o" / "path.csv");
  CHECK(path.rows.size() == 4);  // season 0 plus three
  REQUIRE(invoke({"simulate", "--config", (d / "c.json").string(), "--out", o, "--seasons", "5"}).code == 0);
  CHECK(io::read_csv(d / "o" / "path.csv").rows.size() == 6);
  CHECK_FALSE(fs::exists("ignored"));
}

TEST_CASE("a numerical failure exits with code 1") {
  TempDir d("cli_numeric");
  write(d / "c.json", R"({"datagen": {"kind": "series", "var": {"T": 30, "shock_date": 10, "dummy_length": 1}}})");
  const auto o = (d / "o").string();
  REQUIRE(invoke({"datagen", "--config", (d / "c.json").string(), "--out", o}).code == 0);
  const Outcome r =
      invoke({"estimate", "--method", "svar", "--lags", "12", "--input", (d / "o" / "series.csv").string(),
           "--out", o});
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("every command is byte-deterministic") {
  TempDir d("cli_determinism");
  const std::vector<std::vector<std::string>> runs = {
      {"simulate", "--calibrate"},
      {"datagen", "--preset", "tradewar"},
      {"montecarlo", "--experiment", "did-recovery", "--reps", "20"},
      {"montecarlo", "--experiment", "table1", "--reps", "20"},
  };
  for (std::size_t i = 0; i < runs.size(); ++i) {
    CAPTURE(i);
    const auto a = (d / ("a" + std::to_string(i))).string();
    const auto b = (d / ("b" + std::to_string(i))).string();
    auto args = runs[i];
    args.insert(args.end(), {"--out", a});
    const Outcome first = invoke(args);
    REQUIRE(first.code == 0);
    args.back() = b;
    const Outcome second = invoke(args);
    REQUIRE(second.code == 0);
    CHECK(files(a) == files(b));
  }

  const auto data = (d / "a1").string();
  for (const auto& m : std::vector<std::vector<std::string>>{
           {"--method", "did", "--input", data + "/panel.csv"},
           {"--method", "placebo", "--fake-year", "2016", "--input", data + "/panel.csv"},
           {"--method", "svar", "--input", data + "/series.csv"},
           {"--method", "shrunk", "--input", data + "/series.csv"},
           {"--method", "iv", "--input", data + "/iv.csv"}}) {
    CAPTURE(m[1]);
    std::vector<std::string> args{"estimate"};
    args.insert(args.end(), m.begin(), m.end());
    args.insert(args.end(), {"--out", (d / "ea").string()});
    REQUIRE(invoke(args).code == 0);
    args.back() = (d / "eb").string();
    REQUIRE(invoke(args).code == 0);
    CHECK(files(d / "ea") == files(d / "eb"));
    fs::remove_all(d / "ea");
    fs::remove_all(d / "eb");
  }

  REQUIRE(invoke({"report", "--input", (d / "a3").string(), "--out", (d / "ra").string()}).code == 0);
  REQUIRE(invoke({"report", "--input", (d / "a3").string(), "--out", (d / "rb").string()}).code == 0);
  CHECK(slurp(d / "ra" / "table1.md") == slurp(d / "rb" / "table1.md"));
}

TEST_CASE("serial and parallel Monte Carlo write the same bytes") {
  TempDir d("cli_serial");
  const std::vector<std::string> base{"montecarlo", "--experiment", "placebo", "--reps", "12"};
  auto s = base;
  s.insert(s.end(), {"--serial", "--out", (d / "s").string()});
  auto p = base;
  p.insert(p.end(), {"--threads", "3", "--out", (d / "p").string()});
  REQUIRE(invoke(s).code == 0);
  REQUIRE(invoke(p).code == 0);
  CHECK(files(d / "s") == files(d / "p"));
}

TEST_CASE("estimate did reproduces the library estimate exactly") {
  TempDir d("cli_did");
  const auto o = (d / "o").string();
  REQUIRE(invoke({"datagen", "--kind", "panel", "--seed", "9", "--out", o}).code == 0);
  REQUIRE(invoke({"estimate", "--method", "did", "--input", o + "/panel.csv", "--out", o}).code == 0);
  const io::Json j = io::parse_json(slurp(d / "o" / "did.json"), "did.json");

  const PresetBundle b = preset("paper2018");
  const StatePanel panel = io::panel_from_table(io::read_csv(d / "o" / "panel.csv"));
  const DidResult want = twfe_did(panel, b.treatment_year, b.did_mode);
  CHECK(j["result"]["beta_hat"].get<double>() == want.beta_hat);
  CHECK(j["result"]["std_error"].get<double>() == want.std_error);

  PanelSpec spec = b.panel;
  spec.seed = 9;
  const StatePanel regenerated = generate_did_panel(spec);
  CHECK(twfe_did(regenerated, b.treatment_year, b.did_mode).beta_hat == want.beta_hat);
}

TEST_CASE("simulate with a zero tariff leaves prices unchanged") {
  TempDir d("cli_tau0");
  const auto o = (d / "o").string();
  REQUIRE(invoke({"simulate", "--tau", "0", "--out", o}).code == 0);
  const io::Json s = io::parse_json(slurp(d / "o" / "summary.json"), "summary.json");
  CHECK(s["price_change_frac"].get<double>() == 0.0);
  CHECK(s["subsidy"]["payment"].get<double>() == 0.0);
  CHECK(invoke({"simulate", "--tau", "-0.1", "--out", o}).code == 2);
}

TEST_CASE("tables can be written as JSON") {
  TempDir d("cli_json");
  const auto o = (d / "o").string();
  REQUIRE(invoke({"simulate", "--format", "json", "--out", o}).code == 0);
  CHECK_FALSE(fs::exists(d / "o" / "path.csv"));
  const io::Json path = io::parse_json(slurp(d / "o" / "path.json"), "path.json");
  REQUIRE(path.is_array());
  CHECK(path[0].contains("acreage"));
  CHECK(invoke({"simulate", "--format", "xml", "--out", o}).code == 2);
}

TEST_CASE("report from a Monte Carlo run and from a single estimate") {
  TempDir d("cli_report");
  const auto o = (d / "o").string();
  REQUIRE(invoke({"montecarlo", "--experiment", "table1", "--reps", "1", "--out", o}).code == 0);
  const Outcome r = invoke({"report", "--input", o, "--out", o});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("| Treated states |") != std::string::npos);
  CHECK(r.out.find("**DiD estimate**") != std::string::npos);
  CHECK(slurp(d / "o" / "table1.md") == r.out);

  const auto e = (d / "e").string();
  REQUIRE(invoke({"datagen", "--kind", "panel", "--out", e}).code == 0);
  REQUIRE(invoke({"estimate", "--method", "did", "--input", e + "/panel.csv", "--out", e}).code == 0);
  CHECK(invoke({"report", "--input", e, "--out", e}).code == 0);

  fs::create_directories(d / "empty");
  CHECK(invoke({"report", "--input", (d / "empty").string()}).code == 2);
}

TEST_CASE("help is printed without running anything") {
  const Outcome h = invoke({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("montecarlo") != std::string::npos);
}

}  // TEST_SUITE
