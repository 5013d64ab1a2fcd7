#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "contmech/csv.hpp"
#include "contmech_cli/cli.hpp"

using namespace contmech;
namespace cli = contmech::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
struct Run {
  int rc = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = contmech::cli::run_cli(args, out, err);
  return {rc, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("CONTMECH_TEST_TMP");
  const fs::path dir = fs::path(env ? env : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

CsvTable table(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}
}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).rc == cli::kExitUsage);
  CHECK(invoke({"bogus"}).rc == cli::kExitUsage);
  CHECK(invoke({"calibrate", "--epsilon", "1"}).rc == cli::kExitUsage);
  CHECK(invoke({"calibrate", "--epsilon", "1", "--delta", "1e-6", "--mechanism", "nope"}).rc == cli::kExitUsage);
  CHECK(invoke({"verify", "--check", "nope"}).rc == cli::kExitUsage);
  CHECK(invoke({"simulate", "--mechanism", "meta", "--quadrant", "zz"}).rc == cli::kExitUsage);
  CHECK(invoke({"experiment", "fig9"}).rc == cli::kExitUsage);
  CHECK(invoke({"--help"}).rc == cli::kExitOk);
}

TEST_CASE("calibrate prints the budget breakdown") {
  const Run r = invoke({"calibrate", "--epsilon", "1", "--delta", "1e-6", "--mechanism", "unk-base", "--delta0", "2"});
  REQUIRE(r.rc == 0);
  const json j = json::parse(r.out);
  CHECK(j["mechanism"] == "unk-base");
  CHECK(j["rho_numerator"] == 2);
  CHECK(j["delta_multiplier"] == 2);
  CHECK(j["delta_prime"].get<double>() == doctest::Approx(5e-7));
  CHECK(j["delta_threshold"].get<double>() == doctest::Approx(2.5e-7));
  CHECK(j["achieved"]["epsilon"].get<double>() == doctest::Approx(1.0));
  const double tau = j["tau"].get<double>();
  CHECK(j["rho"].get<double>() == doctest::Approx(2.0 / (2 * tau * tau)));
}

TEST_CASE("optimize-base csv") {
  const Run r = invoke({"optimize-base", "--t-max", "16"});
  REQUIRE(r.rc == 0);
  const CsvTable t = table(r.out);
  CHECK(t.header == std::vector<std::string>{"r", "objective", "std_ratio_vs_base2"});
  CHECK(t.rows.size() == 15);
  CHECK(t.rows[1] == std::vector<std::string>{"3", "18", format_number(std::sqrt(18.0 / 25.0))});
  const CsvTable sweep = table(invoke({"optimize-base", "--t-max", "100", "--sweep"}).out);
  CHECK(sweep.header.front() == "t");
}

TEST_CASE("simulate csv layouts") {
  const CsvTable ub = table(invoke({"simulate", "--mechanism", "unk-base", "--T", "20", "--d", "4", "--tau", "0.5",
                                 "--delta", "0.1", "--seed", "3"})
                                .out);
  CHECK(ub.header == std::vector<std::string>{"t", "label", "noisy_count"});

  const Run sg = invoke({"simulate", "--mechanism", "sparse-gumb", "--T", "50", "--d", "10", "--switches", "2", "--k",
                      "2", "--eta", "auto", "--seed", "4"});
  REQUIRE(sg.rc == 0);
  const CsvTable t = table(sg.out);
  CHECK(t.header == std::vector<std::string>{"t", "selected_labels", "counts", "switch_flag"});
  REQUIRE(t.rows.size() == 50);
  for (const auto& row : t.rows) CHECK((row[3] == "0" || row[3] == "1"));

  for (const char* q : {"kr", "ku", "ur", "uu"}) {
    const Run m = invoke({"simulate", "--mechanism", "meta", "--quadrant", q, "--T", "16", "--d", "5", "--tau", "1",
                       "--seed", "5"});
    INFO(q);
    CHECK(m.rc == 0);
    CHECK(m.out.rfind("# contmech-v1\n", 0) == 0);
  }
  // Same seed, same bytes.
  const std::vector<std::string> args{"simulate", "--mechanism", "known-base", "--T", "30", "--d", "6", "--seed", "9"};
  CHECK(invoke(args).out == invoke(args).out);
}

TEST_CASE("simulate calibrates from epsilon") {
  const Run r = invoke({"simulate", "--mechanism", "known-base", "--T", "10", "--d", "3", "--epsilon", "2", "--delta",
                     "1e-5"});
  CHECK(r.rc == 0);
}

TEST_CASE("out flag and config file") {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "run.json";
  {
    std::ofstream f(cfg);
    f << R"({"t-max": 8, "out": ")" << (dir / "base.csv").string() << R"("})";
  }
  const Run r = invoke({"optimize-base", "--config", cfg.string()});
  REQUIRE(r.rc == 0);
  CHECK(table(slurp(dir / "base.csv")).rows.size() == 7);
  // Flags on the command line win over the file.
  REQUIRE(invoke({"optimize-base", "--config", cfg.string(), "--t-max", "4"}).rc == 0);
  CHECK(table(slurp(dir / "base.csv")).rows.size() == 3);
  CHECK(invoke({"optimize-base", "--config", (dir / "missing.json").string()}).rc == cli::kExitUsage);
}

TEST_CASE("verify reports and exit codes") {
  const Run ok = invoke({"verify", "--check", "dummy-equivalence", "--trials", "2000", "--seed", "2"});
  CHECK(ok.rc == cli::kExitOk);
  const json j = json::parse(ok.out);
  CHECK(j["passed"] == true);
  CHECK(j["reports"].size() == 1);
  CHECK(json::parse(invoke({"verify", "--check", "good-equivalence", "--trials", "500"}).out)["reports"].size() == 2);
  // Too few trials for the upper confidence bound to clear delta0 * delta.
  const Run weak = invoke({"verify", "--check", "bad-outcomes-unkgauss", "--trials", "3000", "--seed", "1"});
  CHECK(weak.rc == cli::kExitCheckFailed);
  CHECK(json::parse(weak.out)["passed"] == false);
}

TEST_CASE("fig4 experiment is reproducible") {
  const fs::path dir = scratch("fig4");
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  REQUIRE(invoke({"experiment", "fig4", "--trials", "10", "--seed", "7", "--out", a}).rc == 0);
  REQUIRE(invoke({"experiment", "fig4", "--trials", "10", "--seed", "7", "--out", b}).rc == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(text.rfind("# contmech-v1\nseries,s,eta,t,mean_error\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("default output directory comes from the environment") {
  const fs::path dir = scratch("envdir");
  ::setenv(cli::kOutDirEnv, dir.string().c_str(), 1);
  const Run r = invoke({"experiment", "fig1", "--t-max", "100"});
  ::unsetenv(cli::kOutDirEnv);
  REQUIRE(r.rc == 0);
  CHECK(fs::exists(dir / "fig1.csv"));
  CHECK(table(slurp(dir / "fig1.csv")).header.front() == "t");
}
