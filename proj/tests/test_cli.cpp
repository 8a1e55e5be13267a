#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "finjj/sweep_table.hpp"

using namespace finjj;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

SweepTable csv(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("band table over a wide offset range") {
  const Run r = run({"bands", "--pairs", "10", "--ejec", "0.2", "--from", "-11", "--to", "11", "--steps", "441", "--levels", "3"});
  REQUIRE(r.code == cli::exit_ok);
  const SweepTable t = csv(r.out);
  CHECK(t.grid.size() == 441);
  REQUIRE(t.columns.size() == 3);
  CHECK(t.columns[0].first == "E0");
  CHECK(t.columns[2].first == "E2");
  CHECK(t.meta["command"] == "bands");
  CHECK(r.err.find("bands: 441 points") == 0);
}

TEST_CASE("susceptibility and imbalance sweeps") {
  const Run x = run({"susceptibility", "--pairs", "10", "--ejec", "0.2", "--values", "0,0.5"});
  REQUIRE(x.code == cli::exit_ok);
  const SweepTable t = csv(x.out);
  CHECK(t.has_column("chi"));
  CHECK(t.column("chi")[1] > t.column("chi")[0]);

  const Run n = run({"imbalance", "--pairs", "1e1", "--ejec", "0.2", "--values", "20", "--format", "json"});
  REQUIRE(n.code == cli::exit_ok);
  const SweepTable j = from_json(n.out);
  CHECK(std::abs(j.column("n_expect")[0] - 5.0) < 1e-3);
}

TEST_CASE("transmon shift and validity summaries") {
  const Run s = run({"transmon-shift", "--ej-ghz", "10", "--ec-ghz", "0.2", "--pairs", "5e8", "--ng", "1e6"});
  REQUIRE(s.code == cli::exit_ok);
  CHECK(s.err.find("-8.0") != std::string::npos);
  const SweepTable t = csv(s.out);
  CHECK(std::abs(t.meta["shift_khz"].get<double>() + 8.0) < 0.08);

  const Run v = run({"validity", "--material", "aluminum"});
  REQUIRE(v.code == cli::exit_ok);
  const SweepTable w = csv(v.out);
  CHECK(std::abs(w.column("n_min")[0] / 1.0e4 - 1.0) < 0.05);
  CHECK(std::abs(w.column("gate_voltage_v")[0] - 1000.0) < 1e-9);
}

TEST_CASE("analytic values") {
  const Run r = run({"analytic", "--pairs", "10", "--ejec", "0.01", "--ng", "0.5"});
  REQUIRE(r.code == cli::exit_ok);
  const SweepTable t = csv(r.out);
  CHECK(t.column("cpb_gap")[0] * t.column("cpb_susceptibility")[0] == doctest::Approx(1.0).epsilon(1e-12));
  const Run off = run({"analytic", "--pairs", "10", "--ejec", "0.01", "--ng", "0.25"});
  CHECK(std::isnan(csv(off.out).column("cpb_gap")[0]));
}

TEST_CASE("curvature scan") {
  const Run r = run({"curvature", "--kind", "dispersion", "--pairs", "600", "--values", "100"});
  REQUIRE(r.code == cli::exit_ok);
  const SweepTable t = csv(r.out);
  CHECK(t.grid_name == "ej_over_ec");
  CHECK(std::abs(t.column("ratio")[0] - 1.0) < 0.01);
}

TEST_CASE("Wick verification") {
  const Run r = run({"wick-verify", "--count", "50"});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(r.err.find("wick-verify: 50/50") == 0);
  const Run bad = run({"wick-verify", "--count", "5", "--tol", "1e-300"});
  CHECK(bad.code == cli::exit_check_failed);
}

TEST_CASE("Hamiltonian dump") {
  const Run r = run({"hamiltonian", "--pairs", "1", "--ejec", "1"});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(r.out.find("-0.5 0.25 -1\n0.5 0.25 0\n") != std::string::npos);
  CHECK(run({"hamiltonian", "--pairs", "1e6"}).code == cli::exit_bad_parameter);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::exit_bad_parameter);
  CHECK(run({"--help"}).code == cli::exit_ok);
  CHECK(run({"bands", "--pairs", "0"}).code == cli::exit_bad_parameter);
  CHECK(run({"bands", "--pairs", "2.5"}).code == cli::exit_bad_parameter);
  CHECK(run({"bands", "--pairs", "10", "--ejec", "-1"}).code == cli::exit_bad_parameter);
  const Run reversed = run({"bands", "--pairs", "10", "--from", "1", "--to", "0"});
  CHECK(reversed.code == cli::exit_bad_parameter);
  CHECK(reversed.err.find("--") != std::string::npos);
  const Run negative = run({"bands", "--pairs", "10", "--ejec", "-1"});
  CHECK(negative.err.find("--ejec") != std::string::npos);
  const Run unknown = run({"bands", "--pairs", "10", "--bogus"});
  CHECK(unknown.code == cli::exit_bad_parameter);

  const Run stuck = run({"bands", "--pairs", "1e5", "--ejec", "50", "--values", "0", "--half-width", "4",
                         "--w-max", "8"});
  CHECK(stuck.code == cli::exit_not_converged);
  CHECK(stuck.out.find("nan") != std::string::npos);
}

TEST_CASE("output is deterministic across thread counts") {
  const std::vector<std::string> base{"bands", "--pairs", "41", "--ejec", "3", "--from", "-3", "--to", "3",
                                      "--steps", "61", "--frequency"};
  std::vector<std::string> one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const Run a = run(one);
  const Run b = run(four);
  REQUIRE(a.code == cli::exit_ok);
  // The meta block records no thread count, so the bytes match.
  CHECK(a.out == b.out);
}

TEST_CASE("file output") {
  const auto path = std::filesystem::temp_directory_path() / "finjj_cli_test.json";
  const Run r = run({"bands", "--pairs", "4", "--values", "0,1", "--format", "json", "-o", path.string()});
  REQUIRE(r.code == cli::exit_ok);
  CHECK(r.out.find(" -> ") != std::string::npos);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(from_json(text.str()).grid.size() == 2);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
