#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "io.hpp"

using namespace imcf;
namespace fs = std::filesystem;

namespace {

const char* kHeader = "t,w_min,w_max,eta_min,eta_max,H_min,H_max,u_max,v_max,k_max";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "imcf_test_io_cli" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

ExecResult exec(const std::string& text, const fs::path& out) {
  std::ostringstream log;
  RunConfig c = parse_config(text);
  return execute(c, "", out.string(), log);
}

}  // namespace

TEST_CASE("format_number") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("certify euclidean exits 0 with a zero G margin") {
  fs::path out = scratch("certify_euclidean");
  ExecResult r = exec("subcommand = certify\nscenario = euclidean\n", out);
  CHECK(r.status == 0);
  std::string txt = slurp(out / "certificate_lte.txt");
  CHECK(txt.find("G_cone: margin=0 ") != std::string::npos);
  CHECK(txt.find("overall: PASS") != std::string::npos);
  auto kv = parse_kv_file(slurp(out / "certificate_lte.kv"));
  CHECK(kv["condition.G_cone.verdict"] == "PASS");
  CHECK(kv["condition.G_cone.margin"] == "0");
  auto asym = parse_kv_file(slurp(out / "certificate_asymptotics.kv"));
  CHECK(asym["pass"] == "FAIL");
}

TEST_CASE("run example2_negative exits 1 and is tagged uncertified") {
  fs::path out = scratch("run_example2");
  ExecResult r = exec("subcommand = run\nscenario = example2_negative\nT = 0.5\n", out);
  CHECK(r.status == 1);
  std::string mon = slurp(out / "monitors.txt");
  CHECK(mon.find("# run_tag = uncertified") != std::string::npos);
  CHECK(mon.find("# lte_failed_condition = G_cone") != std::string::npos);
  auto kv = parse_kv_file(slurp(out / "certificate_lte.kv"));
  CHECK(kv["condition.G_cone.verdict"] == "FAIL");
  CHECK(kv.count("condition.G_cone.witness") == 1);
}

TEST_CASE("run hyperbolic_sphere to T=4 exits 0 with the exact CSV header") {
  fs::path out = scratch("run_hyperbolic");
  ExecResult r = exec("subcommand = run\nscenario = hyperbolic_sphere\nT = 4\ncheckpoint_every = 500\n", out);
  CHECK(r.status == 0);
  std::string csv = slurp(out / "trajectory.csv");
  CHECK(first_line(csv) == kHeader);
  CHECK(fs::exists(out / "checkpoints" / "checkpoint_00000.txt"));
  CHECK_FALSE(fs::exists(out / "halt_state.txt"));
  auto kv = parse_kv_file(slurp(out / "monitors.kv"));
  CHECK(kv["pass"] == "PASS");
  CHECK(kv["header.run_tag"] == "certified");

  FlowState cp = parse_checkpoint(slurp(out / "checkpoints" / "checkpoint_00000.txt"));
  CHECK(cp.t == 0.0);
  CHECK(cp.mode == FlowMode::rot_sym);
  CHECK(cp.F.size() == 1);
  CHECK(cp.F[0] == doctest::Approx(1.0).epsilon(1e-15));

  SUBCASE("report merges prior outputs") {
    std::ostringstream log;
    RunConfig c = parse_config("subcommand = report\n");
    ExecResult rep = execute(c, "", out.string(), log);
    CHECK(rep.status == 0);
    std::string text = slurp(out / "report.txt");
    CHECK(text.find("== Monitors: PASS") != std::string::npos);
    CHECK(text.find("check.w_floor: PASS") != std::string::npos);
    CHECK(text.find("overall: PASS") != std::string::npos);
  }
}

TEST_CASE("configuration and IO failures exit 2") {
  fs::path out = scratch("errors");
  CHECK(exec("subcommand = run\nscenario = no_such_scenario\n", out).status == 2);
  CHECK(exec("subcommand = certify\nscenario = example1\nparam.p = 7\n", out).status == 2);
  RunConfig bad;
  bad.mode = FlowMode::axisym;
  bad.resolution = 8;
  std::ostringstream log;
  CHECK(execute(bad, "", out.string(), log).status == 2);
  ExecResult r = exec("subcommand = report\n", out / "empty");
  CHECK(r.status == 2);
  CHECK(r.message.find("empty") != std::string::npos);

  // a file where the output directory should be
  fs::create_directories(out);
  std::ofstream(out / "blocker") << "x";
  ExecResult w = exec("subcommand = certify\nscenario = euclidean\n", out / "blocker" / "sub");
  CHECK(w.status == 2);
  CHECK(w.message.find("blocker") != std::string::npos);
}

TEST_CASE("output directory resolution") {
  RunConfig c;
  ::unsetenv("IMCF_LAB_OUT");
  CHECK(resolve_out_dir(c, "") == "imcf_out");
  ::setenv("IMCF_LAB_OUT", "/tmp/from_env", 1);
  CHECK(resolve_out_dir(c, "") == "/tmp/from_env");
  c.out = "from_config";
  CHECK(resolve_out_dir(c, "") == "from_config");
  CHECK(resolve_out_dir(c, "from_cli") == "from_cli");
  ::unsetenv("IMCF_LAB_OUT");
}

TEST_CASE("checkpoint text round trip") {
  Scenario sc = make_scenario("hyperbolic", {{"amplitude", 0.05}});
  FlowState s = initial_state(sc, FlowMode::axisym, 32);
  s.t = 0.125;
  std::string text = checkpoint_text(s);
  FlowState back = parse_checkpoint(text);
  CHECK(back.mode == FlowMode::axisym);
  CHECK(back.n == s.n);
  CHECK(back.t == s.t);
  CHECK(back.F == s.F);
  CHECK(checkpoint_text(back) == text);
  CHECK_THROWS_AS(parse_checkpoint("# mode = axisym\n# n = 2\n# t = 0\n# n_theta = 4\n# n_phi = 1\n0 1\n"), Error);
  CHECK_THROWS_AS(parse_checkpoint("# mode = rot_sym\n# n = 2\n# t = 0\n# n_theta = 1\n# n_phi = 1\n0 abc\n"), Error);
}

TEST_CASE("identical configs give byte-identical outputs") {
  fs::path a = scratch("det_a"), b = scratch("det_b");
  const char* cfg = "subcommand = run\nscenario = example1\nparam.amplitude = 0.05\nmode = axisym\nresolution = 32\nT = 0.3\nthreads = 4\n";
  CHECK(exec(cfg, a).status == exec(cfg, b).status);
  for (const char* f : {"trajectory.csv", "monitors.txt", "monitors.kv", "certificate_lte.txt", "certificate_asymptotics.kv"})
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
}

#ifdef IMCF_LAB_BINARY
TEST_CASE("command line binary") {
  fs::path dir = scratch("binary");
  fs::create_directories(dir);
  std::ofstream(dir / "e.cfg") << "scenario = euclidean\n";
  std::ofstream(dir / "bad.cfg") << "T = -1\n";
  std::string bin = IMCF_LAB_BINARY;
  auto status = [&](const std::string& args) {
    int rc = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  CHECK(status("certify --config " + (dir / "e.cfg").string() + " --out " + (dir / "o").string()) == 0);
  CHECK(fs::exists(dir / "o" / "certificate_lte.txt"));
  CHECK(status("run --config " + (dir / "bad.cfg").string()) == 2);
  CHECK(status("run --config " + (dir / "missing.cfg").string()) == 2);
  CHECK(status("run") == 2);
  CHECK(status("frobnicate --config x") == 2);
  CHECK(status("--help") == 0);
  ::setenv("IMCF_LAB_OUT", (dir / "env_out").c_str(), 1);
  CHECK(status("certify -q --seed 3 --config " + (dir / "e.cfg").string()) == 0);
  ::unsetenv("IMCF_LAB_OUT");
  CHECK(fs::exists(dir / "env_out" / "certificate_lte.kv"));
}
#endif
