#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "lwsw/io.hpp"

using namespace lwsw;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("waves_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_waves(const std::string& args, const std::string& env_prefix = "") {
  const char* bin = std::getenv("WAVES_BIN");
  REQUIRE(bin != nullptr);
  fs::path out = work_dir() / "stdout.txt";
  fs::path err = work_dir() / "stderr.txt";
  std::string cmd = env_prefix + "\"" + bin + "\" " + args + " > " + out.string() + " 2> " + err.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// value of a key=value token in a summary line
std::string token(const std::string& text, const std::string& key) {
  auto pos = text.find(key + "=");
  REQUIRE(pos != std::string::npos);
  pos += key.size() + 1;
  auto end = text.find_first_of(" \n", pos);
  return text.substr(pos, end - pos);
}

}  // namespace

TEST_CASE("standing subcommand produces the expected summary", "[cli]") {
  RunResult r = run_waves("standing --p 0");
  CHECK(r.exit_code == 0);
  CHECK(std::stod(token(r.out, "phi0")) == Catch::Approx(std::pow(8.0 / 3.0, 1.5)).epsilon(1e-6));
  CHECK(token(r.out, "x0") == "inf");
}

TEST_CASE("standing rejects exponents outside the admissible window", "[cli]") {
  RunResult r = run_waves("standing --p 0.7");
  CHECK(r.exit_code == 2);
}

TEST_CASE("standing with a negative exponent reports a finite support radius", "[cli]") {
  fs::path prof = work_dir() / "standing_neg.json";
  RunResult r = run_waves("standing --p -0.5 --grid-l 40 --grid-n 1024 --out " + prof.string());
  CHECK(r.exit_code == 0);
  std::string x0 = token(r.out, "x0");
  CHECK(x0 != "inf");
  CHECK(std::stod(x0) > 0.0);
  ProfileDocument doc = read_profile(prof.string());
  CHECK(doc.provenance == "standing");
  CHECK(doc.profile.params.p == -0.5);
  CHECK(doc.profile.c == 0.0);
}

TEST_CASE("missing required flags exit with a configuration error", "[cli]") {
  CHECK(run_waves("minimize --alpha 0.2").exit_code == 2);
  CHECK(run_waves("standing").exit_code == 2);
  CHECK(run_waves("").exit_code == 2);
  CHECK(run_waves("frobnicate").exit_code == 2);
}

TEST_CASE("minimize runs, reports a summary, and writes a reusable profile", "[cli]") {
  fs::path prof = work_dir() / "minimize.json";
  std::string args = "minimize --p 1 --mu 0.5 --alpha 0.2 --grid-l 40 --grid-n 256 --out " + prof.string();
  RunResult r = run_waves(args);
  CHECK(r.exit_code == 0);
  CHECK(token(r.out, "converged") == "true");
  CHECK(std::stod(token(r.out, "lambda")) < 0.0);
  CHECK(std::stod(token(r.out, "tau")) < 0.0);
  CHECK(std::stod(token(r.out, "el_residual_1")) < 1e-3);

  ProfileDocument doc = read_profile(prof.string());
  CHECK(doc.provenance == "minimize");
  REQUIRE(doc.profile.lambda.has_value());
  CHECK(*doc.profile.lambda == std::stod(token(r.out, "lambda")));

  // identical invocation is byte-identical
  RunResult again = run_waves(args);
  CHECK(again.out == r.out);
}

TEST_CASE("profile documents round-trip losslessly", "[cli]") {
  fs::path a = work_dir() / "rt_a.json";
  fs::path b = work_dir() / "rt_b.json";
  ProfileDocument doc;
  Grid g = centered_grid(20.0, 64);
  doc.profile.grid = g;
  doc.profile.phi = sample_real(g, [](double x) { return std::exp(-x * x) / 3.0; });
  doc.profile.psi = sample_real(g, [](double x) { return -std::exp(-x * x) / 7.0; });
  doc.profile.c = 0.1234567890123456789;
  doc.profile.cstar = 1.0 / 3.0;
  doc.profile.w = 0.1 + 0.2;  // not exactly 0.3 in binary
  doc.profile.lambda = -1.0e-13;
  doc.profile.mu = std::nullopt;
  doc.profile.d = 2.0;
  doc.profile.params.p = -0.5;
  doc.provenance = "shoot";
  write_profile(doc, a.string());
  ProfileDocument back = read_profile(a.string());

  CHECK(back.schema_version == 1);
  CHECK(back.profile.grid == doc.profile.grid);
  for (std::size_t j = 0; j < g.n; ++j) {
    CHECK(back.profile.phi[j] == doc.profile.phi[j]);
    CHECK(back.profile.psi[j] == doc.profile.psi[j]);
  }
  CHECK(back.profile.c == doc.profile.c);
  CHECK(back.profile.cstar == doc.profile.cstar);
  CHECK(back.profile.w == doc.profile.w);
  CHECK(back.profile.lambda == doc.profile.lambda);
  CHECK(!back.profile.mu.has_value());
  CHECK(back.profile.d == doc.profile.d);
  CHECK(back.provenance == "shoot");

  // a second write of the re-read document is byte-identical
  write_profile(back, b.string());
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("format_double is shortest-round-trip", "[cli]") {
  for (double v : {0.1, 1.0 / 3.0, -1.0e-13, 0.1 + 0.2, 123456789.123456789, 0.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("sweep writes a deterministic CSV with the pinned header", "[cli]") {
  fs::path csv1 = work_dir() / "sweep1.csv";
  fs::path csv2 = work_dir() / "sweep2.csv";
  std::string base = "sweep --p 1 --alpha 0.25 --mu-from 0.3 --mu-to 0.8 --mu-points 3 "
                     "--grid-l 40 --grid-n 256 --out ";
  RunResult r1 = run_waves(base + csv1.string(), "WAVES_THREADS=2 ");
  RunResult r2 = run_waves(base + csv2.string(), "WAVES_THREADS=1 ");
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  std::string c1 = slurp(csv1);
  CHECK(c1 == slurp(csv2));
  CHECK(r1.out == r2.out);
  CHECK(c1.rfind("mu,alpha,d,lambda,c,cstar,tau,h1_u,l2_v,iterations,el_residual_1,el_residual_2,converged\n", 0) == 0);
  // 3 data rows after the header
  CHECK(std::count(c1.begin(), c1.end(), '\n') == 4);
  CHECK(r1.out.find("slope_c_vs_mu=") != std::string::npos);
  CHECK(r1.out.find("slope_neglambda_vs_mud=") != std::string::npos);
}

TEST_CASE("sweep rejects a bad mu range", "[cli]") {
  CHECK(run_waves("sweep --p 1 --alpha 0.25 --mu-from 1 --mu-to 0.5 --mu-points 3").exit_code == 2);
}

TEST_CASE("simulate evolves a stored profile and writes the trace", "[cli]") {
  fs::path prof = work_dir() / "sim_standing.json";
  REQUIRE(run_waves("standing --p 0.5 --grid-l 40 --grid-n 512 --out " + prof.string()).exit_code == 0);
  fs::path trace = work_dir() / "sim_trace.csv";
  RunResult r = run_waves("simulate --profile " + prof.string() +
                          " --t-end 0.2 --dt 1e-3 --out-trace " + trace.string());
  CHECK(r.exit_code == 0);
  CHECK(std::stod(token(r.out, "t_end")) == Catch::Approx(0.2));
  CHECK(std::abs(std::stod(token(r.out, "mass_drift"))) < 1e-8);
  std::string csv = slurp(trace);
  CHECK(csv.rfind("t,mass,v_total,shape_error,lag_estimate\n", 0) == 0);

  RunResult bad_order = run_waves("simulate --profile " + prof.string() + " --order 3");
  CHECK(bad_order.exit_code == 2);
}

TEST_CASE("linstab integrates the linearized system and writes the trace", "[cli]") {
  fs::path prof = work_dir() / "ls_standing.json";
  REQUIRE(run_waves("standing --p 0.5 --grid-l 40 --grid-n 512 --out " + prof.string()).exit_code == 0);
  fs::path trace = work_dir() / "ls_trace.csv";
  RunResult r = run_waves("linstab --profile " + prof.string() +
                          " --t-end 0.05 --dt 1e-3 --delta 1e-2 --seed 5 --record-every 10 --out-trace " +
                          trace.string());
  CHECK(r.exit_code == 0);
  CHECK(std::stod(token(r.out, "growth_factor")) >= 1.0);
  std::string csv = slurp(trace);
  CHECK(csv.rfind("t,lin_energy\n", 0) == 0);
}

TEST_CASE("linstab rejects moving profiles with negative exponents", "[cli]") {
  fs::path prof = work_dir() / "neg_standing.json";
  REQUIRE(run_waves("standing --p -0.5 --grid-l 40 --grid-n 1024 --out " + prof.string()).exit_code == 0);
  ProfileDocument doc = read_profile(prof.string());
  doc.profile.c = 0.5;  // inconsistent moving profile
  fs::path moving = work_dir() / "neg_moving.json";
  write_profile(doc, moving.string());
  RunResult r = run_waves("linstab --profile " + moving.string() + " --t-end 0.05");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("c=0") != std::string::npos);
}
