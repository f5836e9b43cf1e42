#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using Json = nlohmann::ordered_json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  std::string so = "cli_stdout_" + std::to_string(counter) + ".tmp";
  std::string se = "cli_stderr_" + std::to_string(counter) + ".tmp";
  ++counter;
  std::string cmd = std::string(ADDSPEC_CLI_PATH) + " " + args + " >" + so + " 2>" + se;
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  std::remove(so.c_str());
  std::remove(se.c_str());
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string scaled_squares(std::uint64_t kmax, std::uint64_t scale, bool with_zero) {
  std::ostringstream s;
  if (with_zero) s << "0 ";
  for (std::uint64_t k = 1; k <= kmax; ++k) s << scale * k * k << ' ';
  return s.str();
}

}  // namespace

TEST_CASE("stability verdicts and exit codes") {
  RunResult stable = run("stability --f power:1:2 --grid-max 1e4");
  CHECK(stable.code == 0);
  Json j = Json::parse(stable.out);
  CHECK(j["stable"] == true);

  RunResult unstable = run("stability --f exp:2 --grid-max 1e4");
  CHECK(unstable.code == 0);  // an unstable function is a result, not an error
  CHECK(Json::parse(unstable.out)["stable"] == false);

  CHECK(run("stability").code == 1);           // missing --f
  CHECK(run("stability --f wat:7").code == 1); // unparsable growth
}

TEST_CASE("usage errors and help") {
  CHECK(run("--help").code == 0);
  CHECK(run("stability --help").code == 0);
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  RunResult bad = run("stability --f power:1:2 --no-such-flag");
  CHECK(bad.code == 1);
  CHECK(!bad.err.empty());
}

TEST_CASE("rearrange sorts or applies a named permutation") {
  write_file("cli_seq.tmp", "9 1 16 0 4\n");
  RunResult sorted = run("rearrange --A cli_seq.tmp --sort");
  CHECK(sorted.code == 0);
  Json j = Json::parse(sorted.out);
  CHECK(j["values"] == Json::parse(R"(["0","1","4","9","16"])"));
  CHECK(j["sigma"]["kind"] == "explicit");

  write_file("cli_seq4.tmp", "10 20 30 40\n");
  RunResult swapped =
      run("rearrange --A cli_seq4.tmp --sigma '{\"kind\":\"swaps\",\"pairs\":[[1,4]]}'");
  CHECK(swapped.code == 0);
  CHECK(Json::parse(swapped.out)["values"][0] == "40");

  CHECK(run("rearrange --A cli_seq.tmp").code == 1);  // need --sort xor --sigma
  CHECK(run("rearrange --A cli_seq.tmp --sort --sigma '{\"kind\":\"powerswap\"}'").code ==
        1);
  std::remove("cli_seq.tmp");
  std::remove("cli_seq4.tmp");
}

TEST_CASE("rearrange attaches a verdict when a growth function is given") {
  write_file("cli_sq.tmp", scaled_squares(70, 1, false));
  RunResult r = run("rearrange --A cli_sq.tmp --sigma '{\"kind\":\"powerswap\"}' "
                    "--g power:1:2 --epsilon 0.5");
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j.contains("verdict"));
  CHECK(j["verdict"]["epsilon"] == doctest::Approx(0.5));
  std::remove("cli_sq.tmp");
}

TEST_CASE("supersequence pipeline from files") {
  write_file("cli_a2.tmp", scaled_squares(800, 2, false));
  RunResult r = run("supersequence --f power:2:2 --g power:1:2 --A cli_a2.tmp --N 1000");
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["B"].size() == 1000);
  CHECK(j["verdict"]["holds"] == true);
  CHECK(j["embedding"].size() >= 700);

  write_file("cli_pow2.tmp", "2 4 8 16 32 64 128 256 512 1024 2048 4096");
  RunResult pre = run("supersequence --f exp:2 --g exp:2 --A cli_pow2.tmp --N 12");
  CHECK(pre.code == 2);  // unstable growth is a precondition failure
  CHECK(!pre.err.empty());
  CHECK(Json::parse(pre.err).contains("error"));

  RunResult forced = run("supersequence --f exp:2 --g exp:2 --A cli_pow2.tmp --N 12 "
                         "--skip-hypothesis-checks");
  CHECK(forced.code == 0);  // identity schedule: B is just A again
  CHECK(Json::parse(forced.out)["filler_count"] == 0);
  std::remove("cli_a2.tmp");
  std::remove("cli_pow2.tmp");
}

TEST_CASE("sumset writes reports and bitmaps") {
  write_file("cli_01.tmp", "0 1\n");
  RunResult r = run("sumset --A cli_01.tmp --h 3 --X 5 --bitmap cli_bits.tmp");
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["popcount"] == 4);
  CHECK(j["bitmap_path"] == "cli_bits.tmp");
  std::string bytes = slurp("cli_bits.tmp");
  REQUIRE(bytes.size() == 1);
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x0F);
  std::remove("cli_bits.tmp");
  std::remove("cli_01.tmp");
}

TEST_CASE("verify-basis reports coverage") {
  write_file("cli_sq.tmp", scaled_squares(45, 1, true));
  RunResult four = run("verify-basis --A cli_sq.tmp --h 4 --X 2000");
  CHECK(four.code == 0);
  Json j = Json::parse(four.out);
  CHECK(j["is_window_basis"] == true);
  CHECK(j["missing_total"] == 0);

  RunResult two = run("verify-basis --A cli_sq.tmp --h 2 --X 2000");
  CHECK(two.code == 0);
  CHECK(Json::parse(two.out)["is_window_basis"] == false);
  std::remove("cli_sq.tmp");
}

TEST_CASE("impossible picks the right certificate per relation") {
  RunResult perfect = run("impossible --u 8 --v 2");
  CHECK(perfect.code == 0);
  Json p = Json::parse(perfect.out);
  CHECK(p["relation"]["kind"] == "perfect_power");
  CHECK(p["embedding"]["base"] == 2);
  CHECK(p["embedding"]["stride"] == 3);

  RunResult rational = run("impossible --u 8 --v 4");
  CHECK(rational.code == 0);
  Json q = Json::parse(rational.out);
  CHECK(q["relation"]["kind"] == "rational_log");
  CHECK(q["witness"]["ell"] == 1);
  CHECK(q["witness"]["distance_den"] == 2);

  RunResult scan = run("--trace cli_trace.tmp impossible --u 6 --v 2 --K 20");
  CHECK(scan.code == 0);
  Json s = Json::parse(scan.out);
  CHECK(s["relation"]["kind"] == "irrational");
  CHECK(s["scan"]["K"] == 20);
  std::string trace = slurp("cli_trace.tmp");
  CHECK(trace.rfind("k,floor_n,zone\n", 0) == 0);
  int lines = 0;
  for (char c : trace)
    if (c == '\n') ++lines;
  CHECK(lines == 21);
  std::remove("cli_trace.tmp");

  CHECK(run("impossible --u 4 --v 4").code == 2);
}

TEST_CASE("adversarial reports are deterministic") {
  RunResult a = run("adversarial --g exp:2 --K 10");
  RunResult b = run("adversarial --g exp:2 --K 10");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  Json j = Json::parse(a.out);
  CHECK(j["witness"].get<double>() ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-9));

  RunResult listed = run("adversarial --g exp:3 --m 1 --m 2 --m 3");
  CHECK(listed.code == 0);
  CHECK(Json::parse(listed.out)["A"] == Json::parse(R"(["5","15","46"])"));
}

TEST_CASE("dilute and spectrum run end to end") {
  RunResult d = run("dilute --alpha 2.0 --beta 1.0 --h 2 --N 2000 --X 20000 "
                    "--seed-count 1500");
  CHECK(d.code == 0);
  Json dj = Json::parse(d.out);
  CHECK(dj["containment_ok"] == true);
  CHECK(dj["embedding_ratio_mean"].get<double>() == doctest::Approx(1.3954).epsilon(0.005));

  RunResult s = run("spectrum --h 2 --alphas 0.4 --betas-per-alpha 2 --N 10000 "
                    "--X 200000");
  CHECK(s.code == 0);
  Json sj = Json::parse(s.out);
  CHECK(sj["downward_closed"] == true);
  CHECK(sj["samples"].size() == 2);
}

TEST_CASE("schemas are printed on request") {
  RunResult r = run("sumset --json-schema");
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["type"] == "object");
  CHECK(j["properties"].contains("popcount"));
  CHECK(run("--json-schema").code == 1);  // no subcommand to describe
}

TEST_CASE("reports can be redirected to a file") {
  RunResult r = run("--output cli_report.tmp stability --f power:1:2 --grid-max 1e4");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  Json j = Json::parse(slurp("cli_report.tmp"));
  CHECK(j["stable"] == true);
  std::remove("cli_report.tmp");
}

TEST_CASE("options can come from a config file") {
  write_file("cli_cfg.tmp", "[stability]\nf=exp:2\ngrid-max=1e4\n");
  RunResult r = run("--config cli_cfg.tmp stability");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["stable"] == false);
  std::remove("cli_cfg.tmp");
}
