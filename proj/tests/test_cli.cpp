#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

RunResult run(const std::string& args) {
  const std::string out = temp_path("ipw_cli_stdout.txt");
  const std::string err = temp_path("ipw_cli_stderr.txt");
  const std::string cmd = std::string(FISCAL_IPW_BIN) + " " + args + " >" +
                          out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  std::remove(out.c_str());
  std::remove(err.c_str());
  return r;
}

}  // namespace

TEST_CASE("estimate renders the fixture table in every format") {
  const std::string data = std::string("--data ") + FIXTURE_CSV;

  const RunResult text = run("estimate " + data);
  CHECK(text.exit_code == 0);
  CHECK(text.out.find("WLS (A2)") != std::string::npos);
  CHECK(text.out.find("OLS (A2)") != std::string::npos);
  CHECK(text.out.find("WLS (A1)") != std::string::npos);
  CHECK(text.out.find("Number of observations") != std::string::npos);
  // overlap diagnostics go to stderr by default
  CHECK(text.err.find("Overlap diagnostics") != std::string::npos);

  const RunResult quiet = run("estimate " + data + " --quiet");
  CHECK(quiet.exit_code == 0);
  CHECK(quiet.err.empty());

  const RunResult csv = run("estimate " + data + " --format csv --quiet");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.rfind("row,WLS (A2),OLS (A2),WLS (A1)\n", 0) == 0);

  const RunResult json = run("estimate " + data + " --format json --quiet");
  CHECK(json.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(json.out);
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 3);
  CHECK(doc[0]["variant"] == "WLS (A2)");
  CHECK(doc[0]["n"] == 109);
  REQUIRE(doc[0]["betas"].size() == 4);

  const RunResult one =
      run("estimate " + data + " --variant wls-a1 --param cell --quiet");
  CHECK(one.exit_code == 0);
  CHECK(one.out.find("WLS (A1)") != std::string::npos);
  CHECK(one.out.find("OLS (A2)") == std::string::npos);
  CHECK(one.out.find("(Intercept)") == std::string::npos);
}

TEST_CASE("estimate outputs are byte-identical across runs") {
  const std::string args = std::string("estimate --data ") + FIXTURE_CSV +
                           " --format json --quiet";
  const RunResult a = run(args);
  const RunResult b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);

  // --out writes the same bytes to a file
  const std::string path = temp_path("ipw_cli_table.json");
  const RunResult c = run(args + " --out " + path);
  CHECK(c.exit_code == 0);
  CHECK(slurp(path) == a.out);
  std::remove(path.c_str());
}

TEST_CASE("cli errors carry stable codes and exit statuses") {
  const RunResult missing = run("estimate --data /no/such/file.csv --quiet");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("E_DATA_NOT_FOUND") != std::string::npos);

  const RunResult bad_variant = run(std::string("estimate --data ") +
                                    FIXTURE_CSV + " --variant gmm --quiet");
  CHECK(bad_variant.exit_code == 1);
  CHECK(bad_variant.err.find("E_BAD_SPEC") != std::string::npos);

  const RunResult bad_emin = run(std::string("estimate --data ") +
                                 FIXTURE_CSV + " --e-min 0.5 --quiet");
  CHECK(bad_emin.exit_code == 1);
  CHECK(bad_emin.err.find("E_BAD_SPEC") != std::string::npos);

  const RunResult bad_col = run(std::string("estimate --data ") +
                                FIXTURE_CSV + " --y-col nope --quiet");
  CHECK(bad_col.exit_code == 1);
  CHECK(bad_col.err.find("E_BAD_DATA") != std::string::npos);

  const RunResult few_reps = run("simulate --reps 10 --n 300");
  CHECK(few_reps.exit_code == 1);
  CHECK(few_reps.err.find("E_BAD_SPEC") != std::string::npos);
}

TEST_CASE("simulate produces a deterministic report") {
  const std::string args = "simulate --n 300 --reps 50 --seed 4";
  const RunResult a = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out.rfind("class,truth,", 0) == 0);
  const RunResult b = run(args);
  CHECK(a.out == b.out);

  const RunResult json = run(args + " --format json");
  CHECK(json.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(json.out);
  CHECK(doc["replications"] == 50);
  REQUIRE(doc["mean_bias_a2"].size() == 4);

  // a different seed changes the draws
  const RunResult other = run("simulate --n 300 --reps 50 --seed 5");
  CHECK(other.out != a.out);
}

TEST_CASE("config files replicate command-line flags") {
  const std::string cfg = temp_path("ipw_cli_config.toml");
  {
    std::ofstream out(cfg);
    out << "[estimate]\n"
        << "data = \"" << FIXTURE_CSV << "\"\n"
        << "format = \"json\"\n"
        << "variant = \"wls-a2\"\n"
        << "quiet = true\n";
  }
  const RunResult from_cfg = run("--config " + cfg + " estimate");
  CHECK(from_cfg.exit_code == 0);
  const RunResult from_flags = run(std::string("estimate --data ") +
                                   FIXTURE_CSV +
                                   " --format json --variant wls-a2 --quiet");
  CHECK(from_cfg.out == from_flags.out);
  std::remove(cfg.c_str());
}

TEST_CASE("inspect-data summarizes the fixture") {
  const RunResult r = run(std::string("inspect-data --data ") + FIXTURE_CSV);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("rows: 112") != std::string::npos);
  CHECK(r.out.find("1992Q1 .. 2019Q4") != std::string::npos);
  CHECK(r.out.find("column rgdp:") != std::string::npos);
  CHECK(r.out.find("validation: ok") != std::string::npos);
}
