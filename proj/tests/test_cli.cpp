#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "omega_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const auto dir = scratch_dir();
  const auto out_path = dir / ("out_" + std::to_string(counter));
  const auto err_path = dir / ("err_" + std::to_string(counter));
  ++counter;
  const std::string command = std::string(OMEGA_CLI_PATH) + " " + args + " > " +
                              out_path.string() + " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::string example(const std::string& name) {
  return std::string(EXAMPLES_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("cli: omega-exact prints the appendix value exactly") {
  auto result = run_cli("omega-exact --machine " + example("chaitin-appendix.json"));
  CHECK(result.exit_code == 0);
  CHECK(result.out == "3/2^5 = 0.000110\n");
}

TEST_CASE("cli: omega-exact flags the complete-code boundary") {
  auto result = run_cli("omega-exact --machine " + example("boundary-two.json"));
  CHECK(result.exit_code == 0);
  CHECK(result.out == "1/2^0 = 1.0\n");
  CHECK(result.err.find("kraft sum is 1") != std::string::npos);
}

TEST_CASE("cli: omega-exact refuses the universal machine") {
  auto result = run_cli("omega-exact --machine " + example("universal-bitbf.json"));
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("uncomputable") != std::string::npos);
}

TEST_CASE("cli: validate reports kraft and rejects prefix violations") {
  auto good = run_cli("validate --machine " + example("chaitin-appendix.json"));
  CHECK(good.exit_code == 0);
  CHECK(good.out.find("kraft 3/2^5") != std::string::npos);

  auto boundary = run_cli("validate --machine " + example("boundary-two.json"));
  CHECK(boundary.exit_code == 0);
  CHECK(boundary.out.find("kraft sum is 1") != std::string::npos);

  const auto bad_path = scratch_dir() / "bad_table.json";
  {
    std::ofstream out(bad_path);
    out << R"({"format":1,"type":"table","programs":[{"bits":"0"},{"bits":"01"}]})";
  }
  auto bad = run_cli("validate --machine " + bad_path.string());
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("(0, 01)") != std::string::npos);
}

TEST_CASE("cli: kraft") {
  auto result = run_cli("kraft --machine " + example("chaitin-appendix.json"));
  CHECK(result.exit_code == 0);
  CHECK(result.out == "3/2^5 = 0.000110\n");
}

TEST_CASE("cli: run executes programs and reports invalid ones as values") {
  auto halted = run_cli("run --machine " + example("universal-bitbf.json") +
                        " --program 1000");
  CHECK(halted.exit_code == 0);
  CHECK(halted.out.find("halted") != std::string::npos);
  CHECK(halted.out.find("steps=1") != std::string::npos);
  CHECK(halted.out.find("bits_consumed=4") != std::string::npos);

  auto invalid = run_cli("run --machine " + example("universal-bitbf.json") +
                         " --program 10001");
  CHECK(invalid.exit_code == 0);
  CHECK(invalid.out.find("invalid") != std::string::npos);
  CHECK(invalid.out.find("trailing bits") != std::string::npos);

  auto structured = run_cli("run --machine " + example("universal-bitbf.json") +
                            " --program 1000 --format structured");
  CHECK(structured.exit_code == 0);
  auto doc = nlohmann::json::parse(structured.out);
  CHECK(doc["outcome"] == "halted");
  CHECK(doc["bits_consumed"] == 4);
}

TEST_CASE("cli: omega-stages streams reports and repeats byte-identically") {
  const std::string args =
      "omega-stages --machine " + example("chaitin-appendix.json") + " --stages 6";
  auto first = run_cli(args);
  auto second = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);

  std::istringstream lines(first.out);
  std::string line;
  int count = 0;
  std::string last;
  while (std::getline(lines, line)) {
    ++count;
    last = line;
  }
  CHECK(count == 6);
  CHECK(last.find("omega_lower=3/2^5") != std::string::npos);
}

TEST_CASE("cli: omega-stages structured output is one JSON record per stage") {
  auto result = run_cli("omega-stages --machine " + example("universal-bitbf.json") +
                        " --stages 10 --format structured");
  CHECK(result.exit_code == 0);
  std::istringstream lines(result.out);
  std::string line;
  int count = 0;
  nlohmann::json last;
  while (std::getline(lines, line)) {
    ++count;
    last = nlohmann::json::parse(line);
  }
  CHECK(count == 10);
  CHECK(last["stage"] == 10);
  CHECK(last["omega_lower"] == "229/2^9");
  CHECK(last["cumulative_halted"] == 43);
}

TEST_CASE("cli: omega-stages checkpoint resume reproduces the stream") {
  const auto checkpoint = scratch_dir() / "resume_cp.json";
  std::filesystem::remove(checkpoint);

  const std::string base =
      "omega-stages --machine " + example("universal-bitbf.json");
  auto full = run_cli(base + " --stages 10");
  auto head = run_cli(base + " --stages 4 --checkpoint " + checkpoint.string());
  auto tail = run_cli(base + " --stages 10 --checkpoint " + checkpoint.string());
  CHECK(full.exit_code == 0);
  CHECK(head.exit_code == 0);
  CHECK(tail.exit_code == 0);
  CHECK(head.out + tail.out == full.out);
  std::filesystem::remove(checkpoint);
}

TEST_CASE("cli: oracle verdicts from a correct prefix") {
  auto result = run_cli("oracle --machine " + example("chaitin-appendix.json") +
                        " --bits 000110");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("threshold crossed at stage 6") != std::string::npos);
  CHECK(result.out.find("0001 halts") != std::string::npos);
  CHECK(result.out.find("halts=3") != std::string::npos);
}

TEST_CASE("cli: oracle rejects provably wrong bits with exit 2") {
  auto result = run_cli("oracle --machine " + example("chaitin-appendix.json") +
                        " --bits 000011");
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("cannot be the first") != std::string::npos);
}

TEST_CASE("cli: complexity") {
  auto result = run_cli("complexity --machine " + example("chaitin-appendix.json") +
                        " --target 1 --max-size 8");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("<= 4 bits (exact)") != std::string::npos);
  CHECK(result.out.find("witness 0001") != std::string::npos);
}

TEST_CASE("cli: berry without a decider") {
  auto result = run_cli("berry --machine " + example("berry-fixture.json") +
                        " --n 1 --multiplier 6");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("first integer not produced: 4") != std::string::npos);
}

TEST_CASE("cli: berry with a subprocess decider") {
  auto result = run_cli("berry --machine " + example("berry-fixture.json") +
                        " --n 1 --multiplier 6 --decider "
                        "'while read line; do echo NO; done'");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("first integer not produced: 1") != std::string::npos);
  CHECK(result.out.find("contradictions: 3") != std::string::npos);
}

TEST_CASE("cli: berry with a verdict file decider") {
  const auto verdicts = scratch_dir() / "verdicts.txt";
  {
    std::ofstream out(verdicts);
    out << "0001 YES\n000001 YES\n000011 YES\n";
  }
  auto result = run_cli("berry --machine " + example("berry-fixture.json") +
                        " --n 1 --multiplier 6 --decider " + verdicts.string());
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("first integer not produced: 4") != std::string::npos);
  CHECK(result.out.find("contradictions: 0") != std::string::npos);
}

TEST_CASE("cli: operational and usage failures exit 1") {
  auto missing = run_cli("omega-exact --machine /nonexistent/machine.json");
  CHECK(missing.exit_code == 1);

  auto unknown_flag = run_cli("omega-exact --machine " +
                              example("chaitin-appendix.json") + " --bogus");
  CHECK(unknown_flag.exit_code == 1);

  auto no_command = run_cli("");
  CHECK(no_command.exit_code == 1);
}
