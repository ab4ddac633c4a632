#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + MPSQVM_CLI + std::string(" ") + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string data(const char* name) { return std::string(MPSQVM_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("mpsqvm_cli_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(CliRun, BellCountsIdenticalAcrossBackends) {
  const auto mps = cli("run " + data("bell.qk") + " --backend mps --shots 1000 --seed 7");
  const auto dense = cli("run " + data("bell.qk") + " --backend dense --shots 1000 --seed 7");
  ASSERT_EQ(mps.status, 0);
  ASSERT_EQ(dense.status, 0);
  const auto a = nlohmann::json::parse(mps.out);
  const auto b = nlohmann::json::parse(dense.out);
  EXPECT_EQ(a["counts"], b["counts"]);
  EXPECT_EQ(a["counts"]["00"].get<int>() + a["counts"]["11"].get<int>(), 1000);
  EXPECT_EQ(a["max_bond_seen"], 2);
}

TEST(CliRun, H2Term0) {
  const auto r = cli("run " + data("h2_ansatz.qk") + " --kernel term0 --args 0.5");
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_LE(doc["max_bond_seen"].get<int>(), 2);
  EXPECT_EQ(doc["instructions"], 9);
  EXPECT_EQ(doc["shots"], 1024);
}

TEST(CliRun, StdinAndOutFile) {
  const auto out = std::filesystem::temp_directory_path() / "mpsqvm_cli_out.json";
  const auto r = cli("run - --out " + out.string() + " < " + data("bell.qk"));
  ASSERT_EQ(r.status, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(nlohmann::json::parse(buf.str())["kernel"], "bell");
}

TEST(CliRun, EnvironmentDefaultsAndOverrides) {
  const auto file = temp_file("chain.qk",
                              "__qpu__ k(AcceleratorBuffer b) {\n  H 0\n  CNOT 0 1\n  H 1\n  CNOT 1 2\n"
                              "  H 2\n  CNOT 0 2\n  MEASURE 0 [0]\n}\n");
  const auto capped = nlohmann::json::parse(cli("run " + file, "MPSQVM_MAX_BOND=1").out);
  EXPECT_EQ(capped["max_bond_seen"], 1);
  EXPECT_GT(capped["trunc_error_sq"].get<double>(), 0.0);
  const auto flag = nlohmann::json::parse(cli("run " + file + " --max-bond 4", "MPSQVM_MAX_BOND=1").out);
  EXPECT_GT(flag["max_bond_seen"].get<int>(), 1);
  EXPECT_EQ(cli("run " + file, "MPSQVM_MAX_BOND=zero").status, 1);
  EXPECT_EQ(cli("run " + file + " --qubits 30 --backend dense", "MPSQVM_ORACLE_QUBIT_CAP=20").status, 2);
}

TEST(CliVqe, HundredRows) {
  const auto r = cli("vqe --ansatz " + data("h2_ansatz.qk") + " --ham " + data("h2_2q.ham"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(line_count(r.out), 101u);
  EXPECT_EQ(r.out.substr(0, 13), "theta,energy\n");
  const auto g = cli("vqe --ansatz " + data("h2_ansatz.qk") + " --ham " + data("h2_2q.ham") + " --grid -1:1:5");
  EXPECT_EQ(line_count(g.out), 6u);
  EXPECT_NE(g.out.find("\n-1,"), std::string::npos);
}

TEST(CliBench, SmallGrid) {
  const auto r = cli("bench --qubits 5:10:5 --rounds 2:2:2 --seeds 2");
  ASSERT_EQ(r.status, 0);
  std::istringstream in(r.out);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "n,rounds,mean_bytes,std_bytes,mean_chi,max_chi,skipped,seeds");
  EXPECT_EQ(row1.rfind("5,2,", 0), 0u);
  EXPECT_NE(row1.find(",4,false,1:2"), std::string::npos) << row1;
  EXPECT_NE(row2.find(",4,false,1:2"), std::string::npos) << row2;
}

TEST(CliBench, PlotData) {
  const auto plot = std::filesystem::temp_directory_path() / "mpsqvm_cli_plot.dat";
  ASSERT_EQ(cli("bench --qubits 6 --rounds 1:2 --seeds 1 --plot-data " + plot.string()).status, 0);
  std::ifstream in(plot);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "# rounds n mean_bytes std_bytes");
}

TEST(CliErrors, ExitCodes) {
  EXPECT_EQ(cli("").status, 1);
  EXPECT_EQ(cli("frobnicate").status, 1);
  EXPECT_EQ(cli("vqe --ansatz " + data("h2_ansatz.qk")).status, 1);
  EXPECT_EQ(cli("run " + temp_file("bad.qk", "__qpu__ k(AcceleratorBuffer b) {\n  FOO 0\n}\n")).status, 1);
  EXPECT_EQ(cli("run /nonexistent.qk").status, 1);
  EXPECT_EQ(cli("run " + data("h2_ansatz.qk") + " --kernel term0").status, 1);
  EXPECT_EQ(cli("run " + data("bell.qk") + " --backend gpu").status, 1);
  EXPECT_EQ(cli("bench --qubits 5:1").status, 1);
  EXPECT_EQ(cli("vqe --ansatz " + data("h2_ansatz.qk") + " --ham " + temp_file("bad.ham", "1.0 ZZ\n0.5 Z\n")).status, 1);
  const auto mid = temp_file("mid.qk", "__qpu__ k(AcceleratorBuffer b) {\n  MEASURE 0 [0]\n  H 0\n}\n");
  EXPECT_EQ(cli("run " + mid).status, 2);
  EXPECT_EQ(cli("run " + data("bell.qk") + " --qubits 1").status, 2);
  EXPECT_EQ(cli("--help").status, 0);
}

TEST(CliDeterminism, RepeatedInvocationsAreByteIdentical) {
  for (const std::string args : {"run " + data("bell.qk") + " --shots 500 --seed 3",
                                 "vqe --ansatz " + data("h2_ansatz.qk") + " --ham " + data("h2_2q.ham") +
                                     " --shots 200 --grid -1:1:4",
                                 std::string("bench --qubits 6 --rounds 2:4:2 --seeds 2")}) {
    const auto a = cli(args), b = cli(args);
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out) << args;
  }
}
