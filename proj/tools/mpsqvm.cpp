// mpsqvm: run kernels, sweep VQE energies and benchmark MPS memory growth.
//
// Exit status: 0 on success, 1 for usage, parse or data errors, 2 when a
// program fails during simulation.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mpsqvm/mpsqvm.hpp"

namespace {

using json = nlohmann::json;

constexpr int exit_usage = 1;
constexpr int exit_execution = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_source(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    buf << in.rdbuf();
  }
  return buf.str();
}

/// Writes to `path`, or stdout when it is empty or "-".
void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) throw UsageError("invalid " + what + " '" + text + "'");
  return v;
}

std::vector<double> parse_args_list(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma == std::string::npos ? comma : comma - start), "argument"));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

/// Truncation flags shared by every subcommand. Environment variables supply
/// defaults that explicit flags override.
struct TruncationFlags {
  std::optional<double> cutoff;
  std::optional<std::size_t> max_bond;
  std::string mode = "relative";

  void add_to(CLI::App& app, const std::string& cutoff_help) {
    app.add_option("--cutoff", cutoff, cutoff_help)->check(CLI::NonNegativeNumber);
    app.add_option("--max-bond", max_bond, "Hard cap on bond dimension")->check(CLI::PositiveNumber);
    app.add_option("--cutoff-mode", mode, "relative: threshold is cutoff * largest singular value")
        ->check(CLI::IsMember({"relative", "absolute"}));
  }

  mpsqvm::TruncationPolicy resolve(double default_cutoff) const {
    mpsqvm::TruncationPolicy p;
    p.cutoff = default_cutoff;
    if (const char* env = std::getenv("MPSQVM_CUTOFF")) p.cutoff = parse_double(env, "MPSQVM_CUTOFF");
    if (const char* env = std::getenv("MPSQVM_MAX_BOND")) {
      std::size_t v = 0;
      const std::string s(env);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
        throw UsageError("invalid MPSQVM_MAX_BOND '" + s + "'");
      }
      p.max_bond = v;
    }
    if (cutoff) p.cutoff = *cutoff;
    if (max_bond) p.max_bond = *max_bond;
    if (p.cutoff < 0.0) throw UsageError("cutoff must be non-negative");
    p.mode = mode == "absolute" ? mpsqvm::CutoffMode::Absolute : mpsqvm::CutoffMode::Relative;
    return p;
  }
};

const mpsqvm::CompositeInstruction& select_kernel(const mpsqvm::SourceUnit& unit, const std::string& name) {
  if (unit.kernels.empty()) throw UsageError("source defines no kernels");
  if (name.empty()) return unit.kernels.back();
  return unit.kernel(name);
}

// ---------------------------------------------------------------- run

struct RunOptions {
  std::string source;
  std::string kernel;
  std::string args;
  std::string backend = "mps";
  TruncationFlags truncation;
  std::size_t shots = 1024;
  std::uint64_t seed = 1;
  std::optional<std::size_t> qubits;
  std::string out;
  bool timing = false;
};

void add_run(CLI::App& app, RunOptions& o) {
  auto* cmd = app.add_subcommand("run", "Execute a kernel and print measurement counts as JSON");
  cmd->add_option("source", o.source, "Kernel source file, or - for stdin")->required();
  cmd->add_option("--kernel", o.kernel, "Kernel to execute (default: last defined)");
  cmd->add_option("--args", o.args, "Comma-separated values for the kernel parameters");
  cmd->add_option("--backend", o.backend, "mps or dense")->check(CLI::IsMember({"mps", "dense"}));
  o.truncation.add_to(*cmd, "Singular value cutoff (default 1e-4)");
  cmd->add_option("--shots", o.shots, "Number of samples");
  cmd->add_option("--seed", o.seed, "Sampling seed");
  cmd->add_option("--qubits", o.qubits, "Buffer size (default: highest qubit used + 1)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Write JSON here instead of stdout");
  cmd->add_flag("--timing", o.timing, "Include wall time in the output");
}

int do_run(const RunOptions& o) {
  const auto unit = mpsqvm::parse(read_source(o.source));
  const auto& kernel = select_kernel(unit, o.kernel);
  const auto program = mpsqvm::flatten(mpsqvm::bind_parameters(kernel, parse_args_list(o.args)));

  mpsqvm::BackendOptions bopt;
  bopt.truncation = o.truncation.resolve(mpsqvm::default_cutoff);
  auto backend = mpsqvm::make_backend(o.backend, bopt);
  mpsqvm::QubitBuffer buffer;
  buffer.name = "q";
  buffer.size = o.qubits.value_or(std::max<std::size_t>(1, mpsqvm::required_qubits(program)));
  const auto record = mpsqvm::execute(*backend, program, buffer, o.shots, o.seed);

  json doc;
  doc["backend"] = o.backend;
  doc["kernel"] = kernel.name;
  doc["counts"] = json::object();
  for (const auto& [bits, count] : record.counts) doc["counts"][bits] = count;
  doc["instructions"] = program.size();
  doc["max_bond_seen"] = record.max_bond_seen;
  doc["memory_estimate_bytes"] = record.memory_estimate_bytes;
  doc["num_qubits"] = buffer.size;
  doc["seed"] = o.seed;
  doc["shots"] = o.shots;
  doc["trunc_error_sq"] = record.trunc_error_sq;
  if (o.timing) doc["wall_time_s"] = record.wall_time.count();
  write_output(o.out, doc.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- vqe

struct VqeOptions {
  std::string ansatz;
  std::string kernel;
  std::string ham;
  std::string backend = "mps";
  std::string grid = "-3.141592653589793:3.141592653589793:100";
  TruncationFlags truncation;
  std::size_t shots = 0;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string out;
};

void add_vqe(CLI::App& app, VqeOptions& o) {
  auto* cmd = app.add_subcommand("vqe", "Sweep a one-parameter ansatz and print theta,energy as CSV");
  cmd->add_option("--ansatz", o.ansatz, "Kernel source file")->required();
  cmd->add_option("--kernel", o.kernel, "Ansatz kernel (default: first kernel with one parameter)");
  cmd->add_option("--ham", o.ham, "Pauli Hamiltonian: one '<coefficient> <pauli-string>' per line")->required();
  cmd->add_option("--backend", o.backend, "mps or dense")->check(CLI::IsMember({"mps", "dense"}));
  cmd->add_option("--grid", o.grid, "start:stop:count, both ends included");
  o.truncation.add_to(*cmd, "Singular value cutoff (default 1e-4)");
  cmd->add_option("--shots", o.shots, "Estimate each term from this many shots (0: exact)");
  cmd->add_option("--seed", o.seed, "Sampling seed; term k uses seed + k");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Write CSV here instead of stdout");
}

const mpsqvm::CompositeInstruction& select_ansatz(const mpsqvm::SourceUnit& unit, const std::string& name) {
  if (!name.empty()) return unit.kernel(name);
  for (const auto& k : unit.kernels) {
    if (k.formal_params.size() == 1) return k;
  }
  throw UsageError("no kernel with exactly one parameter; choose one with --kernel");
}

int do_vqe(const VqeOptions& o) {
  const auto unit = mpsqvm::parse(read_source(o.ansatz));
  const auto& ansatz = select_ansatz(unit, o.kernel);
  const auto h = mpsqvm::load_hamiltonian(o.ham);
  mpsqvm::Grid grid;
  try {
    grid = mpsqvm::parse_grid(o.grid);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  mpsqvm::BackendOptions bopt;
  bopt.truncation = o.truncation.resolve(mpsqvm::default_cutoff);
  const std::string id = o.backend;
  const auto result = mpsqvm::sweep(ansatz, h, grid, [&] { return mpsqvm::make_backend(id, bopt); },
                                    {o.shots, o.seed, o.jobs});

  std::string csv = "theta,energy\n";
  for (std::size_t i = 0; i < result.thetas.size(); ++i) {
    csv += format_double(result.thetas[i]) + "," + format_double(result.energies[i]) + "\n";
  }
  write_output(o.out, csv);
  std::cerr << "minimum energy " << format_double(result.min_energy) << " at theta "
            << format_double(result.argmin_theta) << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string qubits = "5:85:5";
  std::string rounds = "2:10:2";
  std::size_t seeds = 10;
  std::uint64_t seed_base = 1;
  TruncationFlags truncation;
  std::size_t chi_cap = 4096;
  double time_budget = 60.0;
  std::size_t jobs = 1;
  std::string plot_data;
  std::string out;
};

void add_bench(CLI::App& app, BenchOptions& o) {
  auto* cmd = app.add_subcommand("bench", "Peak MPS memory of random circuits over a qubits x rounds grid");
  cmd->add_option("--qubits", o.qubits, "Qubit counts as start:stop:step");
  cmd->add_option("--rounds", o.rounds, "Round counts as start:stop:step");
  cmd->add_option("--seeds", o.seeds, "Circuits per cell")->check(CLI::PositiveNumber);
  cmd->add_option("--seed-base", o.seed_base, "Seed of the first circuit in every cell");
  o.truncation.add_to(*cmd, "Singular value cutoff (default 0: exact)");
  cmd->add_option("--chi-cap", o.chi_cap, "Skip a cell once any bond exceeds this")->check(CLI::PositiveNumber);
  cmd->add_option("--time-budget", o.time_budget, "Seconds per circuit before its cell is skipped")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--plot-data", o.plot_data, "Also write gnuplot splot data to this file");
  cmd->add_option("--out", o.out, "Write CSV here instead of stdout");
}

int do_bench(const BenchOptions& o) {
  std::vector<std::size_t> qubits, rounds;
  try {
    qubits = mpsqvm::parse_int_range(o.qubits);
    rounds = mpsqvm::parse_int_range(o.rounds);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (std::size_t n : qubits) {
    if (n < 2) throw UsageError("bench needs at least two qubits");
  }
  for (std::size_t m : rounds) {
    if (m < 1) throw UsageError("bench needs at least one round");
  }
  mpsqvm::GridOptions g;
  g.seeds_per_cell = o.seeds;
  g.seed_base = o.seed_base;
  g.policy = o.truncation.resolve(0.0);
  g.budget = {o.chi_cap, o.time_budget};
  g.jobs = o.jobs;
  const auto records = mpsqvm::run_grid(qubits, rounds, g);

  std::ostringstream csv;
  mpsqvm::emit_report(records, csv);
  write_output(o.out, csv.str());
  if (!o.plot_data.empty()) {
    std::ostringstream plot;
    mpsqvm::emit_plot_data(records, plot);
    write_output(o.plot_data, plot.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix product state quantum virtual machine"};
  app.require_subcommand(1);
  app.footer(
      "Ranges: --grid start:stop:count (real, count points, both ends included);\n"
      "        --qubits/--rounds start:stop:step, start:stop or a single value.\n"
      "Environment: MPSQVM_CUTOFF, MPSQVM_MAX_BOND and MPSQVM_ORACLE_QUBIT_CAP set\n"
      "defaults; command-line flags take precedence.");
  RunOptions run;
  VqeOptions vqe;
  BenchOptions bench;
  add_run(app, run);
  add_vqe(app, vqe);
  add_bench(app, bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (app.got_subcommand("run")) return do_run(run);
    if (app.got_subcommand("vqe")) return do_vqe(vqe);
    return do_bench(bench);
  } catch (const mpsqvm::ExecutionError& e) {
    std::cerr << "execution error: " << e.what() << "\n";
    return exit_execution;
  } catch (const mpsqvm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_usage;
  } catch (const mpsqvm::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return exit_usage;
  } catch (const mpsqvm::BindError& e) {
    std::cerr << "bind error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}
