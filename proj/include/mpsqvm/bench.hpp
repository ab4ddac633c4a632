#pragma once

// Round-structured random circuits and the memory study over a
// (qubits x rounds) grid.
//
// Round 1: H on every qubit, one random single-qubit gate per qubit, then
// CNOTs on pairs (0,1), (2,3), ... Later rounds drop the Hadamards and
// alternate the CNOT pairing between (1,2), (3,4), ... and (0,1), (2,3), ...

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ios>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "mpsqvm/gates.hpp"
#include "mpsqvm/ir.hpp"
#include "mpsqvm/mps.hpp"
#include "mpsqvm/sampling.hpp"

namespace mpsqvm {

struct RoundCircuitSpec {
  std::size_t n = 2;
  std::size_t rounds = 1;
  std::uint64_t seed = 1;
  std::vector<GateKind> single_qubit_pool = {GateKind::X,  GateKind::Y,  GateKind::Z,
                                             GateKind::RX, GateKind::RY, GateKind::RZ};
};

inline void validate(const RoundCircuitSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("random circuits need at least two qubits");
  if (spec.rounds < 1) throw std::invalid_argument("random circuits need at least one round");
  if (spec.single_qubit_pool.empty()) throw std::invalid_argument("single-qubit gate pool is empty");
  for (GateKind k : spec.single_qubit_pool) {
    if (gate_arity(k) != 1 || k == GateKind::MEASURE) {
      throw std::invalid_argument("pool gate " + std::string(gate_name(k)) + " is not a one-qubit unitary");
    }
  }
}

/// Deterministic in the seed. Rounds are generated in order from one random
/// stream, so the circuit for m rounds is a prefix of the one for m+1.
inline std::vector<Instruction> generate_round_circuit(const RoundCircuitSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::vector<Instruction> out;
  for (std::size_t q = 0; q < spec.n; ++q) out.push_back(make_gate(GateKind::H, {q}));
  for (std::size_t round = 1; round <= spec.rounds; ++round) {
    for (std::size_t q = 0; q < spec.n; ++q) {
      const GateKind k = spec.single_qubit_pool[uniform_index(rng, spec.single_qubit_pool.size())];
      if (gate_param_count(k) == 1) {
        out.push_back(make_gate(k, {q}, {2.0 * std::numbers::pi * uniform01(rng)}));
      } else {
        out.push_back(make_gate(k, {q}));
      }
    }
    for (std::size_t q = round % 2 == 1 ? 0 : 1; q + 1 < spec.n; q += 2) {
      out.push_back(make_gate(GateKind::CNOT, {q, q + 1}));
    }
  }
  return out;
}

/// Limits after which a benchmark cell is abandoned and reported as skipped.
struct BenchBudget {
  std::size_t chi_cap = 4096;
  double seconds_per_seed = 60.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool skipped = false;
  std::size_t peak_bytes = 0;
  std::size_t max_bond_seen = 0;
};

/// Simulates one circuit on an MPS. `observe` sees the state after every
/// instruction. Returns a skipped result when a budget is exceeded.
inline SeedResult simulate_circuit(const std::vector<Instruction>& circuit, std::size_t n,
                                   const TruncationPolicy& policy, const BenchBudget& budget,
                                   const std::function<void(const MpsState&)>& observe = {}) {
  const auto start = std::chrono::steady_clock::now();
  MpsState state(n, policy);
  SeedResult r;
  for (const Instruction& inst : circuit) {
    if (gate_arity(inst.kind) == 2) {
      state.apply_two_qubit(gates::two_qubit_matrix(inst.kind), inst.qubits[0], inst.qubits[1]);
    } else if (inst.kind != GateKind::MEASURE) {
      state.apply_one_qubit(gates::one_qubit_matrix(inst.kind, inst.params.empty() ? 0.0 : inst.angle()),
                            inst.qubits[0]);
    }
    if (observe) observe(state);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    if (state.max_bond() > budget.chi_cap || elapsed.count() > budget.seconds_per_seed) {
      r.skipped = true;
      return r;
    }
  }
  r.peak_bytes = state.peak_memory_estimate();
  r.max_bond_seen = state.max_bond_seen();
  return r;
}

struct BenchRecord {
  std::size_t n = 0;
  std::size_t rounds = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> bytes;  // per seed, peak memory estimate
  std::vector<std::size_t> chi;    // per seed, max bond seen
  bool skipped = false;
  double mean_bytes = 0.0;
  double std_bytes = 0.0;
  double mean_chi = 0.0;
  std::size_t max_chi = 0;
};

/// Sample mean and (n-1)-normalised standard deviation.
inline std::pair<double, double> mean_and_std(const std::vector<std::size_t>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (auto x : xs) mean += static_cast<double>(x);
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (auto x : xs) ss += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

struct GridOptions {
  std::size_t seeds_per_cell = 10;
  std::uint64_t seed_base = 1;
  TruncationPolicy policy{0.0, std::nullopt, CutoffMode::Relative};
  BenchBudget budget{};
  std::size_t jobs = 1;
};

/// Full study grid: 5..85 qubits step 5, 2..10 rounds step 2.
inline std::vector<std::size_t> default_bench_qubits() {
  std::vector<std::size_t> v;
  for (std::size_t n = 5; n <= 85; n += 5) v.push_back(n);
  return v;
}

inline std::vector<std::size_t> default_bench_rounds() { return {2, 4, 6, 8, 10}; }

/// One record per (n, rounds) cell, ordered by n then rounds. Seed s of every
/// cell is `seed_base + s`, so a fixed seed yields nested circuits across
/// the rounds axis. Any skipped seed marks its whole cell skipped.
inline std::vector<BenchRecord> run_grid(const std::vector<std::size_t>& qubits,
                                         const std::vector<std::size_t>& rounds,
                                         const GridOptions& options = {}) {
  if (qubits.empty() || rounds.empty()) throw std::invalid_argument("bench grid axes must be non-empty");
  if (options.seeds_per_cell == 0) throw std::invalid_argument("need at least one seed per cell");
  std::vector<BenchRecord> records;
  for (std::size_t n : qubits) {
    for (std::size_t m : rounds) {
      BenchRecord rec;
      rec.n = n;
      rec.rounds = m;
      validate(RoundCircuitSpec{n, m, 0});
      records.push_back(rec);
    }
  }
  const std::size_t per_cell = options.seeds_per_cell;
  std::vector<SeedResult> results(records.size() * per_cell);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < results.size(); task = next++) {
      const BenchRecord& cell = records[task / per_cell];
      const std::uint64_t seed = options.seed_base + task % per_cell;
      const auto circuit = generate_round_circuit({cell.n, cell.rounds, seed});
      try {
        results[task] = simulate_circuit(circuit, cell.n, options.policy, options.budget);
      } catch (const std::exception&) {
        results[task].skipped = true;
      }
      results[task].seed = seed;
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, results.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (std::size_t c = 0; c < records.size(); ++c) {
    BenchRecord& rec = records[c];
    for (std::size_t s = 0; s < per_cell; ++s) {
      const SeedResult& r = results[c * per_cell + s];
      rec.seeds.push_back(r.seed);
      if (r.skipped) {
        rec.skipped = true;
        continue;
      }
      rec.bytes.push_back(r.peak_bytes);
      rec.chi.push_back(r.max_bond_seen);
    }
    if (rec.skipped) {
      rec.bytes.clear();
      rec.chi.clear();
      continue;
    }
    std::tie(rec.mean_bytes, rec.std_bytes) = mean_and_std(rec.bytes);
    rec.mean_chi = mean_and_std(rec.chi).first;
    rec.max_chi = *std::max_element(rec.chi.begin(), rec.chi.end());
  }
  return records;
}

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// CSV: n,rounds,mean_bytes,std_bytes,mean_chi,max_chi,skipped,seeds.
/// `seeds` is first:count. Skipped cells leave the statistics empty.
inline void emit_report(const std::vector<BenchRecord>& records, std::ostream& csv) {
  if (records.empty()) throw std::invalid_argument("no bench records to report");
  csv << "n,rounds,mean_bytes,std_bytes,mean_chi,max_chi,skipped,seeds\n";
  for (const auto& r : records) {
    csv << r.n << ',' << r.rounds << ',';
    if (r.skipped) {
      csv << ",,,,true,";
    } else {
      csv << detail::shortest(r.mean_bytes) << ',' << detail::shortest(r.std_bytes) << ','
          << detail::shortest(r.mean_chi) << ',' << r.max_chi << ",false,";
    }
    csv << (r.seeds.empty() ? 0 : r.seeds.front()) << ':' << r.seeds.size() << '\n';
  }
  if (!csv) throw std::ios_base::failure("failed writing bench report");
}

/// gnuplot `splot` data: one block per qubit count, columns
/// rounds, n, mean_bytes, std_bytes. Skipped cells are commented out.
inline void emit_plot_data(const std::vector<BenchRecord>& records, std::ostream& out) {
  if (records.empty()) throw std::invalid_argument("no bench records to plot");
  out << "# rounds n mean_bytes std_bytes\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i > 0 && records[i - 1].n != r.n) out << '\n';
    if (r.skipped) {
      out << "# " << r.rounds << ' ' << r.n << " skipped\n";
    } else {
      out << r.rounds << ' ' << r.n << ' ' << detail::shortest(r.mean_bytes) << ' '
          << detail::shortest(r.std_bytes) << '\n';
    }
  }
  if (!out) throw std::ios_base::failure("failed writing plot data");
}

}  // namespace mpsqvm
