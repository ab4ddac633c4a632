#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpsqvm/dense.hpp"
#include "mpsqvm/errors.hpp"
#include "mpsqvm/ir.hpp"
#include "mpsqvm/mps.hpp"
#include "mpsqvm/pauli.hpp"

namespace mpsqvm {

struct RunRecord {
  Counts counts;
  std::size_t max_bond_seen = 1;
  std::size_t memory_estimate_bytes = 0;
  double trunc_error_sq = 0.0;
  std::chrono::duration<double> wall_time{0.0};
};

/// Options shared by every backend; `dense` ignores the truncation fields.
struct BackendOptions {
  TruncationPolicy truncation{};
  std::size_t shots = 1024;
  std::uint64_t seed = 1;
};

/// Simulation target for flattened programs. A backend is a gate visitor:
/// execution walks the program and dispatches each instruction to it.
/// MEASURE marks a qubit for end-of-circuit sampling.
class Backend : public UnitaryVisitor {
 public:
  virtual std::string_view name() const = 0;

  /// Resets to |0...0> on n qubits and clears the measurement list.
  void initialize(std::size_t n) {
    measured_.clear();
    reset(n);
  }

  void visit_measure(const Instruction& inst) override { measured_.push_back(inst.qubits.at(0)); }

  const std::vector<std::size_t>& measured() const noexcept { return measured_; }

  virtual std::size_t num_qubits() const = 0;
  virtual double expectation(const PauliString& pauli) const = 0;
  virtual Counts sample(std::span<const std::size_t> qubits, std::size_t shots, std::uint64_t seed) const = 0;
  virtual std::size_t max_bond_seen() const = 0;
  virtual std::size_t memory_estimate_bytes() const = 0;
  virtual double truncation_error_sq() const { return 0.0; }

 protected:
  virtual void reset(std::size_t n) = 0;

 private:
  std::vector<std::size_t> measured_;
};

class MpsBackend final : public Backend {
 public:
  explicit MpsBackend(TruncationPolicy policy = {}) : policy_(policy) {}

  std::string_view name() const override { return "mps"; }
  std::size_t num_qubits() const override { return state().num_qubits(); }
  double expectation(const PauliString& pauli) const override { return state().expectation(pauli); }
  Counts sample(std::span<const std::size_t> qubits, std::size_t shots, std::uint64_t seed) const override {
    return state().sample(qubits, shots, seed);
  }
  std::size_t max_bond_seen() const override { return state().max_bond_seen(); }
  std::size_t memory_estimate_bytes() const override { return state().peak_memory_estimate(); }
  double truncation_error_sq() const override { return state().truncation_error_sq(); }

  const MpsState& state() const {
    if (!state_) throw ExecutionError("backend not initialized");
    return *state_;
  }

 protected:
  void reset(std::size_t n) override { state_.emplace(n, policy_); }

  void one_qubit(const Instruction& inst, const Matrix2& gate) override {
    state_->apply_one_qubit(gate, inst.qubits.at(0));
  }

  void two_qubit(const Instruction& inst, const Matrix4& gate) override {
    state_->apply_two_qubit(gate, inst.qubits.at(0), inst.qubits.at(1));
  }

 private:
  TruncationPolicy policy_;
  std::optional<MpsState> state_;
};

class DenseBackend final : public Backend {
 public:
  std::string_view name() const override { return "dense"; }
  std::size_t num_qubits() const override { return state().num_qubits(); }
  double expectation(const PauliString& pauli) const override { return dense_expectation(state(), pauli); }
  Counts sample(std::span<const std::size_t> qubits, std::size_t shots, std::uint64_t seed) const override {
    for (std::size_t q : qubits) {
      if (q >= num_qubits()) throw ExecutionError("sampled qubit out of range");
    }
    DenseConditional model(state());
    return sample_counts(model, qubits, shots, seed);
  }
  /// Full Schmidt rank a dense vector can hold at the middle cut.
  std::size_t max_bond_seen() const override { return std::size_t{1} << (num_qubits() / 2); }
  std::size_t memory_estimate_bytes() const override { return 16 * (std::size_t{1} << num_qubits()); }

  const DenseState& state() const {
    if (!state_) throw ExecutionError("backend not initialized");
    return *state_;
  }

 protected:
  void reset(std::size_t n) override { state_.emplace(n); }

  void one_qubit(const Instruction& inst, const Matrix2& gate) override {
    state_->apply_one_qubit(gate, inst.qubits.at(0));
  }

  void two_qubit(const Instruction& inst, const Matrix4& gate) override {
    state_->apply_two_qubit(gate, inst.qubits.at(0), inst.qubits.at(1));
  }

 private:
  std::optional<DenseState> state_;
};

/// "mps" or "dense".
inline std::unique_ptr<Backend> make_backend(std::string_view id, const BackendOptions& options = {}) {
  if (id == "mps") return std::make_unique<MpsBackend>(options.truncation);
  if (id == "dense") return std::make_unique<DenseBackend>();
  throw std::invalid_argument("unknown backend '" + std::string(id) + "' (expected mps or dense)");
}

/// Largest register the executor will allocate an MPS for.
inline constexpr std::size_t max_register_size = 100000;

/// Rejects programs that touch a qubit after measuring it; measurements are
/// only supported at the end of the circuit.
inline void check_terminal_measurements(const std::vector<Instruction>& program) {
  std::set<std::size_t> measured;
  for (const Instruction& inst : program) {
    if (inst.kind == GateKind::MEASURE) {
      measured.insert(inst.qubits.at(0));
      continue;
    }
    for (std::size_t q : inst.qubits) {
      if (measured.count(q)) {
        throw ExecutionError(std::string(gate_name(inst.kind)) + " on qubit " + std::to_string(q) +
                             " after it was measured; mid-circuit measurement is unsupported");
      }
    }
  }
}

/// Applies `program` to a fresh |0...0> of `n` qubits.
inline void run_program(Backend& backend, const std::vector<Instruction>& program, std::size_t n) {
  if (n == 0) throw ExecutionError("register must hold at least one qubit");
  if (n > max_register_size) throw ExecutionError("register of " + std::to_string(n) + " qubits is too large");
  if (required_qubits(program) > n) {
    throw ExecutionError("program uses qubit " + std::to_string(required_qubits(program) - 1) +
                         " but the buffer holds " + std::to_string(n));
  }
  check_terminal_measurements(program);
  backend.initialize(n);
  for (const Instruction& inst : program) {
    validate(inst);
    accept(inst, backend);
  }
}

/// Runs `program` on `buffer.size` qubits, samples the measured qubits and
/// records counts and resource statistics in the buffer.
inline RunRecord execute(Backend& backend, const std::vector<Instruction>& program, QubitBuffer& buffer,
                         std::size_t shots, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  try {
    run_program(backend, program, buffer.size);
  } catch (const std::invalid_argument& e) {
    throw ExecutionError(e.what());
  } catch (const std::out_of_range& e) {
    throw ExecutionError(e.what());
  }
  RunRecord record;
  record.counts = backend.sample(backend.measured(), shots, seed);
  record.max_bond_seen = backend.max_bond_seen();
  record.memory_estimate_bytes = backend.memory_estimate_bytes();
  record.trunc_error_sq = backend.truncation_error_sq();
  record.wall_time = std::chrono::steady_clock::now() - start;

  buffer.measurement_counts = record.counts;
  buffer.metadata["max_bond_seen"] = static_cast<double>(record.max_bond_seen);
  buffer.metadata["memory_estimate_bytes"] = static_cast<double>(record.memory_estimate_bytes);
  buffer.metadata["trunc_error_sq"] = record.trunc_error_sq;
  return record;
}

}  // namespace mpsqvm
