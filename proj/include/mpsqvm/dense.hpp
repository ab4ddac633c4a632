#pragma once

// Full 2^n statevector simulator. It is the reference every MPS result is
// checked against, so it favours the obvious loop over anything clever.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpsqvm/errors.hpp"
#include "mpsqvm/gates.hpp"
#include "mpsqvm/ir.hpp"
#include "mpsqvm/pauli.hpp"
#include "mpsqvm/sampling.hpp"

namespace mpsqvm {

inline constexpr std::size_t default_oracle_qubit_cap = 24;

/// Largest register the dense oracle accepts; MPSQVM_ORACLE_QUBIT_CAP overrides.
inline std::size_t oracle_qubit_cap() {
  if (const char* env = std::getenv("MPSQVM_ORACLE_QUBIT_CAP")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 63) return static_cast<std::size_t>(v);
  }
  return default_oracle_qubit_cap;
}

/// Amplitudes indexed so that bit k of the index is qubit k.
class DenseState {
 public:
  explicit DenseState(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("dense state needs at least one qubit");
    if (n > oracle_qubit_cap()) {
      throw ExecutionError("dense oracle limited to " + std::to_string(oracle_qubit_cap()) +
                           " qubits, requested " + std::to_string(n));
    }
    amps_.assign(std::size_t{1} << n, cplx(0.0, 0.0));
    amps_[0] = 1.0;
  }

  std::size_t num_qubits() const noexcept { return n_; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  cplx amplitude(std::size_t index) const { return amps_.at(index); }

  /// `bits[k]` is the value of qubit k.
  cplx amplitude(std::string_view bits) const {
    if (bits.size() != n_) throw std::invalid_argument("bitstring length does not match qubit count");
    std::size_t index = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      if (bits[k] == '1') {
        index |= std::size_t{1} << k;
      } else if (bits[k] != '0') {
        throw std::invalid_argument("bitstring must contain only 0 and 1");
      }
    }
    return amps_[index];
  }

  double norm_squared() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return s;
  }

  void apply_one_qubit(const Matrix2& g, std::size_t q) {
    check_qubit(q);
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & stride) continue;
      const cplx a0 = amps_[i], a1 = amps_[i | stride];
      amps_[i] = g(0, 0) * a0 + g(0, 1) * a1;
      amps_[i | stride] = g(1, 0) * a0 + g(1, 1) * a1;
    }
  }

  /// Matrix basis index is 2*bit(a) + bit(b).
  void apply_two_qubit(const Matrix4& g, std::size_t a, std::size_t b) {
    check_qubit(a);
    check_qubit(b);
    if (a == b) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    const std::size_t ma = std::size_t{1} << a, mb = std::size_t{1} << b;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & (ma | mb)) continue;
      const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};
      cplx in[4];
      for (int r = 0; r < 4; ++r) in[r] = amps_[idx[r]];
      for (int r = 0; r < 4; ++r) {
        cplx acc = 0.0;
        for (int c = 0; c < 4; ++c) acc += g(r, c) * in[c];
        amps_[idx[r]] = acc;
      }
    }
  }

 private:
  void check_qubit(std::size_t q) const {
    if (q >= n_) {
      throw ExecutionError("qubit index " + std::to_string(q) + " out of range for " +
                           std::to_string(n_) + " qubits");
    }
  }

  std::size_t n_;
  std::vector<cplx> amps_;
};

/// Runs a flattened program. MEASURE instructions are terminal and leave the
/// amplitudes untouched.
inline DenseState dense_run(const std::vector<Instruction>& program, std::size_t n) {
  DenseState state(n);
  for (const Instruction& inst : program) {
    switch (gate_arity(inst.kind)) {
      case 1:
        if (inst.kind == GateKind::MEASURE) {
          if (inst.qubits.at(0) >= n) throw ExecutionError("measured qubit out of range");
          break;
        }
        state.apply_one_qubit(
            gates::one_qubit_matrix(inst.kind, inst.params.empty() ? 0.0 : inst.angle()),
            inst.qubits.at(0));
        break;
      default:
        state.apply_two_qubit(gates::two_qubit_matrix(inst.kind), inst.qubits.at(0), inst.qubits.at(1));
        break;
    }
  }
  return state;
}

inline double dense_expectation(const DenseState& state, const PauliString& pauli) {
  const std::size_t n = state.num_qubits();
  if (pauli.size() != n) throw std::invalid_argument("Pauli string length does not match qubit count");
  // P|i> = phase(i) |i ^ flip>
  std::size_t flip = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (pauli[q] == 'X' || pauli[q] == 'Y') flip |= std::size_t{1} << q;
  }
  const auto amps = state.amplitudes();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    cplx phase = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
      const bool bit = (i >> q) & 1U;
      switch (pauli[q]) {
        case 'Z':
          if (bit) phase = -phase;
          break;
        case 'Y':
          phase *= bit ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
          break;
        default: break;
      }
    }
    acc += std::conj(amps[i ^ flip]) * phase * amps[i];
  }
  return acc.real();
}

/// |amplitude|^2 per basis index.
inline std::vector<double> dense_distribution(const DenseState& state) {
  std::vector<double> p;
  p.reserve(state.amplitudes().size());
  for (const cplx& a : state.amplitudes()) p.push_back(std::norm(a));
  return p;
}

/// Sequential sampler over prefix marginals. marginal_[k][prefix] is the
/// probability that qubits 0..k read `prefix`.
class DenseConditional final : public ConditionalModel {
 public:
  explicit DenseConditional(const DenseState& state) : n_(state.num_qubits()) {
    marginal_.resize(n_);
    marginal_[n_ - 1] = dense_distribution(state);
    for (std::size_t k = n_ - 1; k-- > 0;) {
      const std::size_t half = std::size_t{1} << (k + 1);
      marginal_[k].assign(half, 0.0);
      for (std::size_t p = 0; p < half; ++p) marginal_[k][p] = marginal_[k + 1][p] + marginal_[k + 1][p + half];
    }
    total_ = marginal_[0][0] + marginal_[0][1];
  }

  void begin_shot() override { prefix_ = 0; }

  double prob_zero(std::size_t q) override {
    const double given = q == 0 ? total_ : marginal_[q - 1][prefix_];
    return given > 0.0 ? marginal_[q][prefix_] / given : 1.0;
  }

  void fix(std::size_t q, int bit) override {
    if (bit) prefix_ |= std::size_t{1} << q;
  }

 private:
  std::size_t n_;
  std::vector<std::vector<double>> marginal_;
  double total_ = 1.0;
  std::size_t prefix_ = 0;
};

}  // namespace mpsqvm
