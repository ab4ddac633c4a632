#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mpsqvm/backend.hpp"
#include "mpsqvm/errors.hpp"
#include "mpsqvm/ir.hpp"
#include "mpsqvm/pauli.hpp"

namespace mpsqvm {

struct PauliTerm {
  double coefficient = 0.0;
  PauliString pauli;
};

/// sum_k c_k P_k. A constant offset is an all-I term.
struct PauliHamiltonian {
  std::vector<PauliTerm> terms;

  std::size_t num_qubits() const { return terms.empty() ? 0 : terms.front().pauli.size(); }
};

/// One `<coefficient> <pauli-string>` per line; `#` starts a comment.
inline PauliHamiltonian parse_hamiltonian(std::string_view text) {
  PauliHamiltonian h;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string coeff_text, letters, extra;
    if (!(fields >> coeff_text)) continue;
    if (!(fields >> letters)) throw DataError("expected '<coefficient> <pauli-string>'", line_no);
    if (fields >> extra) throw DataError("unexpected trailing field '" + extra + "'", line_no);
    double coeff = 0.0;
    std::size_t used = 0;
    try {
      coeff = std::stod(coeff_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != coeff_text.size() || !std::isfinite(coeff)) {
      throw DataError("invalid coefficient '" + coeff_text + "'", line_no);
    }
    PauliString pauli;
    try {
      pauli = PauliString(letters);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what(), line_no);
    }
    if (!h.terms.empty() && pauli.size() != h.num_qubits()) {
      throw DataError("Pauli string '" + letters + "' has length " + std::to_string(pauli.size()) +
                          ", expected " + std::to_string(h.num_qubits()),
                      line_no);
    }
    h.terms.push_back({coeff, std::move(pauli)});
  }
  if (h.terms.empty()) throw DataError("Hamiltonian has no terms", line_no);
  return h;
}

inline PauliHamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open Hamiltonian file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_hamiltonian(buf.str());
}

namespace detail {

inline std::vector<Instruction> prepare_ansatz(const CompositeInstruction& ansatz, double theta,
                                               const PauliHamiltonian& h) {
  if (ansatz.formal_params.size() != 1) {
    throw BindError("VQE ansatz must have exactly one parameter, '" + ansatz.name + "' has " +
                    std::to_string(ansatz.formal_params.size()));
  }
  std::vector<Instruction> program;
  for (Instruction& inst : flatten(bind_parameters(ansatz, {theta}))) {
    if (inst.kind != GateKind::MEASURE) program.push_back(std::move(inst));
  }
  if (required_qubits(program) > h.num_qubits()) {
    throw ExecutionError("ansatz uses " + std::to_string(required_qubits(program)) +
                         " qubits but the Hamiltonian acts on " + std::to_string(h.num_qubits()));
  }
  return program;
}

}  // namespace detail

/// <psi(theta)|H|psi(theta)> with expectation values contracted directly
/// from the backend state.
inline double energy(const CompositeInstruction& ansatz, double theta, const PauliHamiltonian& h,
                     Backend& backend) {
  run_program(backend, detail::prepare_ansatz(ansatz, theta, h), h.num_qubits());
  double e = 0.0;
  for (const auto& term : h.terms) e += term.coefficient * backend.expectation(term.pauli);
  return e;
}

struct TermEstimate {
  PauliTerm term;
  double value = 0.0;
  std::size_t shots = 0;
};

/// Appends the rotation that maps the eigenbasis of `letter` onto Z.
inline void append_basis_change(std::vector<Instruction>& program, char letter, std::size_t q) {
  if (letter == 'X') {
    program.push_back(make_gate(GateKind::H, {q}));
  } else if (letter == 'Y') {
    program.push_back(make_gate(GateKind::RZ, {q}, {-std::numbers::pi / 2}));
    program.push_back(make_gate(GateKind::H, {q}));
  }
}

/// Estimates every term by rotating into its eigenbasis and sampling parity.
/// Term k uses seed `seed + k`; identity terms are exact.
inline std::vector<TermEstimate> sampled_terms(const CompositeInstruction& ansatz, double theta,
                                               const PauliHamiltonian& h, Backend& backend,
                                               std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sampled mode needs at least one shot");
  const auto base = detail::prepare_ansatz(ansatz, theta, h);
  std::vector<TermEstimate> out;
  for (std::size_t k = 0; k < h.terms.size(); ++k) {
    const PauliTerm& term = h.terms[k];
    const auto support = term.pauli.support();
    if (support.empty()) {
      out.push_back({term, 1.0, 0});
      continue;
    }
    auto program = base;
    for (std::size_t q : support) append_basis_change(program, term.pauli[q], q);
    for (std::size_t i = 0; i < support.size(); ++i) program.push_back(make_measure(support[i], i));
    run_program(backend, program, h.num_qubits());
    const Counts counts = backend.sample(backend.measured(), shots, seed + k);
    long long signed_total = 0;
    for (const auto& [bits, count] : counts) {
      const auto ones = std::count(bits.begin(), bits.end(), '1');
      signed_total += (ones % 2 ? -1LL : 1LL) * static_cast<long long>(count);
    }
    out.push_back({term, static_cast<double>(signed_total) / static_cast<double>(shots), shots});
  }
  return out;
}

inline double sampled_energy(const CompositeInstruction& ansatz, double theta, const PauliHamiltonian& h,
                             Backend& backend, std::size_t shots, std::uint64_t seed) {
  double e = 0.0;
  for (const auto& t : sampled_terms(ansatz, theta, h, backend, shots, seed)) e += t.term.coefficient * t.value;
  return e;
}

/// Inclusive, uniformly spaced grid of `count` points.
struct Grid {
  double start = -std::numbers::pi;
  double stop = std::numbers::pi;
  std::size_t count = 100;

  std::vector<double> points() const {
    if (count < 2) throw std::invalid_argument("grid needs at least two points");
    std::vector<double> out(count);
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
    out.back() = stop;
    return out;
  }
};

struct SweepResult {
  std::vector<double> thetas;
  std::vector<double> energies;
  double argmin_theta = 0.0;
  double min_energy = 0.0;
};

using BackendFactory = std::function<std::unique_ptr<Backend>()>;

struct SweepOptions {
  std::size_t shots = 0;  // 0: analytic expectation values
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

/// Energy at every grid point. Points are independent and may be evaluated
/// on several threads; each uses its own backend, so results do not depend
/// on `jobs`. Ties for the minimum go to the smaller theta.
inline SweepResult sweep(const CompositeInstruction& ansatz, const PauliHamiltonian& h, const Grid& grid,
                         const BackendFactory& factory, const SweepOptions& options = {}) {
  SweepResult r;
  r.thetas = grid.points();
  r.energies.assign(r.thetas.size(), 0.0);
  detail::prepare_ansatz(ansatz, r.thetas.front(), h);  // surface errors before spawning

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      auto backend = factory();
      for (std::size_t i = next++; i < r.thetas.size(); i = next++) {
        r.energies[i] = options.shots
                            ? sampled_energy(ansatz, r.thetas[i], h, *backend, options.shots, options.seed)
                            : energy(ansatz, r.thetas[i], h, *backend);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = r.thetas.size();
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, r.thetas.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t best = 0;
  for (std::size_t i = 1; i < r.energies.size(); ++i) {
    if (r.energies[i] < r.energies[best] ||
        (r.energies[i] == r.energies[best] && r.thetas[i] < r.thetas[best])) {
      best = i;
    }
  }
  r.argmin_theta = r.thetas[best];
  r.min_energy = r.energies[best];
  return r;
}

}  // namespace mpsqvm
