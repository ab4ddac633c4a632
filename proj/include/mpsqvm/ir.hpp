#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "mpsqvm/errors.hpp"
#include "mpsqvm/gates.hpp"

namespace mpsqvm {

/// A rotation angle slot: either a concrete value in radians or the name of
/// a kernel parameter still waiting to be bound.
class Parameter {
 public:
  Parameter(double value) : slot_(value) {}  // NOLINT: implicit by intent
  Parameter(std::string name) : slot_(std::move(name)) {}
  Parameter(const char* name) : slot_(std::string(name)) {}

  bool is_bound() const noexcept { return std::holds_alternative<double>(slot_); }

  double value() const {
    if (!is_bound()) throw BindError("unbound parameter '" + name() + "'");
    return std::get<double>(slot_);
  }

  const std::string& name() const { return std::get<std::string>(slot_); }

  friend bool operator==(const Parameter&, const Parameter&) = default;

 private:
  std::variant<double, std::string> slot_;
};

struct Instruction {
  GateKind kind = GateKind::I;
  std::vector<std::size_t> qubits;
  std::vector<Parameter> params;
  std::optional<std::size_t> classical_target;

  double angle() const { return params.at(0).value(); }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// Throws std::invalid_argument unless arity, parameter count and qubit
/// distinctness match the gate kind.
inline void validate(const Instruction& inst) {
  const auto name = std::string(gate_name(inst.kind));
  if (inst.qubits.size() != gate_arity(inst.kind)) {
    throw std::invalid_argument(name + " expects " + std::to_string(gate_arity(inst.kind)) +
                                " qubit(s), got " + std::to_string(inst.qubits.size()));
  }
  if (inst.params.size() != gate_param_count(inst.kind)) {
    throw std::invalid_argument(name + " expects " + std::to_string(gate_param_count(inst.kind)) +
                                " parameter(s), got " + std::to_string(inst.params.size()));
  }
  if (inst.qubits.size() == 2 && inst.qubits[0] == inst.qubits[1]) {
    throw std::invalid_argument(name + " qubits must be distinct");
  }
  if (inst.classical_target && inst.kind != GateKind::MEASURE) {
    throw std::invalid_argument("only MEASURE carries a classical target");
  }
}

inline Instruction make_gate(GateKind kind, std::vector<std::size_t> qubits,
                             std::vector<Parameter> params = {}) {
  Instruction inst{kind, std::move(qubits), std::move(params), std::nullopt};
  validate(inst);
  return inst;
}

inline Instruction make_measure(std::size_t qubit, std::size_t creg) {
  return Instruction{GateKind::MEASURE, {qubit}, {}, creg};
}

/// Owning pointer with deep-copy semantics, used to nest composites by value.
template <typename T>
class Box {
 public:
  explicit Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct CompositeInstruction;

/// One child of a composite: a gate leaf or a nested kernel invocation.
using Node = std::variant<Instruction, Box<CompositeInstruction>>;

/// A named kernel. When nested inside another composite, `args` holds the
/// caller-side expressions bound to `formal_params` (one per formal).
struct CompositeInstruction {
  std::string name;
  std::vector<std::string> formal_params;
  std::vector<Parameter> args;
  std::vector<Node> children;

  void add(Instruction inst) { children.emplace_back(std::move(inst)); }
  void add(CompositeInstruction call) { children.emplace_back(Box<CompositeInstruction>(std::move(call))); }

  friend bool operator==(const CompositeInstruction&, const CompositeInstruction&) = default;
};

namespace detail {

using Environment = std::unordered_map<std::string, double>;

inline Parameter resolve(const Parameter& p, const Environment& env) {
  if (p.is_bound()) return p;
  auto it = env.find(p.name());
  if (it == env.end()) throw BindError("unknown parameter name '" + p.name() + "'");
  return Parameter(it->second);
}

inline CompositeInstruction bind_in(const CompositeInstruction& node, const Environment& env) {
  CompositeInstruction out;
  out.name = node.name;
  out.formal_params = node.formal_params;
  out.args = node.args;
  out.children.reserve(node.children.size());
  for (const Node& child : node.children) {
    if (const auto* inst = std::get_if<Instruction>(&child)) {
      Instruction bound = *inst;
      for (Parameter& p : bound.params) p = resolve(p, env);
      out.children.emplace_back(std::move(bound));
      continue;
    }
    const CompositeInstruction& call = *std::get<Box<CompositeInstruction>>(child);
    if (call.args.size() != call.formal_params.size()) {
      throw BindError("kernel '" + call.name + "' expects " +
                      std::to_string(call.formal_params.size()) + " argument(s), got " +
                      std::to_string(call.args.size()));
    }
    Environment inner;
    std::vector<Parameter> resolved;
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      resolved.push_back(resolve(call.args[i], env));
      inner[call.formal_params[i]] = resolved.back().value();
    }
    CompositeInstruction bound = bind_in(call, inner);
    bound.args = std::move(resolved);
    out.children.emplace_back(Box<CompositeInstruction>(std::move(bound)));
  }
  return out;
}

inline void flatten_into(const CompositeInstruction& node, std::vector<Instruction>& out) {
  for (const Node& child : node.children) {
    if (const auto* inst = std::get_if<Instruction>(&child)) {
      for (const Parameter& p : inst->params) {
        if (!p.is_bound()) throw BindError("unbound parameter '" + p.name() + "' in " + node.name);
      }
      out.push_back(*inst);
    } else {
      flatten_into(*std::get<Box<CompositeInstruction>>(child), out);
    }
  }
}

}  // namespace detail

/// Returns a deep copy of `root` with every named parameter slot replaced by
/// the value bound to it. Nested calls are resolved through their argument
/// lists. The input is left untouched.
inline CompositeInstruction bind_parameters(const CompositeInstruction& root,
                                            const std::vector<double>& values) {
  if (values.size() != root.formal_params.size()) {
    throw BindError("kernel '" + root.name + "' expects " +
                    std::to_string(root.formal_params.size()) + " parameter(s), got " +
                    std::to_string(values.size()));
  }
  detail::Environment env;
  for (std::size_t i = 0; i < values.size(); ++i) env[root.formal_params[i]] = values[i];
  return detail::bind_in(root, env);
}

/// Leaf instructions in pre-order.
inline std::vector<Instruction> flatten(const CompositeInstruction& root) {
  std::vector<Instruction> out;
  detail::flatten_into(root, out);
  return out;
}

/// One handler per gate kind; `accept` picks the right one.
class GateVisitor {
 public:
  virtual ~GateVisitor() = default;

  virtual void visit_h(const Instruction& inst) = 0;
  virtual void visit_x(const Instruction& inst) = 0;
  virtual void visit_y(const Instruction& inst) = 0;
  virtual void visit_z(const Instruction& inst) = 0;
  virtual void visit_rx(const Instruction& inst) = 0;
  virtual void visit_ry(const Instruction& inst) = 0;
  virtual void visit_rz(const Instruction& inst) = 0;
  virtual void visit_cnot(const Instruction& inst) = 0;
  virtual void visit_cz(const Instruction& inst) = 0;
  virtual void visit_swap(const Instruction& inst) = 0;
  virtual void visit_measure(const Instruction& inst) = 0;
  virtual void visit_identity(const Instruction& inst) = 0;
};

inline void accept(const Instruction& inst, GateVisitor& visitor) {
  switch (inst.kind) {
    case GateKind::H: visitor.visit_h(inst); return;
    case GateKind::X: visitor.visit_x(inst); return;
    case GateKind::Y: visitor.visit_y(inst); return;
    case GateKind::Z: visitor.visit_z(inst); return;
    case GateKind::RX: visitor.visit_rx(inst); return;
    case GateKind::RY: visitor.visit_ry(inst); return;
    case GateKind::RZ: visitor.visit_rz(inst); return;
    case GateKind::CNOT: visitor.visit_cnot(inst); return;
    case GateKind::CZ: visitor.visit_cz(inst); return;
    case GateKind::SWAP: visitor.visit_swap(inst); return;
    case GateKind::MEASURE: visitor.visit_measure(inst); return;
    case GateKind::I: visitor.visit_identity(inst); return;
  }
}

/// Visitor that routes every unitary kind to two generic hooks. Backends
/// derive from this and only implement the matrix application.
class UnitaryVisitor : public GateVisitor {
 public:
  void visit_h(const Instruction& i) override { one_qubit(i, gates::hadamard()); }
  void visit_x(const Instruction& i) override { one_qubit(i, gates::pauli_x()); }
  void visit_y(const Instruction& i) override { one_qubit(i, gates::pauli_y()); }
  void visit_z(const Instruction& i) override { one_qubit(i, gates::pauli_z()); }
  void visit_rx(const Instruction& i) override { one_qubit(i, gates::rx(i.angle())); }
  void visit_ry(const Instruction& i) override { one_qubit(i, gates::ry(i.angle())); }
  void visit_rz(const Instruction& i) override { one_qubit(i, gates::rz(i.angle())); }
  void visit_cnot(const Instruction& i) override { two_qubit(i, gates::cnot()); }
  void visit_cz(const Instruction& i) override { two_qubit(i, gates::cz()); }
  void visit_swap(const Instruction& i) override { two_qubit(i, gates::swap()); }
  void visit_identity(const Instruction& i) override { one_qubit(i, gates::identity()); }

 protected:
  virtual void one_qubit(const Instruction& inst, const Matrix2& gate) = 0;
  virtual void two_qubit(const Instruction& inst, const Matrix4& gate) = 0;
};

using Counts = std::map<std::string, std::size_t>;

/// Named register of qubits that collects the results of an execution.
struct QubitBuffer {
  std::string name;
  std::size_t size = 0;
  Counts measurement_counts;
  std::map<std::string, double> metadata;
};

inline std::size_t required_qubits(const std::vector<Instruction>& program) {
  std::size_t n = 0;
  for (const auto& inst : program) {
    for (std::size_t q : inst.qubits) n = std::max(n, q + 1);
  }
  return n;
}

}  // namespace mpsqvm
