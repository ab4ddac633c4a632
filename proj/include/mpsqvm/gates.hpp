#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace mpsqvm {

using cplx = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

/// Gate kinds understood by the IR, the parser and both backends.
enum class GateKind { H, X, Y, Z, RX, RY, RZ, CNOT, CZ, SWAP, MEASURE, I };

inline constexpr std::array<GateKind, 12> all_gate_kinds = {
    GateKind::H,    GateKind::X,  GateKind::Y,    GateKind::Z,
    GateKind::RX,   GateKind::RY, GateKind::RZ,   GateKind::CNOT,
    GateKind::CZ,   GateKind::SWAP, GateKind::MEASURE, GateKind::I};

constexpr std::string_view gate_name(GateKind k) noexcept {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
    case GateKind::MEASURE: return "MEASURE";
    case GateKind::I: return "I";
  }
  return "?";
}

constexpr std::optional<GateKind> gate_from_name(std::string_view name) noexcept {
  for (GateKind k : all_gate_kinds) {
    if (gate_name(k) == name) return k;
  }
  return std::nullopt;
}

constexpr std::size_t gate_arity(GateKind k) noexcept {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::SWAP: return 2;
    default: return 1;
  }
}

constexpr std::size_t gate_param_count(GateKind k) noexcept {
  switch (k) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: return 1;
    default: return 0;
  }
}

namespace gates {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

inline Matrix2 identity() { return Matrix2::Identity(); }

inline Matrix2 hadamard() {
  Matrix2 m;
  m << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
  return m;
}

inline Matrix2 pauli_x() {
  Matrix2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Matrix2 pauli_y() {
  Matrix2 m;
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return m;
}

inline Matrix2 pauli_z() {
  Matrix2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// R_P(theta) = exp(-i theta P / 2)
inline Matrix2 rx(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Matrix2 m;
  m << c, cplx(0.0, -s), cplx(0.0, -s), c;
  return m;
}

inline Matrix2 ry(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Matrix2 m;
  m << c, -s, s, c;
  return m;
}

inline Matrix2 rz(double theta) {
  Matrix2 m;
  m << std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2);
  return m;
}

// Two-qubit matrices use basis index 2*a + b, where a is the first listed
// qubit (the control for CNOT) and b the second.
inline Matrix4 cnot() {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  return m;
}

inline Matrix4 cz() {
  Matrix4 m = Matrix4::Identity();
  m(3, 3) = -1.0;
  return m;
}

inline Matrix4 swap() {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 2) = m(2, 1) = 1.0;
  return m;
}

/// Exchange the roles of the two qubits a two-qubit matrix acts on.
inline Matrix4 reverse_qubits(const Matrix4& g) {
  const Matrix4 s = swap();
  return s * g * s;
}

/// Matrix of a one-qubit unitary kind. `angle` is ignored for fixed gates.
inline Matrix2 one_qubit_matrix(GateKind k, double angle = 0.0) {
  switch (k) {
    case GateKind::H: return hadamard();
    case GateKind::X: return pauli_x();
    case GateKind::Y: return pauli_y();
    case GateKind::Z: return pauli_z();
    case GateKind::RX: return rx(angle);
    case GateKind::RY: return ry(angle);
    case GateKind::RZ: return rz(angle);
    case GateKind::I: return identity();
    default: break;
  }
  throw std::invalid_argument("not a one-qubit unitary gate: " + std::string(gate_name(k)));
}

inline Matrix4 two_qubit_matrix(GateKind k) {
  switch (k) {
    case GateKind::CNOT: return cnot();
    case GateKind::CZ: return cz();
    case GateKind::SWAP: return swap();
    default: break;
  }
  throw std::invalid_argument("not a two-qubit gate: " + std::string(gate_name(k)));
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  using Plain = typename Derived::PlainObject;
  const Plain prod = m.adjoint() * m;
  return (prod - Plain::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace gates
}  // namespace mpsqvm
