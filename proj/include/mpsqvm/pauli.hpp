#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpsqvm/gates.hpp"

namespace mpsqvm {

/// Tensor product of I/X/Y/Z, one letter per qubit; letter k acts on qubit k.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::string_view letters) : letters_(letters) {
    if (letters_.empty()) throw std::invalid_argument("empty Pauli string");
    for (char c : letters_) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw std::invalid_argument("invalid Pauli letter '" + std::string(1, c) + "' in " + letters_);
      }
    }
  }

  std::size_t size() const noexcept { return letters_.size(); }
  char operator[](std::size_t q) const { return letters_.at(q); }
  const std::string& str() const noexcept { return letters_; }

  /// Qubits carrying a non-identity factor, ascending.
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < letters_.size(); ++q) {
      if (letters_[q] != 'I') out.push_back(q);
    }
    return out;
  }

  bool is_identity() const { return support().empty(); }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::string letters_;
};

inline Matrix2 pauli_matrix(char letter) {
  switch (letter) {
    case 'I': return gates::identity();
    case 'X': return gates::pauli_x();
    case 'Y': return gates::pauli_y();
    case 'Z': return gates::pauli_z();
    default: break;
  }
  throw std::invalid_argument("invalid Pauli letter");
}

}  // namespace mpsqvm
