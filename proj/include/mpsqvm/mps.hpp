#pragma once

// Matrix product state in right-canonical form with Schmidt coefficients kept
// alongside.
//
//   |psi> = sum_s  B0[s0] B1[s1] ... B(n-1)[s(n-1)] |s>,   B_k = G_k L_k
//
// Site k stores B_k[0], B_k[1] of shape (left bond, right bond); bond k
// (between sites k and k+1) stores the Schmidt coefficients L_k in descending
// order. A gate on sites (q, q+1) is applied to L(q-1) B_q B_(q+1), the result
// split by SVD, and the new B_q recovered as the gated pair times the right
// singular vectors, which avoids dividing by small Schmidt coefficients.
// Gates on distant qubits are routed through nearest-neighbour SWAPs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mpsqvm/errors.hpp"
#include "mpsqvm/gates.hpp"
#include "mpsqvm/ir.hpp"
#include "mpsqvm/pauli.hpp"
#include "mpsqvm/sampling.hpp"

namespace mpsqvm {

enum class CutoffMode { Relative, Absolute };

inline constexpr double default_cutoff = 1e-4;

/// Singular values below `cutoff` (times the largest one, in relative mode)
/// are dropped, then at most `max_bond` survive. At least one always does.
struct TruncationPolicy {
  double cutoff = default_cutoff;
  std::optional<std::size_t> max_bond;
  CutoffMode mode = CutoffMode::Relative;
};

class MpsState {
 public:
  using Matrix = Eigen::MatrixXcd;
  using Site = std::array<Matrix, 2>;

  /// |0...0> on n qubits.
  explicit MpsState(std::size_t n, TruncationPolicy policy = {}) : policy_(policy) {
    if (n == 0) throw std::invalid_argument("MPS needs at least one qubit");
    if (policy.cutoff < 0.0 || !std::isfinite(policy.cutoff)) {
      throw std::invalid_argument("cutoff must be a finite non-negative number");
    }
    if (policy.max_bond && *policy.max_bond == 0) throw std::invalid_argument("max_bond must be at least 1");
    sites_.resize(n);
    for (Site& s : sites_) {
      s[0] = Matrix::Ones(1, 1);
      s[1] = Matrix::Zero(1, 1);
    }
    bonds_.assign(n - 1, Eigen::VectorXd::Ones(1));
    record_peaks();
  }

  std::size_t num_qubits() const noexcept { return sites_.size(); }
  const TruncationPolicy& policy() const noexcept { return policy_; }
  const Site& site(std::size_t k) const { return sites_.at(k); }
  const Eigen::VectorXd& bond(std::size_t k) const { return bonds_.at(k); }

  std::size_t bond_dimension(std::size_t k) const { return static_cast<std::size_t>(bonds_.at(k).size()); }

  /// Largest bond dimension currently held (1 for a single site).
  std::size_t max_bond() const {
    std::size_t chi = 1;
    for (const auto& b : bonds_) chi = std::max(chi, static_cast<std::size_t>(b.size()));
    return chi;
  }

  std::size_t tensor_entries() const {
    std::size_t total = 0;
    for (const Site& s : sites_) total += 2 * static_cast<std::size_t>(s[0].rows() * s[0].cols());
    return total;
  }

  /// 16 bytes per complex entry over all site tensors.
  std::size_t memory_estimate() const { return 16 * tensor_entries(); }

  std::size_t max_bond_seen() const noexcept { return max_bond_seen_; }
  std::size_t peak_memory_estimate() const noexcept { return peak_memory_; }
  double truncation_error_sq() const noexcept { return trunc_error_sq_; }

  void apply_one_qubit(const Matrix2& gate, std::size_t q) {
    check_site(q);
    if (!gates::is_unitary(gate)) throw std::invalid_argument("one-qubit gate is not unitary");
    Site& s = sites_[q];
    const Matrix g0 = s[0], g1 = s[1];
    s[0] = gate(0, 0) * g0 + gate(0, 1) * g1;
    s[1] = gate(1, 0) * g0 + gate(1, 1) * g1;
  }

  /// Gate on sites (q, q+1); matrix basis index is 2*bit(q) + bit(q+1).
  void apply_two_qubit_adjacent(const Matrix4& gate, std::size_t q) {
    check_site(q);
    if (q + 1 >= num_qubits()) {
      throw std::invalid_argument("adjacent two-qubit gate at site " + std::to_string(q) +
                                  " runs past the right boundary");
    }
    if (!gates::is_unitary(gate)) throw std::invalid_argument("two-qubit gate is not unitary");
    update_pair(gate, q);
    record_peaks();
  }

  /// Gate on arbitrary distinct qubits (first, second) with matrix basis index
  /// 2*bit(first) + bit(second). The higher qubit is swapped down next to the
  /// lower one, the gate applied, and the swaps undone.
  void apply_two_qubit(const Matrix4& gate, std::size_t first, std::size_t second) {
    check_site(first);
    check_site(second);
    if (first == second) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    if (!gates::is_unitary(gate)) throw std::invalid_argument("two-qubit gate is not unitary");
    const std::size_t lo = std::min(first, second), hi = std::max(first, second);
    const Matrix4 oriented = first < second ? gate : gates::reverse_qubits(gate);
    const Matrix4 swap = gates::swap();
    for (std::size_t k = hi - 1; k > lo; --k) apply_two_qubit_adjacent(swap, k);
    apply_two_qubit_adjacent(oriented, lo);
    for (std::size_t k = lo + 1; k < hi; ++k) apply_two_qubit_adjacent(swap, k);
  }

  /// <bits|psi>; bits[k] is qubit k.
  cplx amplitude(std::string_view bits) const {
    if (bits.size() != num_qubits()) throw std::invalid_argument("bitstring length does not match qubit count");
    Eigen::RowVectorXcd left = Eigen::RowVectorXcd::Ones(1);
    for (std::size_t k = 0; k < num_qubits(); ++k) {
      int b = 0;
      if (bits[k] == '1') {
        b = 1;
      } else if (bits[k] != '0') {
        throw std::invalid_argument("bitstring must contain only 0 and 1");
      }
      left = (left * sites_[k][b]).eval();
    }
    return left(0);
  }

  /// <psi|psi> by full transfer-matrix contraction.
  double norm_squared() const {
    return std::real(contract_operator([](std::size_t) { return gates::identity(); }));
  }

  /// <psi|P|psi> / <psi|psi>. The state is not modified.
  double expectation(const PauliString& pauli) const {
    if (pauli.size() != num_qubits()) {
      throw std::invalid_argument("Pauli string length does not match qubit count");
    }
    const cplx num = contract_operator([&](std::size_t k) { return pauli_matrix(pauli[k]); });
    return num.real() / norm_squared();
  }

  /// All 2^n amplitudes (index bit k = qubit k); for checking small states.
  Eigen::VectorXcd to_dense(std::size_t cap = 24) const {
    const std::size_t n = num_qubits();
    if (n > cap) throw ExecutionError("refusing to expand a " + std::to_string(n) + "-qubit MPS densely");
    Matrix prefix = Matrix::Ones(1, 1);  // rows: configurations of qubits < k
    for (std::size_t k = 0; k < n; ++k) {
      const Matrix a0 = weighted(k, 0), a1 = weighted(k, 1);
      Matrix next(prefix.rows() * 2, a0.cols());
      next.topRows(prefix.rows()) = prefix * a0;
      next.bottomRows(prefix.rows()) = prefix * a1;
      prefix = std::move(next);
    }
    return prefix.col(0);
  }

  /// Shots drawn from |<bits|psi>|^2; one key character per `measured` entry.
  Counts sample(std::span<const std::size_t> measured, std::size_t shots, std::uint64_t seed) const;

 private:
  friend class MpsConditional;

  void check_site(std::size_t q) const {
    if (q >= num_qubits()) {
      throw ExecutionError("qubit index " + std::to_string(q) + " out of range for " +
                              std::to_string(num_qubits()) + " qubits");
    }
  }

  Eigen::VectorXd left_bond(std::size_t q) const {
    return q > 0 ? bonds_[q - 1] : Eigen::VectorXd::Ones(1);
  }

  const Matrix& weighted(std::size_t k, int b) const { return sites_[k][b]; }

  template <typename SiteOperator>
  cplx contract_operator(SiteOperator&& op) const {
    Matrix env = Matrix::Ones(1, 1);
    for (std::size_t k = 0; k < num_qubits(); ++k) {
      const Matrix2 o = op(k);
      const Matrix a[2] = {weighted(k, 0), weighted(k, 1)};
      Matrix next = Matrix::Zero(a[0].cols(), a[0].cols());
      for (int bra = 0; bra < 2; ++bra) {
        for (int ket = 0; ket < 2; ++ket) {
          if (o(bra, ket) == cplx(0.0, 0.0)) continue;
          next.noalias() += o(bra, ket) * (a[bra].adjoint() * env * a[ket]);
        }
      }
      env = std::move(next);
    }
    return env(0, 0);
  }

  std::size_t kept_count(const Eigen::VectorXd& s) const {
    const auto total = static_cast<std::size_t>(s.size());
    const double threshold = policy_.mode == CutoffMode::Relative ? policy_.cutoff * s(0) : policy_.cutoff;
    std::size_t keep = 0;
    while (keep < total && !(s(static_cast<Eigen::Index>(keep)) < threshold)) ++keep;
    if (policy_.max_bond) keep = std::min(keep, *policy_.max_bond);
    return std::max<std::size_t>(keep, 1);
  }

  void update_pair(const Matrix4& gate, std::size_t q) {
    const Eigen::VectorXd lam_l = left_bond(q);
    const Eigen::Index chi_l = lam_l.size(), chi_r = sites_[q + 1][0].cols();

    // Gated pair laid out as rows (a, left) x cols (b, right).
    Matrix pair[2][2];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) pair[a][b] = sites_[q][a] * sites_[q + 1][b];
    }
    Matrix phi(2 * chi_l, 2 * chi_r);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        Matrix acc = Matrix::Zero(chi_l, chi_r);
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            const cplx g = gate(2 * a + b, 2 * c + d);
            if (g != cplx(0.0, 0.0)) acc.noalias() += g * pair[c][d];
          }
        }
        phi.block(a * chi_l, b * chi_r, chi_l, chi_r) = acc;
      }
    }
    Matrix theta = phi;
    for (int a = 0; a < 2; ++a) theta.middleRows(a * chi_l, chi_l).array().colwise() *= lam_l.cast<cplx>().array();

    Eigen::BDCSVD<Matrix> svd(theta, Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw ExecutionError("SVD failed at bond " + std::to_string(q));
    const Eigen::VectorXd& s = svd.singularValues();
    if (!s.allFinite() || s(0) <= 0.0) throw ExecutionError("degenerate SVD at bond " + std::to_string(q));

    const std::size_t keep = kept_count(s);
    const auto k = static_cast<Eigen::Index>(keep);
    const double total_weight = s.squaredNorm();
    const double kept_weight = s.head(k).squaredNorm();
    trunc_error_sq_ += std::max(0.0, total_weight - kept_weight) / total_weight;

    const Matrix v = svd.matrixV().leftCols(k);
    const Matrix left = phi * v / std::sqrt(kept_weight / total_weight);
    for (int a = 0; a < 2; ++a) sites_[q][a] = left.middleRows(a * chi_l, chi_l);
    for (int b = 0; b < 2; ++b) sites_[q + 1][b] = v.middleRows(b * chi_r, chi_r).adjoint();
    bonds_[q] = s.head(k) / std::sqrt(kept_weight);
  }

  void record_peaks() {
    max_bond_seen_ = std::max(max_bond_seen_, max_bond());
    peak_memory_ = std::max(peak_memory_, memory_estimate());
  }

  TruncationPolicy policy_;
  std::vector<Site> sites_;
  std::vector<Eigen::VectorXd> bonds_;
  std::size_t max_bond_seen_ = 1;
  std::size_t peak_memory_ = 0;
  double trunc_error_sq_ = 0.0;
};

/// Sequential sampler over an MPS: right environments are built once, then
/// every shot carries a single left row vector through the chain.
class MpsConditional final : public ConditionalModel {
 public:
  explicit MpsConditional(const MpsState& state) {
    const std::size_t n = state.num_qubits();
    right_env_.resize(n);
    right_env_[n - 1] = MpsState::Matrix::Ones(1, 1);
    for (std::size_t k = n - 1; k > 0; --k) {
      const MpsState::Matrix a0 = state.weighted(k, 0), a1 = state.weighted(k, 1);
      right_env_[k - 1] = a0 * right_env_[k] * a0.adjoint() + a1 * right_env_[k] * a1.adjoint();
    }
    for (std::size_t k = 0; k < n; ++k) weighted_.push_back({state.weighted(k, 0), state.weighted(k, 1)});
  }

  void begin_shot() override { left_ = Eigen::RowVectorXcd::Ones(1); }

  double prob_zero(std::size_t q) override {
    for (int b = 0; b < 2; ++b) {
      candidate_[b] = left_ * weighted_[q][b];
      weight_[b] = std::max(0.0, (candidate_[b] * right_env_[q] * candidate_[b].adjoint())(0, 0).real());
    }
    const double total = weight_[0] + weight_[1];
    return total > 0.0 ? weight_[0] / total : 1.0;
  }

  void fix(std::size_t, int bit) override {
    const double w = weight_[bit];
    left_ = w > 0.0 ? Eigen::RowVectorXcd(candidate_[bit] / std::sqrt(w)) : candidate_[bit];
  }

 private:
  std::vector<MpsState::Matrix> right_env_;
  std::vector<std::array<MpsState::Matrix, 2>> weighted_;
  Eigen::RowVectorXcd left_;
  Eigen::RowVectorXcd candidate_[2];
  double weight_[2] = {0.0, 0.0};
};

inline Counts MpsState::sample(std::span<const std::size_t> measured, std::size_t shots,
                               std::uint64_t seed) const {
  for (std::size_t q : measured) check_site(q);
  MpsConditional model(*this);
  return sample_counts(model, measured, shots, seed);
}

}  // namespace mpsqvm
