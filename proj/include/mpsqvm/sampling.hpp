#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "mpsqvm/ir.hpp"

namespace mpsqvm {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection; portable across standard libraries.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

/// Conditional-probability view of a pure state, walked qubit 0, 1, 2, ...
/// within a shot. Both backends expose one so that they share the sampling
/// loop and therefore the random stream.
class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;
  virtual void begin_shot() = 0;
  /// P(bit q = 0 | bits of qubits < q already fixed).
  virtual double prob_zero(std::size_t q) = 0;
  virtual void fix(std::size_t q, int bit) = 0;
};

/// Draws `shots` bitstrings by sequential conditional sampling. Each key has
/// one character per entry of `measured`, in that order.
inline Counts sample_counts(ConditionalModel& model, std::span<const std::size_t> measured,
                            std::size_t shots, std::uint64_t seed) {
  Counts counts;
  if (measured.empty() || shots == 0) return counts;
  std::size_t last = 0;
  for (std::size_t q : measured) last = std::max(last, q);
  std::mt19937_64 rng(seed);
  std::vector<int> bits(last + 1);
  std::string key(measured.size(), '0');
  for (std::size_t s = 0; s < shots; ++s) {
    model.begin_shot();
    for (std::size_t q = 0; q <= last; ++q) {
      const double u = uniform01(rng);
      bits[q] = u < model.prob_zero(q) ? 0 : 1;
      model.fix(q, bits[q]);
    }
    for (std::size_t i = 0; i < measured.size(); ++i) key[i] = bits[measured[i]] ? '1' : '0';
    ++counts[key];
  }
  return counts;
}

}  // namespace mpsqvm
