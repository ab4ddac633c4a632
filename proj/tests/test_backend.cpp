#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mpsqvm/backend.hpp"
#include "oracle.hpp"

using namespace mpsqvm;

namespace {

QubitBuffer buffer(std::size_t n) {
  QubitBuffer b;
  b.name = "q";
  b.size = n;
  return b;
}

std::vector<Instruction> bell_program() {
  return {make_gate(GateKind::H, {0}), make_gate(GateKind::CNOT, {0, 1}), make_measure(0, 0),
          make_measure(1, 1)};
}

}  // namespace

TEST(Backend, Factory) {
  EXPECT_EQ(make_backend("mps")->name(), "mps");
  EXPECT_EQ(make_backend("dense")->name(), "dense");
  EXPECT_THROW(make_backend("gpu"), std::invalid_argument);
}

TEST(Backend, BellCountsAgreeAcrossBackends) {
  auto mps = make_backend("mps");
  auto dense = make_backend("dense");
  auto a = buffer(2), b = buffer(2);
  const auto ra = execute(*mps, bell_program(), a, 1000, 7);
  const auto rb = execute(*dense, bell_program(), b, 1000, 7);
  EXPECT_EQ(ra.counts, rb.counts);
  EXPECT_EQ(ra.counts.at("00") + ra.counts.at("11"), 1000u);
  EXPECT_EQ(a.measurement_counts, ra.counts);
  EXPECT_EQ(a.metadata.at("max_bond_seen"), 2.0);
  EXPECT_EQ(ra.max_bond_seen, 2u);
  EXPECT_EQ(ra.trunc_error_sq, 0.0);
}

TEST(Backend, RandomCircuitsAgreeAcrossBackends) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    auto program = oracle::random_circuit(n, 20, rng);
    for (std::size_t q = 0; q < n; ++q) program.push_back(make_measure(q, q));
    BackendOptions opt;
    opt.truncation.cutoff = 0.0;
    auto mps = make_backend("mps", opt);
    auto dense = make_backend("dense");
    run_program(*mps, program, n);
    run_program(*dense, program, n);
    std::string letters(n, 'Z');
    letters[0] = 'X';
    EXPECT_NEAR(mps->expectation(PauliString(letters)), dense->expectation(PauliString(letters)), 1e-10);
    EXPECT_EQ(mps->measured(), dense->measured());
  }
}

TEST(Backend, MeasurementOrderDefinesKey) {
  auto b = make_backend("mps");
  auto buf = buffer(3);
  const auto r = execute(*b, {make_gate(GateKind::X, {2}), make_measure(2, 0), make_measure(0, 1)}, buf, 5, 1);
  EXPECT_EQ(r.counts, (Counts{{"10", 5}}));
}

TEST(Backend, NoMeasurementsGivesEmptyCounts) {
  auto b = make_backend("dense");
  auto buf = buffer(1);
  EXPECT_TRUE(execute(*b, {make_gate(GateKind::H, {0})}, buf, 100, 1).counts.empty());
}

TEST(Backend, BufferIsOverwritten) {
  auto b = make_backend("mps");
  auto buf = buffer(1);
  execute(*b, {make_measure(0, 0)}, buf, 3, 1);
  execute(*b, {make_gate(GateKind::X, {0}), make_measure(0, 0)}, buf, 4, 1);
  EXPECT_EQ(buf.measurement_counts, (Counts{{"1", 4}}));
}

TEST(Backend, ExecutionErrors) {
  auto b = make_backend("mps");
  auto small = buffer(1);
  EXPECT_THROW(execute(*b, bell_program(), small, 10, 1), ExecutionError);
  auto buf = buffer(2);
  EXPECT_THROW(execute(*b, {make_measure(0, 0), make_gate(GateKind::H, {0})}, buf, 10, 1), ExecutionError);
  auto empty = buffer(0);
  EXPECT_THROW(execute(*b, {}, empty, 10, 1), ExecutionError);
  auto huge = buffer(30);
  EXPECT_THROW(execute(*make_backend("dense"), {}, huge, 10, 1), ExecutionError);
  EXPECT_THROW(b->expectation(PauliString("Z")), ExecutionError);
}

TEST(Backend, LargeRegisterMps) {
  auto b = make_backend("mps");
  auto buf = buffer(85);
  std::vector<Instruction> program;
  for (std::size_t q = 0; q < 85; ++q) program.push_back(make_gate(GateKind::H, {q}));
  program.push_back(make_measure(84, 0));
  const auto r = execute(*b, program, buf, 1000, 3);
  EXPECT_EQ(r.memory_estimate_bytes, 2720u);
  EXPECT_EQ(r.counts.size(), 2u);
}
