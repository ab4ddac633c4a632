#include <sstream>

#include <gtest/gtest.h>

#include "mpsqvm/bench.hpp"

using namespace mpsqvm;

namespace {

const TruncationPolicy exact{0.0, std::nullopt, CutoffMode::Relative};

}  // namespace

TEST(RoundCircuit, StartsWithHadamardLayer) {
  const auto c = generate_round_circuit({5, 2, 1});
  for (std::size_t q = 0; q < 5; ++q) EXPECT_EQ(c[q], make_gate(GateKind::H, {q}));
  std::size_t h = 0;
  for (const auto& inst : c) h += inst.kind == GateKind::H;
  EXPECT_EQ(h, 5u);
}

TEST(RoundCircuit, Structure) {
  const auto c = generate_round_circuit({6, 3, 9});
  // 6 H + per round 6 one-qubit gates, then 3 or 2 CNOTs.
  EXPECT_EQ(c.size(), 6u + (6 + 3) + (6 + 2) + (6 + 3));
  EXPECT_EQ(c[12], make_gate(GateKind::CNOT, {0, 1}));
  EXPECT_EQ(c[21], make_gate(GateKind::CNOT, {1, 2}));
  for (const auto& inst : c) {
    if (inst.kind == GateKind::RX || inst.kind == GateKind::RY || inst.kind == GateKind::RZ) {
      EXPECT_GE(inst.angle(), 0.0);
      EXPECT_LT(inst.angle(), 2 * std::numbers::pi);
    }
  }
}

TEST(RoundCircuit, DeterministicAndNested) {
  EXPECT_EQ(generate_round_circuit({7, 3, 4}), generate_round_circuit({7, 3, 4}));
  EXPECT_NE(generate_round_circuit({7, 3, 4}), generate_round_circuit({7, 3, 5}));
  const auto shorter = generate_round_circuit({7, 3, 4});
  const auto longer = generate_round_circuit({7, 4, 4});
  ASSERT_LT(shorter.size(), longer.size());
  EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
}

TEST(RoundCircuit, Rejects) {
  EXPECT_THROW(generate_round_circuit({1, 2, 1}), std::invalid_argument);
  EXPECT_THROW(generate_round_circuit({4, 0, 1}), std::invalid_argument);
  EXPECT_THROW(generate_round_circuit({4, 1, 1, {}}), std::invalid_argument);
  EXPECT_THROW(generate_round_circuit({4, 1, 1, {GateKind::CNOT}}), std::invalid_argument);
}

TEST(Simulate, TwoRoundsGiveBondFour) {
  for (std::size_t n : {5, 10, 20, 40}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto r = simulate_circuit(generate_round_circuit({n, 2, seed}), n, exact, {});
      EXPECT_FALSE(r.skipped);
      EXPECT_EQ(r.max_bond_seen, 4u) << n << " " << seed;
    }
  }
}

TEST(Simulate, BondGrowsWithRoundsUntilSaturation) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    std::size_t prev = 0;
    for (std::size_t m = 1; m <= 12; ++m) {
      const auto r = simulate_circuit(generate_round_circuit({8, m, seed}), 8, exact, {});
      EXPECT_GE(r.max_bond_seen, prev);
      EXPECT_LE(r.max_bond_seen, 16u);
      prev = r.max_bond_seen;
    }
    EXPECT_EQ(prev, 16u);
  }
}

TEST(Simulate, BudgetSkips) {
  const auto c = generate_round_circuit({12, 12, 1});
  EXPECT_TRUE(simulate_circuit(c, 12, exact, {8, 60.0}).skipped);
  EXPECT_TRUE(simulate_circuit(c, 12, exact, {4096, 0.0}).skipped);
}

TEST(Simulate, ObserverSeesEveryStep) {
  const auto c = generate_round_circuit({6, 2, 1});
  std::size_t calls = 0;
  simulate_circuit(c, 6, exact, {}, [&](const MpsState& s) {
    ++calls;
    EXPECT_LE(s.memory_estimate(), 16 * (2 * 6 * s.max_bond() * s.max_bond() + 5 * s.max_bond()));
  });
  EXPECT_EQ(calls, c.size());
}

TEST(Stats, MeanAndSampleStd) {
  const auto [m, s] = mean_and_std({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m, 5.0);
  EXPECT_NEAR(s, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(mean_and_std({3}).second, 0.0);
}

TEST(Grid, SmallGridRecords) {
  GridOptions opt;
  opt.seeds_per_cell = 2;
  const auto recs = run_grid({5, 10}, {2}, opt);
  ASSERT_EQ(recs.size(), 2u);
  for (const auto& r : recs) {
    EXPECT_FALSE(r.skipped);
    EXPECT_EQ(r.max_chi, 4u);
    EXPECT_EQ(r.seeds, (std::vector<std::uint64_t>{1, 2}));
    EXPECT_GT(r.mean_bytes, 0.0);
  }
  opt.jobs = 3;
  const auto par = run_grid({5, 10}, {2}, opt);
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].bytes, par[i].bytes);
}

TEST(Grid, DefaultAxes) {
  EXPECT_EQ(default_bench_qubits().size() * default_bench_rounds().size(), 85u);
  EXPECT_EQ(default_bench_qubits().back(), 85u);
}

TEST(Report, Rows) {
  BenchRecord ok;
  ok.n = 5;
  ok.rounds = 2;
  ok.seeds = {1, 2};
  ok.mean_bytes = 1024;
  ok.std_bytes = 0.5;
  ok.mean_chi = 4;
  ok.max_chi = 4;
  BenchRecord skip;
  skip.n = 85;
  skip.rounds = 10;
  skip.seeds = {1};
  skip.skipped = true;
  std::ostringstream csv;
  emit_report({ok, skip}, csv);
  EXPECT_EQ(csv.str(),
            "n,rounds,mean_bytes,std_bytes,mean_chi,max_chi,skipped,seeds\n"
            "5,2,1024,0.5,4,4,false,1:2\n"
            "85,10,,,,,true,1:1\n");
  std::ostringstream plot;
  emit_plot_data({ok, skip}, plot);
  EXPECT_EQ(plot.str(), "# rounds n mean_bytes std_bytes\n2 5 1024 0.5\n\n# 10 85 skipped\n");
  std::ostringstream none;
  EXPECT_THROW(emit_report({}, none), std::invalid_argument);
}
