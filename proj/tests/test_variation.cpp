#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <vector>

#include "cgp/variation.hpp"
#include "oracles.hpp"

using namespace cgp;

namespace {

Layout layout(std::size_t n_i, std::size_t n_c, std::size_t n_functions, std::size_t n_r = 1,
              std::size_t n_o = 1) {
  Parameters p;
  p.n_inputs = n_i;
  p.n_outputs = n_o;
  p.n_rows = n_r;
  p.n_columns = n_c;
  p.max_arity = 2;
  p.levels_back = n_c;
  return Layout::make(p, std::vector<std::size_t>(n_functions, 2));
}

// A URBG whose every draw is zero.
struct ZeroRng {
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return 0; }
};

// Chain x0 -> n2 -> n3 -> n4 on a 1x3 grid with three functions {0,1,2}; all active.
IntGenotype chain() { return IntGenotype{{0, 0, 1, 1, 2, 0, 2, 3, 0, 4}}; }

std::vector<IntGene> function_genes(const IntGenotype& g, const Layout& l) {
  std::vector<IntGene> out;
  for (std::size_t n = 0; n < l.nodes(); ++n) out.push_back(g[l.function_position(n)]);
  return out;
}

}  // namespace

TEST(PointMutation, RateZeroIsIdentity) {
  const auto l = layout(3, 20, 4);
  Rng rng(1);
  const auto g = random_genotype<IntGene>(l, rng);
  EXPECT_EQ(point_mutation(g, l, 0.0, rng), g);
}

TEST(PointMutation, RateOneChangesEveryNonSingletonGene) {
  const auto l = layout(3, 20, 4);
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_genotype<IntGene>(l, rng);
    const auto m = point_mutation(g, l, 1.0, rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (gene_bounds(i, l).size() >= 2) {
        ASSERT_NE(m[i], g[i]) << i;
      }
    }
  }
}

TEST(PointMutation, SingletonGenesNeverChange) {
  const auto l = layout(1, 5, 1);  // one function, first column reads only x0
  Rng rng(3);
  const auto g = random_genotype<IntGene>(l, rng);
  const auto m = point_mutation(g, l, 1.0, rng);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (gene_bounds(i, l).size() == 1) {
      EXPECT_EQ(m[i], g[i]);
    }
  }
}

TEST(PointMutation, BinomialChangeCount) {
  // 333 nodes x 3 genes + 1 output gene; every valid set has at least two values.
  const auto l = layout(2, 333, 2);
  ASSERT_EQ(l.length(), 1000u);
  std::size_t eligible = 0;
  for (std::size_t i = 0; i < l.length(); ++i) eligible += gene_bounds(i, l).size() >= 2;
  Rng rng(4);
  const auto g = random_genotype<IntGene>(l, rng);
  double total = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto m = point_mutation(g, l, 0.1, rng);
    for (std::size_t i = 0; i < g.size(); ++i) total += m[i] != g[i];
  }
  // Mean of Binomial(eligible, 0.1).
  EXPECT_NEAR(total / 10000.0, 0.1 * static_cast<double>(eligible), 5.0);
  EXPECT_EQ(eligible, 1000u);
}

TEST(PointMutation, RealGenesResampleToDifferentBucket) {
  const auto l = layout(3, 10, 4);
  Rng rng(5);
  const auto g = random_genotype<double>(l, rng);
  const auto m = point_mutation(g, l, 1.0, rng);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (gene_bounds(i, l).size() >= 2) {
      ASSERT_NE(discretize_real_gene(m[i], i, l), discretize_real_gene(g[i], i, l));
    }
  }
  EXPECT_TRUE(validate(m, l).empty());
}

TEST(Inversion, ReversesWholeActiveRun) {
  const auto l = layout(2, 3, 3);
  const auto g = chain();
  ASSERT_EQ(active_nodes(g, l).size(), 3u);
  // Some draw picks the full three-node segment.
  bool seen_full = false;
  Rng rng(6);
  for (int i = 0; i < 200 && !seen_full; ++i) {
    const auto m = inversion_mutation(g, l, 1.0, 3, rng);
    if (function_genes(m, l) == std::vector<IntGene>{2, 1, 0}) seen_full = true;
  }
  EXPECT_TRUE(seen_full);
  EXPECT_EQ(inversion_mutation(g, l, 0.0, 3, rng), g);
}

TEST(Inversion, ConnectionGenesUntouched) {
  const auto l = layout(2, 3, 3);
  Rng rng(7);
  const auto g = chain();
  for (int i = 0; i < 100; ++i) {
    const auto m = inversion_mutation(g, l, 1.0, 4, rng);
    for (std::size_t n = 0; n < l.nodes(); ++n) {
      for (std::size_t k = 0; k < l.arity; ++k) {
        ASSERT_EQ(m[l.connection_position(n, k)], g[l.connection_position(n, k)]);
      }
    }
    ASSERT_EQ(m[9], g[9]);
  }
}

TEST(Inversion, NoActiveNodesIsIdentity) {
  const auto l = layout(2, 3, 3);
  auto g = chain();
  g[9] = 1;
  Rng rng(8);
  EXPECT_EQ(inversion_mutation(g, l, 1.0, 4, rng), g);
  EXPECT_EQ(duplication_mutation(g, l, 1.0, 4, rng), g);
}

TEST(Duplication, CopiesSourceFunction) {
  const auto l = layout(2, 3, 3);
  const auto g = chain();
  Rng rng(9);
  bool seen = false;
  for (int i = 0; i < 200 && !seen; ++i) {
    if (function_genes(duplication_mutation(g, l, 1.0, 2, rng), l) == std::vector<IntGene>{0, 0, 0}) seen = true;
  }
  EXPECT_TRUE(seen);
  EXPECT_EQ(duplication_mutation(g, l, 0.0, 2, rng), g);
}

TEST(Duplication, SingleFunctionSetLeavesFunctionsAlone) {
  const auto l = layout(2, 6, 1);
  Rng rng(10);
  const auto g = random_genotype<IntGene>(l, rng);
  EXPECT_EQ(duplication_mutation(g, l, 1.0, 4, rng), g);
}

TEST(Variation, InactiveGenesSafeUnderInversionAndDuplication) {
  std::mt19937_64 prng(11);
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = oracle::random_small_parameters(prng, 4, 10);
    const auto l = Layout::make(p, {2, 2, 2, 1});
    const auto g = random_genotype<IntGene>(l, rng);
    const auto active = active_nodes(g, l);
    std::vector<char> is_active(l.nodes(), 0);
    for (auto a : active) is_active[l.ordinal(a)] = 1;
    for (const auto& m : {inversion_mutation(g, l, 1.0, 4, rng), duplication_mutation(g, l, 1.0, 4, rng)}) {
      for (std::size_t n = 0; n < l.nodes(); ++n) {
        if (is_active[n]) continue;
        for (std::size_t k = 0; k <= l.arity; ++k) ASSERT_EQ(m[n * l.group_size() + k], g[n * l.group_size() + k]);
      }
    }
  }
}

TEST(Pipeline, SingleStageEqualsOperator) {
  const auto l = layout(3, 20, 4);
  Rng seed(12);
  const auto g = random_genotype<IntGene>(l, seed);
  Rng a(99), b(99);
  EXPECT_EQ(apply_pipeline(g, l, parse_pipeline("point:1"), a), point_mutation(g, l, 1.0, b));
  Rng c(5);
  EXPECT_EQ(apply_pipeline(g, l, parse_pipeline("point:0, inversion:0:4, duplication:0:4"), c), g);
}

TEST(Pipeline, OrderMatters) {
  // Some seed makes the two stage orders produce different genotypes.
  const auto l = layout(2, 3, 3);
  const auto g = chain();
  bool differs = false;
  for (std::uint64_t s = 0; s < 50 && !differs; ++s) {
    Rng a(s), b(s);
    const auto x = apply_pipeline(g, l, parse_pipeline("inversion:1:3, duplication:1:1"), a);
    const auto y = apply_pipeline(g, l, parse_pipeline("duplication:1:1, inversion:1:3"), b);
    differs = x != y;
  }
  EXPECT_TRUE(differs);
}

TEST(DiscreteCrossover, EqualParentsAndForcedChoice) {
  const auto l = layout(3, 10, 4);
  Rng rng(13);
  const auto a = random_genotype<IntGene>(l, rng);
  const auto b = random_genotype<IntGene>(l, rng);
  EXPECT_EQ(discrete_crossover(a, a, l, rng), a);
  ZeroRng zero;
  EXPECT_EQ(discrete_crossover(a, b, l, zero), a);
}

TEST(DiscreteCrossover, UnitInheritanceFrequency) {
  const auto l = layout(3, 10, 4, 1, 2);
  IntGenotype a{std::vector<IntGene>(l.length(), 0)};
  IntGenotype b = a;
  for (std::size_t n = 0; n < l.nodes(); ++n) b[l.function_position(n)] = 1;
  b[l.output_begin()] = 1;
  b[l.output_begin() + 1] = 2;
  Rng rng(14);
  std::vector<int> from_b(l.nodes() + 2, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto c = discrete_crossover(a, b, l, rng);
    ASSERT_TRUE(validate(c, l).empty());
    for (std::size_t n = 0; n < l.nodes(); ++n) from_b[n] += c[l.function_position(n)] == 1;
    from_b[l.nodes()] += c[l.output_begin()] == 1;
    from_b[l.nodes() + 1] += c[l.output_begin() + 1] == 2;
  }
  for (auto count : from_b) EXPECT_NEAR(count / 10000.0, 0.5, 0.02);
}

TEST(DiscreteCrossover, MismatchedParents) {
  const auto l = layout(3, 10, 4);
  Rng rng(15);
  const auto a = random_genotype<IntGene>(l, rng);
  IntGenotype shorter{std::vector<IntGene>(a.size() - 1, 0)};
  EXPECT_THROW(discrete_crossover(a, shorter, l, rng), ContractError);
  EXPECT_THROW(block_crossover(a, shorter, l, 1, rng), ContractError);
}

TEST(BlockCrossover, Examples) {
  const auto l = layout(3, 6, 4);
  Rng rng(16);
  const auto a = random_genotype<IntGene>(l, rng);
  auto b = random_genotype<IntGene>(l, rng);
  const auto same = block_crossover(a, a, l, 3, rng);
  EXPECT_EQ(same.first, a);
  EXPECT_EQ(same.second, a);

  b[l.output_begin()] = a[l.output_begin()];
  const auto full = block_crossover(a, b, l, l.nodes(), rng);
  EXPECT_EQ(full.first, b);
  EXPECT_EQ(full.second, a);

  EXPECT_THROW(block_crossover(a, b, l, 0, rng), ValidationError);
  EXPECT_THROW(block_crossover(a, b, l, l.nodes() + 1, rng), ValidationError);
}

TEST(BlockCrossover, SingleGroupSwap) {
  const auto l = layout(3, 6, 4);
  IntGenotype a{std::vector<IntGene>(l.length(), 0)};
  IntGenotype b = a;
  for (std::size_t n = 0; n < l.nodes(); ++n) b[l.function_position(n)] = 1;
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [x, y] = block_crossover(a, b, l, 1, rng);
    std::size_t dx = 0, dy = 0;
    for (std::size_t n = 0; n < l.nodes(); ++n) {
      dx += x[l.function_position(n)] != a[l.function_position(n)];
      dy += y[l.function_position(n)] != b[l.function_position(n)];
    }
    ASSERT_EQ(dx, 1u);
    ASSERT_EQ(dy, 1u);
  }
}

TEST(Variation, Determinism) {
  const auto l = layout(3, 10, 4);
  Rng seed(18);
  const auto g = random_genotype<IntGene>(l, seed);
  const auto h = random_genotype<IntGene>(l, seed);
  const auto pipe = parse_pipeline("point:0.2, inversion:0.5:4, duplication:0.5:4");
  Rng a(7), b(7);
  for (int i = 0; i < 20; ++i) {
    ASSERT_EQ(apply_pipeline(g, l, pipe, a), apply_pipeline(g, l, pipe, b));
    ASSERT_EQ(discrete_crossover(g, h, l, a), discrete_crossover(g, h, l, b));
    ASSERT_EQ(block_crossover(g, h, l, 2, a), block_crossover(g, h, l, 2, b));
  }
}
