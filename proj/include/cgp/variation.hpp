#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>

#include "cgp/decoder.hpp"
#include "cgp/genome.hpp"
#include "cgp/pipeline.hpp"
#include "cgp/random.hpp"

namespace cgp {

// Integer value a gene decodes to at `position`.
template <class Gene>
IntGene decoded_gene(const Genotype<Gene>& g, std::size_t position, const Layout& layout) {
  if constexpr (is_real_gene_v<Gene>) {
    return discretize_real_gene(g[position], position, layout);
  } else {
    return g[position];
  }
}

// Each gene, with probability `rate`, moves to a different value drawn
// uniformly from its valid set. Genes with a single valid value never change.
template <class Gene, class URBG>
Genotype<Gene> point_mutation(Genotype<Gene> g, const Layout& layout, double rate, URBG& rng) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!coin(rng, rate)) continue;
    const auto bounds = gene_bounds(i, layout);
    if (bounds.size() < 2) continue;
    const std::size_t current = bounds.rank(decoded_gene(g, i, layout));
    std::size_t k = uniform_index(rng, bounds.size() - 1);
    if (k >= current) ++k;
    g[i] = encode_gene<Gene>(bounds, bounds.at(k), rng);
  }
  return g;
}

// With probability `rate`, reverses the function genes of a random run of
// 2..max_segment consecutive active nodes. Connection genes are untouched.
template <class Gene, class URBG>
Genotype<Gene> inversion_mutation(Genotype<Gene> g, const Layout& layout, double rate,
                                  std::size_t max_segment, URBG& rng) {
  if (!coin(rng, rate)) return g;
  const auto active = active_nodes(g, layout);
  const std::size_t longest = std::min(max_segment, active.size());
  if (longest < 2) return g;
  const std::size_t length = 2 + uniform_index(rng, longest - 1);
  const std::size_t start = uniform_index(rng, active.size() - length + 1);
  for (std::size_t i = 0, j = length - 1; i < j; ++i, --j) {
    std::swap(g[layout.function_position(layout.ordinal(active[start + i]))],
              g[layout.function_position(layout.ordinal(active[start + j]))]);
  }
  return g;
}

// With probability `rate`, copies the function gene of a random active node
// onto the next 1..max_segment active nodes.
template <class Gene, class URBG>
Genotype<Gene> duplication_mutation(Genotype<Gene> g, const Layout& layout, double rate,
                                    std::size_t max_segment, URBG& rng) {
  if (!coin(rng, rate)) return g;
  const auto active = active_nodes(g, layout);
  if (active.size() < 2 || max_segment < 1) return g;
  const std::size_t source = uniform_index(rng, active.size() - 1);
  const std::size_t length = 1 + uniform_index(rng, std::min(max_segment, active.size() - 1 - source));
  const Gene value = g[layout.function_position(layout.ordinal(active[source]))];
  for (std::size_t j = 1; j <= length; ++j) {
    g[layout.function_position(layout.ordinal(active[source + j]))] = value;
  }
  return g;
}

template <class Gene, class URBG>
Genotype<Gene> apply_pipeline(Genotype<Gene> g, const Layout& layout,
                              const MutationPipeline& pipeline, URBG& rng) {
  for (const auto& stage : pipeline.stages) {
    switch (stage.op) {
      case MutationOp::point:
        g = point_mutation(std::move(g), layout, stage.rate, rng);
        break;
      case MutationOp::inversion:
        g = inversion_mutation(std::move(g), layout, stage.rate, stage.max_segment, rng);
        break;
      case MutationOp::duplication:
        g = duplication_mutation(std::move(g), layout, stage.rate, stage.max_segment, rng);
        break;
    }
  }
  return g;
}

namespace detail {

template <class Gene>
void check_parents(const Genotype<Gene>& a, const Genotype<Gene>& b, const Layout& layout) {
  if (a.size() != layout.length() || b.size() != layout.length()) {
    throw ContractError("crossover parents do not match the genotype layout");
  }
}

}  // namespace detail

// Every node group (function + connection genes) and every output gene is
// inherited from parent a or b with probability 1/2 each.
template <class Gene, class URBG>
Genotype<Gene> discrete_crossover(const Genotype<Gene>& a, const Genotype<Gene>& b,
                                  const Layout& layout, URBG& rng) {
  detail::check_parents(a, b, layout);
  Genotype<Gene> child = a;
  const std::size_t group = layout.group_size();
  for (std::size_t node = 0; node < layout.nodes(); ++node) {
    if (coin(rng, 0.5)) continue;
    std::copy_n(b.genes.begin() + static_cast<std::ptrdiff_t>(node * group), group,
                child.genes.begin() + static_cast<std::ptrdiff_t>(node * group));
  }
  for (std::size_t o = layout.output_begin(); o < layout.length(); ++o) {
    if (!coin(rng, 0.5)) child[o] = b[o];
  }
  return child;
}

// Swaps one random contiguous run of `block_size` node groups between the parents.
template <class Gene, class URBG>
std::pair<Genotype<Gene>, Genotype<Gene>> block_crossover(const Genotype<Gene>& a,
                                                          const Genotype<Gene>& b,
                                                          const Layout& layout,
                                                          std::size_t block_size, URBG& rng) {
  detail::check_parents(a, b, layout);
  if (block_size < 1 || block_size > layout.nodes()) {
    throw ValidationError("block_size", "block_size must be in [1, " +
                                            std::to_string(layout.nodes()) + "], got " +
                                            std::to_string(block_size));
  }
  const std::size_t start = uniform_index(rng, layout.nodes() - block_size + 1);
  auto first = static_cast<std::ptrdiff_t>(start * layout.group_size());
  auto last = static_cast<std::ptrdiff_t>((start + block_size) * layout.group_size());
  std::pair<Genotype<Gene>, Genotype<Gene>> out{a, b};
  std::swap_ranges(out.first.genes.begin() + first, out.first.genes.begin() + last,
                   out.second.genes.begin() + first);
  return out;
}

}  // namespace cgp
