#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cgp/config.hpp"
#include "cgp/error.hpp"
#include "cgp/random.hpp"

namespace cgp {

using IntGene = std::uint32_t;

// Fixed-length gene vector: n_r*n_c groups of (function gene, n_a connection
// genes) followed by n_o output genes. Integer genes hold indices directly;
// real genes hold values in [0, 1) that discretize onto the same index sets.
template <class Gene>
struct Genotype {
  static_assert(std::is_same_v<Gene, IntGene> || std::is_floating_point_v<Gene>);
  using gene_type = Gene;

  std::vector<Gene> genes;

  std::size_t size() const noexcept { return genes.size(); }
  Gene& operator[](std::size_t i) { return genes[i]; }
  const Gene& operator[](std::size_t i) const { return genes[i]; }
  bool operator==(const Genotype&) const = default;
};

using IntGenotype = Genotype<IntGene>;
using RealGenotype = Genotype<double>;

template <class Gene>
inline constexpr bool is_real_gene_v = std::is_floating_point_v<Gene>;

// Structural description of the graph. Node indices: terminals (inputs, then
// constants) first, then function nodes column-major (n_terminals + c*rows + r).
struct Layout {
  std::size_t inputs = 0;
  std::size_t constants = 0;
  std::size_t outputs = 0;
  std::size_t rows = 1;
  std::size_t columns = 0;
  std::size_t arity = 0;
  std::size_t levels_back = 0;
  std::vector<std::size_t> function_arities;

  static Layout make(const Parameters& p, std::vector<std::size_t> arities,
                     std::size_t constant_count = 0) {
    Layout l;
    l.inputs = p.n_inputs;
    l.constants = constant_count;
    l.outputs = p.n_outputs;
    l.rows = p.n_rows;
    l.columns = p.n_columns;
    l.arity = p.max_arity;
    l.levels_back = p.levels_back;
    l.function_arities = std::move(arities);
    for (auto a : l.function_arities) {
      if (a > l.arity) {
        throw ValidationError("max_arity", "max_arity " + std::to_string(l.arity) +
                                               " is below a function arity of " + std::to_string(a));
      }
    }
    if (l.function_arities.empty()) throw ConfigError("functions", "function set must be non-empty");
    return l;
  }

  std::size_t functions() const noexcept { return function_arities.size(); }
  std::size_t terminals() const noexcept { return inputs + constants; }
  std::size_t nodes() const noexcept { return rows * columns; }
  std::size_t group_size() const noexcept { return arity + 1; }
  std::size_t output_begin() const noexcept { return nodes() * group_size(); }
  std::size_t length() const noexcept { return output_begin() + outputs; }
  std::size_t node_index(std::size_t ordinal) const noexcept { return terminals() + ordinal; }
  std::size_t ordinal(std::size_t node_index) const noexcept { return node_index - terminals(); }
  std::size_t column(std::size_t ordinal) const noexcept { return ordinal / rows; }
  std::size_t function_position(std::size_t ordinal) const noexcept {
    return ordinal * group_size();
  }
  std::size_t connection_position(std::size_t ordinal, std::size_t k) const noexcept {
    return ordinal * group_size() + 1 + k;
  }
  bool operator==(const Layout&) const = default;
};

inline std::size_t genotype_length(const Parameters& p) {
  return p.n_rows * p.n_columns * (p.max_arity + 1) + p.n_outputs;
}

enum class GeneKind { function, connection, output };

// Valid values of one gene position: [0, low_end) followed by [high_begin, high_end).
struct GeneBounds {
  std::size_t position = 0;
  GeneKind kind = GeneKind::function;
  IntGene low_end = 0;
  IntGene high_begin = 0;
  IntGene high_end = 0;

  std::size_t size() const noexcept { return low_end + (high_end - high_begin); }
  IntGene at(std::size_t k) const noexcept {
    return k < low_end ? static_cast<IntGene>(k) : static_cast<IntGene>(high_begin + (k - low_end));
  }
  bool contains(IntGene v) const noexcept {
    return v < low_end || (v >= high_begin && v < high_end);
  }
  // Rank of v within the ordered valid set; v must be contained.
  std::size_t rank(IntGene v) const noexcept { return v < low_end ? v : low_end + (v - high_begin); }
  std::vector<IntGene> values() const {
    std::vector<IntGene> out;
    for (std::size_t k = 0; k < size(); ++k) out.push_back(at(k));
    return out;
  }
};

inline GeneBounds gene_bounds(std::size_t position, const Layout& layout) {
  if (position >= layout.length()) {
    throw RangeError("gene position " + std::to_string(position) + " outside genotype of length " +
                     std::to_string(layout.length()));
  }
  GeneBounds b;
  b.position = position;
  if (position >= layout.output_begin()) {
    b.kind = GeneKind::output;
    b.low_end = static_cast<IntGene>(layout.terminals() + layout.nodes());
  } else if (position % layout.group_size() == 0) {
    b.kind = GeneKind::function;
    b.low_end = static_cast<IntGene>(layout.functions());
  } else {
    b.kind = GeneKind::connection;
    const std::size_t col = layout.column(position / layout.group_size());
    const std::size_t first_col = col > layout.levels_back ? col - layout.levels_back : 0;
    b.low_end = static_cast<IntGene>(layout.terminals());
    b.high_begin = static_cast<IntGene>(layout.terminals() + first_col * layout.rows);
    b.high_end = static_cast<IntGene>(layout.terminals() + col * layout.rows);
  }
  if (b.high_end == b.high_begin) b.high_begin = b.high_end = b.low_end;
  return b;
}

template <class FunctionSetT>
GeneBounds gene_bounds(std::size_t position, const Parameters& p, const FunctionSetT& functions) {
  return gene_bounds(position, Layout::make(p, functions.arities()));
}

// k-th element (k = floor(value * m)) of the size-m valid set at `position`.
inline IntGene discretize_real_gene(double value, std::size_t position, const Layout& layout) {
  if (!(value >= 0.0 && value < 1.0)) {
    throw std::domain_error("real gene value " + format_double(value) + " outside [0, 1)");
  }
  const auto bounds = gene_bounds(position, layout);
  const auto m = bounds.size();
  auto k = static_cast<std::size_t>(std::floor(value * static_cast<double>(m)));
  if (k >= m) k = m - 1;
  return bounds.at(k);
}

// Integer view of a genotype; real genes are discretized position by position.
template <class Gene>
IntGenotype to_integer(const Genotype<Gene>& g, const Layout& layout) {
  if constexpr (is_real_gene_v<Gene>) {
    IntGenotype out;
    out.genes.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = discretize_real_gene(g[i], i, layout);
    return out;
  } else {
    return g;
  }
}

// Value of a gene that decodes to `target` (an element of `bounds`). For real
// genes the value is drawn uniformly from target's discretization bucket.
template <class Gene, class URBG>
Gene encode_gene(const GeneBounds& bounds, IntGene target, URBG& rng) {
  if constexpr (is_real_gene_v<Gene>) {
    const double m = static_cast<double>(bounds.size());
    const double k = static_cast<double>(bounds.rank(target));
    double v = (k + uniform01(rng)) / m;
    if (!(v < 1.0) || static_cast<std::size_t>(std::floor(v * m)) != bounds.rank(target)) {
      v = (k + 0.5) / m;
    }
    return static_cast<Gene>(v);
  } else {
    (void)rng;
    return target;
  }
}

template <class Gene, class URBG>
Genotype<Gene> random_genotype(const Layout& layout, URBG& rng) {
  Genotype<Gene> g;
  g.genes.resize(layout.length());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if constexpr (is_real_gene_v<Gene>) {
      g[i] = static_cast<Gene>(uniform01(rng));
    } else {
      const auto b = gene_bounds(i, layout);
      g[i] = b.at(uniform_index(rng, b.size()));
    }
  }
  return g;
}

struct Violation {
  static constexpr std::size_t kLength = static_cast<std::size_t>(-1);
  std::size_t position = kLength;
  std::string message;
};

template <class Gene>
std::vector<Violation> validate(const Genotype<Gene>& g, const Layout& layout) {
  std::vector<Violation> out;
  if (g.size() != layout.length()) {
    out.push_back({Violation::kLength, "length " + std::to_string(g.size()) + " != expected " +
                                           std::to_string(layout.length())});
    return out;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if constexpr (is_real_gene_v<Gene>) {
      if (!(g[i] >= 0.0 && g[i] < 1.0)) {
        out.push_back({i, "real gene " + format_double(g[i]) + " outside [0, 1)"});
      }
    } else {
      const auto b = gene_bounds(i, layout);
      if (!b.contains(g[i])) {
        out.push_back({i, "gene " + std::to_string(g[i]) + " outside its valid set"});
      }
    }
  }
  return out;
}

// One line, genes space-separated; reals use the shortest round-trip form.
template <class Gene>
std::string to_line(const Genotype<Gene>& g) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ' ';
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, g[i]);
    out.append(buf, ptr);
  }
  return out;
}

template <class Gene>
Genotype<Gene> genotype_from_line(std::string_view line) {
  Genotype<Gene> g;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p != end) {
    if (*p == ' ' || *p == '\t' || *p == '\r') {
      ++p;
      continue;
    }
    Gene v{};
    auto [ptr, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || (ptr != end && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) {
      throw CheckpointError("malformed gene near '" + std::string(p, std::min<std::size_t>(16, end - p)) + "'");
    }
    g.genes.push_back(v);
    p = ptr;
  }
  return g;
}

}  // namespace cgp
