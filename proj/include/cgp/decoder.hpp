#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cgp/functions.hpp"
#include "cgp/genome.hpp"

namespace cgp {

// Backward search from the output genes. Returns the reachable function-node
// indices in ascending order, which is a valid evaluation order because every
// connection gene points to a lower node index. Functions of arity a < n_a
// only read their first a connection genes.
inline std::vector<std::size_t> active_nodes(const IntGenotype& g, const Layout& layout) {
  const std::size_t terminals = layout.terminals();
  std::vector<char> reached(terminals + layout.nodes(), 0);
  for (std::size_t o = 0; o < layout.outputs; ++o) reached[g[layout.output_begin() + o]] = 1;

  for (std::size_t ordinal = layout.nodes(); ordinal-- > 0;) {
    if (!reached[terminals + ordinal]) continue;
    const std::size_t arity = layout.function_arities[g[layout.function_position(ordinal)]];
    for (std::size_t k = 0; k < arity; ++k) reached[g[layout.connection_position(ordinal, k)]] = 1;
  }

  std::vector<std::size_t> active;
  for (std::size_t idx = terminals; idx < reached.size(); ++idx) {
    if (reached[idx]) active.push_back(idx);
  }
  return active;
}

template <class Gene>
std::vector<std::size_t> active_nodes(const Genotype<Gene>& g, const Layout& layout) {
  return active_nodes(to_integer(g, layout), layout);
}

namespace detail {

// Contiguous copyable buffer; std::vector<bool> is bit-packed and has no data().
template <class E>
class Slots {
 public:
  explicit Slots(std::size_t n = 0) : size_(n), data_(new E[n]()) {}
  Slots(const Slots& o) : Slots(o.size_) { std::copy_n(o.data_.get(), size_, data_.get()); }
  Slots(Slots&&) noexcept = default;
  Slots& operator=(const Slots& o) {
    if (this != &o) *this = Slots(o);
    return *this;
  }
  Slots& operator=(Slots&&) noexcept = default;

  std::size_t size() const noexcept { return size_; }
  E* data() noexcept { return data_.get(); }
  const E* data() const noexcept { return data_.get(); }
  E* begin() noexcept { return data_.get(); }
  E* end() noexcept { return data_.get() + size_; }
  E& operator[](std::size_t i) noexcept { return data_[i]; }
  const E& operator[](std::size_t i) const noexcept { return data_[i]; }

 private:
  std::size_t size_ = 0;
  std::unique_ptr<E[]> data_;
};

}  // namespace detail

// Phenotype evaluator over evaluation type E. Decoding (`load`) computes the
// active nodes once; `run` then evaluates them in order on one input vector,
// applying each active function exactly once and keeping one value per node.
// Not thread-safe: each evaluation worker owns its own instance.
template <class E>
class Decoder {
 public:
  Decoder(Layout layout, FunctionSet<E> functions, std::vector<E> constants = {})
      : layout_(std::move(layout)), functions_(std::move(functions)), constants_(std::move(constants)) {
    if (constants_.size() != layout_.constants) {
      throw ContractError("decoder constants do not match layout");
    }
    if (functions_.arities() != layout_.function_arities) {
      throw ContractError("decoder function set does not match layout");
    }
    values_ = detail::Slots<E>(layout_.terminals() + layout_.nodes());
    args_ = detail::Slots<E>(layout_.arity == 0 ? 1 : layout_.arity);
  }

  const Layout& layout() const noexcept { return layout_; }
  const FunctionSet<E>& functions() const noexcept { return functions_; }
  const std::vector<E>& constants() const noexcept { return constants_; }

  template <class Gene>
  void load(const Genotype<Gene>& g) {
    if constexpr (is_real_gene_v<Gene>) {
      load(to_integer(g, layout_));
    } else {
      active_ = active_nodes(g, layout_);
      steps_.clear();
      sources_.clear();
      for (auto idx : active_) {
        const std::size_t ordinal = layout_.ordinal(idx);
        const auto fn = g[layout_.function_position(ordinal)];
        steps_.push_back({static_cast<std::uint32_t>(idx), fn,
                          static_cast<std::uint32_t>(sources_.size())});
        for (std::size_t k = 0; k < functions_[fn].arity; ++k) {
          sources_.push_back(g[layout_.connection_position(ordinal, k)]);
        }
      }
      output_sources_.assign(g.genes.begin() + static_cast<std::ptrdiff_t>(layout_.output_begin()),
                             g.genes.end());
    }
  }

  // Evaluates the loaded program; inputs.size() == n_inputs, outputs.size() == n_outputs.
  void run(std::span<const E> inputs, std::span<E> outputs) {
    if (inputs.size() != layout_.inputs || outputs.size() != layout_.outputs) {
      throw ContractError("decoder: input/output arity mismatch");
    }
    std::copy(inputs.begin(), inputs.end(), values_.begin());
    std::copy(constants_.begin(), constants_.end(),
              values_.begin() + static_cast<std::ptrdiff_t>(layout_.inputs));
    for (const auto& step : steps_) {
      const auto& fn = functions_[step.function];
      for (std::size_t k = 0; k < fn.arity; ++k) args_[k] = values_[sources_[step.first_source + k]];
      values_[step.node] = fn.apply(args_.data());
    }
    applications_ += steps_.size();
    for (std::size_t o = 0; o < outputs.size(); ++o) outputs[o] = values_[output_sources_[o]];
  }

  template <class Gene>
  std::vector<E> evaluate(const Genotype<Gene>& g, std::span<const E> inputs) {
    load(g);
    detail::Slots<E> out(layout_.outputs);
    run(inputs, std::span<E>(out.data(), out.size()));
    return std::vector<E>(out.begin(), out.end());
  }

  template <class Gene>
  std::vector<E> evaluate(const Genotype<Gene>& g, std::initializer_list<E> inputs) {
    return evaluate(g, std::span<const E>(inputs.begin(), inputs.size()));
  }

  // Active node indices of the last loaded genotype.
  const std::vector<std::size_t>& active() const noexcept { return active_; }

  // Number of function applications performed since construction or reset.
  std::uint64_t applications() const noexcept { return applications_; }
  void reset_applications() noexcept { applications_ = 0; }

 private:
  struct Step {
    std::uint32_t node;
    IntGene function;
    std::uint32_t first_source;
  };

  Layout layout_;
  FunctionSet<E> functions_;
  std::vector<E> constants_;
  std::vector<std::size_t> active_;
  std::vector<Step> steps_;
  std::vector<IntGene> sources_;
  std::vector<IntGene> output_sources_;
  detail::Slots<E> values_;
  detail::Slots<E> args_;
  std::uint64_t applications_ = 0;
};

// Bit-parallel Boolean evaluation: bit k of each output word is the program
// evaluated on bit k of every input word.
template <class Gene>
std::vector<std::uint64_t> evaluate_packed(const Genotype<Gene>& g, const Layout& layout,
                                           const FunctionSet<std::uint64_t>& functions,
                                           std::span<const std::uint64_t> input_words) {
  if (!functions.all_bitwise()) {
    throw ConfigError("functions", "packed evaluation needs a bitwise function set");
  }
  Decoder<std::uint64_t> decoder(layout, functions);
  return decoder.evaluate(g, input_words);
}

namespace detail {

inline std::string terminal_name(std::size_t idx, const Layout& layout) {
  return idx < layout.inputs ? "x" + std::to_string(idx) : "c" + std::to_string(idx - layout.inputs);
}

inline std::size_t saturating_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max()
                                                         : a + b;
}

}  // namespace detail

// Character count of each output expression of decode_expression, saturating.
// Shared subgraphs are expanded, so sizes can grow exponentially with depth.
template <class Gene>
std::vector<std::size_t> expression_sizes(const Genotype<Gene>& genotype, const Layout& layout,
                                          const std::vector<std::string>& names) {
  const auto g = to_integer(genotype, layout);
  std::vector<std::size_t> size(layout.terminals() + layout.nodes(), 0);
  for (std::size_t t = 0; t < layout.terminals(); ++t) size[t] = detail::terminal_name(t, layout).size();
  for (auto idx : active_nodes(g, layout)) {
    const std::size_t ordinal = layout.ordinal(idx);
    const auto fn = g[layout.function_position(ordinal)];
    const std::size_t arity = layout.function_arities[fn];
    std::size_t s = names[fn].size() + 2 + (arity > 0 ? arity - 1 : 0);
    for (std::size_t k = 0; k < arity; ++k) {
      s = detail::saturating_add(s, size[g[layout.connection_position(ordinal, k)]]);
    }
    size[idx] = s;
  }
  std::vector<std::size_t> out;
  for (std::size_t o = 0; o < layout.outputs; ++o) out.push_back(size[g[layout.output_begin() + o]]);
  return out;
}

// Fully parenthesized prefix form per output, e.g. `AND(x0,OR(x1,c0))`.
// Inputs are x0.., ERC constants c0.., functions use their set names.
template <class Gene>
std::vector<std::string> decode_expression(const Genotype<Gene>& genotype, const Layout& layout,
                                           const std::vector<std::string>& names) {
  const auto g = to_integer(genotype, layout);
  std::vector<std::string> text(layout.terminals() + layout.nodes());
  for (std::size_t t = 0; t < layout.terminals(); ++t) text[t] = detail::terminal_name(t, layout);
  for (auto idx : active_nodes(g, layout)) {
    const std::size_t ordinal = layout.ordinal(idx);
    const auto fn = g[layout.function_position(ordinal)];
    std::string s = names[fn] + "(";
    for (std::size_t k = 0; k < layout.function_arities[fn]; ++k) {
      if (k) s += ',';
      s += text[g[layout.connection_position(ordinal, k)]];
    }
    s += ')';
    text[idx] = std::move(s);
  }
  std::vector<std::string> out;
  for (std::size_t o = 0; o < layout.outputs; ++o) out.push_back(text[g[layout.output_begin() + o]]);
  return out;
}

}  // namespace cgp
