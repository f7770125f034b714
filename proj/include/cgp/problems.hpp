#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cgp/benchmarks.hpp"
#include "cgp/decoder.hpp"
#include "cgp/error.hpp"
#include "cgp/functions.hpp"
#include "cgp/genome.hpp"

namespace cgp {

// Packed truth table. Bit k of row j is entry t = j*word_width + k, and the
// input-i bit of entry t is (t >> i) & 1 (LSB first). Bits past the last
// entry are zero and never scored.
struct TruthTable {
  struct Row {
    std::vector<std::uint64_t> inputs;
    std::vector<std::uint64_t> outputs;
    bool operator==(const Row&) const = default;
  };

  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;
  std::size_t word_width = 64;
  std::vector<Row> rows;

  std::uint64_t total_entries() const noexcept { return std::uint64_t{1} << n_inputs; }

  std::size_t expected_rows() const noexcept {
    return static_cast<std::size_t>((total_entries() + word_width - 1) / word_width);
  }

  // Bits of row j that carry real entries.
  std::uint64_t entry_mask(std::size_t row) const noexcept {
    const std::uint64_t first = static_cast<std::uint64_t>(row) * word_width;
    const std::uint64_t n = std::min<std::uint64_t>(word_width, total_entries() - first);
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }

  bool output_bit(std::uint64_t entry, std::size_t output) const {
    return (rows[entry / word_width].outputs[output] >> (entry % word_width)) & 1U;
  }

  bool input_bit(std::uint64_t entry, std::size_t input) const {
    return (rows[entry / word_width].inputs[input] >> (entry % word_width)) & 1U;
  }

  bool operator==(const TruthTable&) const = default;
};

inline constexpr std::size_t kMaxTableInputs = 24;

inline void validate_table(const TruthTable& t) {
  if (t.n_inputs < 1 || t.n_inputs > kMaxTableInputs) {
    throw ValidationError("n_inputs", "truth table n_inputs must be in [1, " +
                                          std::to_string(kMaxTableInputs) + "]");
  }
  if (t.n_outputs < 1) throw ValidationError("n_outputs", "truth table n_outputs must be >= 1");
  if (t.word_width < 1 || t.word_width > 64) {
    throw ValidationError("word_width", "word_width must be in [1, 64]");
  }
  if (t.rows.size() != t.expected_rows()) {
    throw ConsistencyError("truth table has " + std::to_string(t.rows.size()) + " rows, needs " +
                           std::to_string(t.expected_rows()));
  }
  for (std::size_t j = 0; j < t.rows.size(); ++j) {
    const auto& row = t.rows[j];
    if (row.inputs.size() != t.n_inputs || row.outputs.size() != t.n_outputs) {
      throw ConsistencyError("row " + std::to_string(j) + " has the wrong number of words");
    }
    const auto mask = t.entry_mask(j);
    for (auto w : row.inputs) {
      if (w & ~mask) throw ConsistencyError("row " + std::to_string(j) + " has non-zero padding bits");
    }
    for (auto w : row.outputs) {
      if (w & ~mask) throw ConsistencyError("row " + std::to_string(j) + " has non-zero padding bits");
    }
  }
}

// Builds a table in the canonical input order; `outputs_of(t)` returns the
// output bits of entry t (bit o = output o).
inline TruthTable make_truth_table(std::size_t n_inputs, std::size_t n_outputs,
                                   std::size_t word_width,
                                   const std::function<std::uint64_t(std::uint64_t)>& outputs_of) {
  TruthTable t;
  t.n_inputs = n_inputs;
  t.n_outputs = n_outputs;
  t.word_width = word_width;
  if (n_inputs < 1 || n_inputs > kMaxTableInputs || word_width < 1 || word_width > 64) {
    validate_table(t);
  }
  t.rows.resize(t.expected_rows());
  for (std::size_t j = 0; j < t.rows.size(); ++j) {
    auto& row = t.rows[j];
    row.inputs.assign(n_inputs, 0);
    row.outputs.assign(n_outputs, 0);
    for (std::size_t k = 0; k < word_width; ++k) {
      const std::uint64_t entry = static_cast<std::uint64_t>(j) * word_width + k;
      if (entry >= t.total_entries()) break;
      for (std::size_t i = 0; i < n_inputs; ++i) row.inputs[i] |= ((entry >> i) & 1U) << k;
      const auto out = outputs_of(entry);
      for (std::size_t o = 0; o < n_outputs; ++o) row.outputs[o] |= ((out >> o) & 1U) << k;
    }
  }
  validate_table(t);
  return t;
}

// Even parity: output is 1 when an odd number of inputs are set.
inline TruthTable parity_table(std::size_t n_inputs, std::size_t word_width = 64) {
  return make_truth_table(n_inputs, 1, word_width, [](std::uint64_t t) {
    return static_cast<std::uint64_t>(std::popcount(t) & 1);
  });
}

inline TruthTable repack(const TruthTable& t, std::size_t word_width) {
  TruthTable out;
  out.n_inputs = t.n_inputs;
  out.n_outputs = t.n_outputs;
  out.word_width = word_width;
  if (word_width < 1 || word_width > 64) validate_table(out);
  out.rows.resize(out.expected_rows());
  for (auto& row : out.rows) {
    row.inputs.assign(t.n_inputs, 0);
    row.outputs.assign(t.n_outputs, 0);
  }
  for (std::uint64_t e = 0; e < t.total_entries(); ++e) {
    auto& row = out.rows[e / word_width];
    const auto k = e % word_width;
    for (std::size_t i = 0; i < t.n_inputs; ++i) {
      row.inputs[i] |= static_cast<std::uint64_t>(t.input_bit(e, i)) << k;
    }
    for (std::size_t o = 0; o < t.n_outputs; ++o) {
      row.outputs[o] |= static_cast<std::uint64_t>(t.output_bit(e, o)) << k;
    }
  }
  return out;
}

namespace detail {

inline bool parse_word(std::string_view token, std::uint64_t& out) {
  if (token.starts_with("0x") || token.starts_with("0X")) {
    token.remove_prefix(2);
    if (token.empty()) return false;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out, 16);
    return ec == std::errc{} && ptr == token.data() + token.size();
  }
  return parse_number(token, out);
}

}  // namespace detail

// PLU format:
//   .i <inputs>  .o <outputs>  .p <rows>  [.w <word width, default 64>]
//   <rows> lines of n_i input words then n_o output words (decimal or 0x hex)
//   .e
// '#' starts a comment.
inline TruthTable read_plu(std::istream& in) {
  TruthTable t;
  std::optional<std::size_t> inputs, outputs, declared_rows;
  std::size_t width = 64;
  bool ended = false;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    if (ended) throw SyntaxError(number, "content after .e");

    std::vector<std::string_view> tokens;
    for (std::size_t pos = 0; pos < view.size();) {
      const auto start = view.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      const auto stop = view.find_first_of(" \t", start);
      tokens.push_back(view.substr(start, stop == std::string_view::npos ? stop : stop - start));
      pos = stop == std::string_view::npos ? view.size() : stop;
    }

    if (tokens[0].starts_with('.')) {
      const auto directive = tokens[0];
      if (directive == ".e") {
        if (tokens.size() != 1) throw SyntaxError(number, ".e takes no argument");
        ended = true;
        continue;
      }
      if (!t.rows.empty()) throw SyntaxError(number, "directive after data rows");
      std::size_t value = 0;
      if (tokens.size() != 2 || !detail::parse_number(tokens[1], value)) {
        throw SyntaxError(number, "expected '" + std::string(directive) + " <count>'");
      }
      if (directive == ".i") {
        inputs = value;
      } else if (directive == ".o") {
        outputs = value;
      } else if (directive == ".p") {
        declared_rows = value;
      } else if (directive == ".w") {
        if (value < 1 || value > 64) throw SyntaxError(number, ".w must be in [1, 64]");
        width = value;
      } else {
        throw SyntaxError(number, "unknown directive '" + std::string(directive) + "'");
      }
      continue;
    }

    if (!inputs || !outputs || !declared_rows) {
      throw SyntaxError(number, "data row before .i/.o/.p header");
    }
    if (tokens.size() != *inputs + *outputs) {
      throw SyntaxError(number, "expected " + std::to_string(*inputs + *outputs) + " words, got " +
                                    std::to_string(tokens.size()));
    }
    TruthTable::Row row;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      std::uint64_t word = 0;
      if (!detail::parse_word(tokens[k], word)) {
        throw SyntaxError(number, "malformed word '" + std::string(tokens[k]) + "'");
      }
      if (width < 64 && (word >> width) != 0) {
        throw RangeError("line " + std::to_string(number) + ": word '" + std::string(tokens[k]) +
                         "' exceeds " + std::to_string(width) + " bits");
      }
      (k < *inputs ? row.inputs : row.outputs).push_back(word);
    }
    t.rows.push_back(std::move(row));
  }
  if (!inputs || !outputs || !declared_rows) throw SyntaxError(number, "missing .i/.o/.p header");
  if (!ended) throw SyntaxError(number, "missing .e terminator");
  if (t.rows.size() != *declared_rows) {
    throw ConsistencyError(".p declares " + std::to_string(*declared_rows) + " rows but " +
                           std::to_string(t.rows.size()) + " were given");
  }
  t.n_inputs = *inputs;
  t.n_outputs = *outputs;
  t.word_width = width;
  validate_table(t);
  return t;
}

inline TruthTable read_plu(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("plu_file", "cannot read PLU file '" + path.string() + "'");
  return read_plu(in);
}

inline void write_plu(const TruthTable& t, std::ostream& out) {
  validate_table(t);
  out << ".i " << t.n_inputs << "\n.o " << t.n_outputs << "\n.p " << t.rows.size() << "\n.w "
      << t.word_width << '\n';
  out << std::hex;
  for (const auto& row : t.rows) {
    bool first = true;
    for (const auto* words : {&row.inputs, &row.outputs}) {
      for (auto w : *words) {
        out << (first ? "" : " ") << "0x" << w;
        first = false;
      }
    }
    out << '\n';
  }
  out << std::dec << ".e\n";
}

inline void write_plu(const TruthTable& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write PLU file '" + path.string() + "'");
  write_plu(t, out);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

// Number of wrong output bits over all entries; 0 iff the program matches.
template <class Gene>
std::uint64_t ls_fitness(const Genotype<Gene>& g, const TruthTable& table,
                         Decoder<std::uint64_t>& decoder) {
  decoder.load(g);
  std::vector<std::uint64_t> out(table.n_outputs);
  std::uint64_t wrong = 0;
  for (std::size_t j = 0; j < table.rows.size(); ++j) {
    const auto& row = table.rows[j];
    decoder.run(row.inputs, out);
    const auto mask = table.entry_mask(j);
    for (std::size_t o = 0; o < table.n_outputs; ++o) {
      wrong += static_cast<std::uint64_t>(std::popcount((out[o] ^ row.outputs[o]) & mask));
    }
  }
  return wrong;
}

struct SRPoint {
  std::vector<double> inputs;
  std::vector<double> targets;
  bool operator==(const SRPoint&) const = default;
};

struct SRDataset {
  std::string benchmark;
  std::size_t n_inputs = 1;
  std::size_t n_outputs = 1;
  std::vector<SRPoint> points;
  bool operator==(const SRDataset&) const = default;
};

template <class URBG>
SRDataset generate_sr_dataset(std::string_view benchmark, URBG& rng) {
  const auto b = find_benchmark(benchmark);
  if (!b) {
    throw ConfigError("problem", "unknown benchmark '" + std::string(benchmark) +
                                     "' (known: " + known_benchmark_ids() + ")");
  }
  SRDataset d;
  d.benchmark = std::string(b->id);
  for (std::size_t i = 0; i < b->points; ++i) {
    const double x = b->sampling == Sampling::uniform
                         ? uniform_real(rng, b->lo, b->hi)
                         : b->lo + (b->hi - b->lo) * static_cast<double>(i) /
                                       static_cast<double>(b->points - 1);
    d.points.push_back({{x}, {b->target(x)}});
  }
  return d;
}

inline void write_csv(const SRDataset& d, std::ostream& out) {
  for (std::size_t i = 0; i < d.n_inputs; ++i) out << (i ? "," : "") << 'x' << i;
  for (std::size_t o = 0; o < d.n_outputs; ++o) out << ",target" << o;
  out << '\n';
  for (const auto& p : d.points) {
    for (std::size_t i = 0; i < p.inputs.size(); ++i) out << (i ? "," : "") << format_double(p.inputs[i]);
    for (auto y : p.targets) out << ',' << format_double(y);
    out << '\n';
  }
}

inline constexpr double kNonFinitePenalty = 1e12;

// Sum of absolute errors; every non-finite prediction costs kNonFinitePenalty.
template <class Gene>
double sr_fitness(const Genotype<Gene>& g, const SRDataset& data, Decoder<double>& decoder) {
  decoder.load(g);
  std::vector<double> out(data.n_outputs);
  double total = 0.0;
  for (const auto& p : data.points) {
    decoder.run(p.inputs, out);
    for (std::size_t o = 0; o < out.size(); ++o) {
      const double err = std::abs(out[o] - p.targets[o]);
      total += std::isfinite(err) ? err : kNonFinitePenalty;
    }
  }
  return total;
}

// Evaluation target with its own decoder. Concurrency comes from deep clones:
// one per worker, sharing nothing mutable with the original.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Domain domain() const = 0;
  virtual const Layout& layout() const = 0;
  virtual std::vector<std::string> function_names() const = 0;
  virtual double fitness(const IntGenotype& g) = 0;
  virtual std::unique_ptr<Problem> clone() const = 0;

  template <class Gene>
  double evaluate(const Genotype<Gene>& g) {
    if constexpr (is_real_gene_v<Gene>) {
      return fitness(to_integer(g, layout()));
    } else {
      return fitness(g);
    }
  }
};

inline std::unique_ptr<Problem> deep_clone(const Problem& p) { return p.clone(); }

class LogicSynthesisProblem final : public Problem {
 public:
  LogicSynthesisProblem(TruthTable table, const Layout& layout, FunctionSet<std::uint64_t> functions)
      : table_(std::move(table)), decoder_(layout, std::move(functions)) {
    if (!decoder_.functions().all_bitwise()) {
      throw ConfigError("functions", "logic synthesis needs a bitwise function set");
    }
    if (table_.n_inputs != layout.inputs || table_.n_outputs != layout.outputs) {
      throw ValidationError("n_inputs", "truth table is " + std::to_string(table_.n_inputs) + "x" +
                                            std::to_string(table_.n_outputs) +
                                            " but parameters say n_inputs=" +
                                            std::to_string(layout.inputs) +
                                            ", n_outputs=" + std::to_string(layout.outputs));
    }
  }

  Domain domain() const override { return Domain::logic_synthesis; }
  const Layout& layout() const override { return decoder_.layout(); }
  std::vector<std::string> function_names() const override { return decoder_.functions().names(); }
  double fitness(const IntGenotype& g) override {
    return static_cast<double>(ls_fitness(g, table_, decoder_));
  }
  std::unique_ptr<Problem> clone() const override {
    return std::make_unique<LogicSynthesisProblem>(*this);
  }

  const TruthTable& table() const noexcept { return table_; }
  TruthTable& table() noexcept { return table_; }

 private:
  TruthTable table_;
  Decoder<std::uint64_t> decoder_;
};

class SymbolicRegressionProblem final : public Problem {
 public:
  SymbolicRegressionProblem(SRDataset data, const Layout& layout, FunctionSet<double> functions,
                            std::vector<double> constants)
      : data_(std::move(data)), decoder_(layout, std::move(functions), std::move(constants)) {
    if (data_.points.empty()) throw ContractError("empty regression dataset");
    if (data_.n_inputs != layout.inputs || data_.n_outputs != layout.outputs) {
      throw ValidationError("n_inputs", "dataset is " + std::to_string(data_.n_inputs) + "x" +
                                            std::to_string(data_.n_outputs) +
                                            " but parameters say n_inputs=" +
                                            std::to_string(layout.inputs) +
                                            ", n_outputs=" + std::to_string(layout.outputs));
    }
  }

  Domain domain() const override { return Domain::symbolic_regression; }
  const Layout& layout() const override { return decoder_.layout(); }
  std::vector<std::string> function_names() const override { return decoder_.functions().names(); }
  double fitness(const IntGenotype& g) override { return sr_fitness(g, data_, decoder_); }
  std::unique_ptr<Problem> clone() const override {
    return std::make_unique<SymbolicRegressionProblem>(*this);
  }

  const SRDataset& dataset() const noexcept { return data_; }
  SRDataset& dataset() noexcept { return data_; }

 private:
  SRDataset data_;
  Decoder<double> decoder_;
};

}  // namespace cgp
