#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cgp/benchmarks.hpp"
#include "cgp/error.hpp"
#include "cgp/pipeline.hpp"

namespace cgp {

enum class Algorithm { one_plus_lambda, mu_plus_lambda };
enum class GenomeKind { integer, real };
enum class CrossoverKind { discrete, block };
// How the (1+lambda) selection picks among strictly better offspring.
enum class BetterChoice { uniform, best };
enum class Domain { logic_synthesis, symbolic_regression };

struct Parameters {
  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;
  std::size_t n_rows = 1;
  std::size_t n_columns = 0;
  std::size_t max_arity = 0;
  std::size_t levels_back = 0;
  std::size_t mu = 1;
  std::size_t lambda = 4;
  double point_mutation_rate = 0.05;
  double inversion_rate = 0.0;
  double duplication_rate = 0.0;
  std::size_t max_segment_length = 4;
  std::string mutation_pipeline;
  double crossover_rate = 0.0;
  CrossoverKind crossover = CrossoverKind::discrete;
  std::size_t block_size = 1;
  std::uint64_t max_generations = 0;
  std::uint64_t max_fitness_evaluations = 1'000'000;
  double ideal_fitness = 0.0;
  double neutrality_epsilon = 0.0;
  BetterChoice better_choice = BetterChoice::uniform;
  std::size_t num_jobs = 1;
  std::size_t num_eval_threads = 1;
  std::uint64_t seed = 1;
  std::size_t num_constants = 0;
  double constant_lo = -1.0;
  double constant_hi = 1.0;
  Algorithm algorithm = Algorithm::one_plus_lambda;
  GenomeKind genome_kind = GenomeKind::integer;
  std::string problem;
  std::string plu_file;
  std::string functions;
  std::uint64_t checkpoint_interval = 100;

  bool operator==(const Parameters&) const = default;
};

// Ordered key/value view of a parameter set (file contents or serialized params).
using KeyValues = std::map<std::string, std::string, std::less<>>;

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::optional<Domain> problem_domain(std::string_view problem) {
  if (problem == "plu") return Domain::logic_synthesis;
  if (problem.starts_with("parity-")) {
    std::size_t n = 0;
    if (detail::parse_number(problem.substr(7), n) && n >= 1 && n <= 24) {
      return Domain::logic_synthesis;
    }
    return std::nullopt;
  }
  if (find_benchmark(problem)) return Domain::symbolic_regression;
  return std::nullopt;
}

inline constexpr std::string_view kBooleanDefaultFunctions = "AND,OR,NAND,NOR,XOR,XNOR,NOT,ID";
inline constexpr std::string_view kRegressionDefaultFunctions = "add,sub,mul,div,sin,cos,exp,log";

namespace detail {

template <class T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  if (!parse_number(text, value)) {
    throw ValidationError(std::string(key), std::string(key) + ": cannot parse '" +
                                                std::string(text) + "' as a number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ValidationError(std::string(key), std::string(key) + ": value must be finite");
    }
  }
  return value;
}

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view key, std::string_view text,
                const std::pair<std::string_view, Enum> (&names)[N]) {
  text = trim(text);
  std::string known;
  for (const auto& [name, value] : names) {
    if (name == text) return value;
    if (!known.empty()) known += ", ";
    known += name;
  }
  throw ValidationError(std::string(key), std::string(key) + ": '" + std::string(text) +
                                              "' is not one of {" + known + "}");
}

template <class Enum, std::size_t N>
std::string format_enum(Enum v, const std::pair<std::string_view, Enum> (&names)[N]) {
  for (const auto& [name, value] : names) {
    if (value == v) return std::string(name);
  }
  return "?";
}

inline constexpr std::pair<std::string_view, Algorithm> kAlgorithms[] = {
    {"one_plus_lambda", Algorithm::one_plus_lambda}, {"mu_plus_lambda", Algorithm::mu_plus_lambda}};
inline constexpr std::pair<std::string_view, GenomeKind> kGenomeKinds[] = {
    {"integer", GenomeKind::integer}, {"real", GenomeKind::real}};
inline constexpr std::pair<std::string_view, CrossoverKind> kCrossovers[] = {
    {"discrete", CrossoverKind::discrete}, {"block", CrossoverKind::block}};
inline constexpr std::pair<std::string_view, BetterChoice> kBetterChoices[] = {
    {"uniform", BetterChoice::uniform}, {"best", BetterChoice::best}};

struct KeySpec {
  std::string_view name;
  bool required;
  // Default depends on other fields (recomputed when those change on merge).
  bool derived;
  void (*set)(Parameters&, std::string_view);
  std::string (*get)(const Parameters&);
};

#define CGP_SIZE_KEY(field, req)                                                         \
  KeySpec {                                                                              \
    #field, req, false,                                                                  \
        [](Parameters& p, std::string_view v) { p.field = parse_value<std::size_t>(#field, v); }, \
        [](const Parameters& p) { return std::to_string(p.field); }                      \
  }
#define CGP_U64_KEY(field)                                                                       \
  KeySpec {                                                                                      \
    #field, false, false,                                                                        \
        [](Parameters& p, std::string_view v) { p.field = parse_value<std::uint64_t>(#field, v); }, \
        [](const Parameters& p) { return std::to_string(p.field); }                              \
  }
#define CGP_REAL_KEY(field, derived)                                                         \
  KeySpec {                                                                                  \
    #field, false, derived,                                                                  \
        [](Parameters& p, std::string_view v) { p.field = parse_value<double>(#field, v); }, \
        [](const Parameters& p) { return format_double(p.field); }                           \
  }
#define CGP_ENUM_KEY(field, table)                                                                \
  KeySpec {                                                                                       \
    #field, false, false,                                                                         \
        [](Parameters& p, std::string_view v) { p.field = parse_enum(#field, v, table); },         \
        [](const Parameters& p) { return format_enum(p.field, table); }                           \
  }
#define CGP_STRING_KEY(field, derived)                                                          \
  KeySpec {                                                                                     \
    #field, false, derived, [](Parameters& p, std::string_view v) { p.field = std::string(trim(v)); }, \
        [](const Parameters& p) { return p.field; }                                             \
  }

inline const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      CGP_SIZE_KEY(n_inputs, true),
      CGP_SIZE_KEY(n_outputs, true),
      CGP_SIZE_KEY(n_rows, false),
      CGP_SIZE_KEY(n_columns, true),
      CGP_SIZE_KEY(max_arity, true),
      KeySpec{"levels_back", false, true,
              [](Parameters& p, std::string_view v) {
                p.levels_back = parse_value<std::size_t>("levels_back", v);
              },
              [](const Parameters& p) { return std::to_string(p.levels_back); }},
      CGP_SIZE_KEY(mu, false),
      CGP_SIZE_KEY(lambda, false),
      CGP_REAL_KEY(point_mutation_rate, false),
      CGP_REAL_KEY(inversion_rate, false),
      CGP_REAL_KEY(duplication_rate, false),
      CGP_SIZE_KEY(max_segment_length, false),
      CGP_STRING_KEY(mutation_pipeline, true),
      CGP_REAL_KEY(crossover_rate, false),
      CGP_ENUM_KEY(crossover, kCrossovers),
      CGP_SIZE_KEY(block_size, false),
      CGP_U64_KEY(max_generations),
      CGP_U64_KEY(max_fitness_evaluations),
      CGP_REAL_KEY(ideal_fitness, true),
      CGP_REAL_KEY(neutrality_epsilon, true),
      CGP_ENUM_KEY(better_choice, kBetterChoices),
      CGP_SIZE_KEY(num_jobs, false),
      CGP_SIZE_KEY(num_eval_threads, false),
      CGP_U64_KEY(seed),
      CGP_SIZE_KEY(num_constants, false),
      KeySpec{"constant_range", false, false,
              [](Parameters& p, std::string_view v) {
                const auto parts = split(v, ',');
                if (parts.size() != 2) {
                  throw ValidationError("constant_range", "constant_range: expected 'lo,hi'");
                }
                p.constant_lo = parse_value<double>("constant_range", parts[0]);
                p.constant_hi = parse_value<double>("constant_range", parts[1]);
              },
              [](const Parameters& p) {
                return format_double(p.constant_lo) + "," + format_double(p.constant_hi);
              }},
      CGP_ENUM_KEY(algorithm, kAlgorithms),
      CGP_ENUM_KEY(genome_kind, kGenomeKinds),
      CGP_STRING_KEY(problem, false),
      CGP_STRING_KEY(plu_file, false),
      CGP_STRING_KEY(functions, true),
      CGP_U64_KEY(checkpoint_interval),
  };
  return specs;
}

#undef CGP_SIZE_KEY
#undef CGP_U64_KEY
#undef CGP_REAL_KEY
#undef CGP_ENUM_KEY
#undef CGP_STRING_KEY

inline const KeySpec* find_key(std::string_view name) {
  for (const auto& spec : key_specs()) {
    if (spec.name == name) return &spec;
  }
  return nullptr;
}

inline std::string valid_key_list() {
  std::string out;
  for (const auto& spec : key_specs()) {
    if (!out.empty()) out += ", ";
    out += spec.name;
  }
  return out;
}

inline std::string default_pipeline(const Parameters& p) {
  std::string out = "point:" + format_double(p.point_mutation_rate);
  const auto seg = std::to_string(p.max_segment_length);
  if (p.inversion_rate > 0.0) out += ", inversion:" + format_double(p.inversion_rate) + ":" + seg;
  if (p.duplication_rate > 0.0) {
    out += ", duplication:" + format_double(p.duplication_rate) + ":" + seg;
  }
  return out;
}

inline std::string derived_default(std::string_view key, const Parameters& p) {
  const auto domain = problem_domain(p.problem);
  const bool regression = domain == Domain::symbolic_regression;
  if (key == "levels_back") return std::to_string(p.n_columns);
  if (key == "mutation_pipeline") return default_pipeline(p);
  if (key == "neutrality_epsilon") return regression ? "1e-09" : "0";
  if (key == "ideal_fitness") {
    return regression ? format_double(hit_threshold(*find_benchmark(p.problem))) : "0";
  }
  if (key == "functions") {
    return std::string(regression ? kRegressionDefaultFunctions : kBooleanDefaultFunctions);
  }
  return {};
}

inline void require(bool ok, std::string_view key, const std::string& message) {
  if (!ok) throw ValidationError(std::string(key), std::string(key) + " " + message);
}

}  // namespace detail

inline void validate_parameters(const Parameters& p) {
  using detail::require;
  require(p.n_inputs >= 1, "n_inputs", "must be >= 1");
  require(p.n_outputs >= 1, "n_outputs", "must be >= 1");
  require(p.n_rows >= 1, "n_rows", "must be >= 1");
  require(p.n_columns >= 1, "n_columns", "must be >= 1");
  require(p.max_arity >= 1, "max_arity", "must be >= 1");
  require(p.levels_back >= 1 && p.levels_back <= p.n_columns, "levels_back",
          "must be in [1, n_columns=" + std::to_string(p.n_columns) + "], got " +
              std::to_string(p.levels_back));
  require(p.mu >= 1, "mu", "must be >= 1");
  require(p.lambda >= 1, "lambda", "must be >= 1");
  auto probability = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(probability(p.point_mutation_rate), "point_mutation_rate", "must be in [0, 1]");
  require(probability(p.inversion_rate), "inversion_rate", "must be in [0, 1]");
  require(probability(p.duplication_rate), "duplication_rate", "must be in [0, 1]");
  require(probability(p.crossover_rate), "crossover_rate", "must be in [0, 1]");
  require(p.max_segment_length >= 1, "max_segment_length", "must be >= 1");
  require(p.block_size >= 1 && p.block_size <= p.n_rows * p.n_columns, "block_size",
          "must be in [1, n_rows*n_columns=" + std::to_string(p.n_rows * p.n_columns) + "]");
  require(p.neutrality_epsilon >= 0.0, "neutrality_epsilon", "must be >= 0");
  require(p.num_jobs >= 1, "num_jobs", "must be >= 1");
  require(p.num_eval_threads >= 1, "num_eval_threads", "must be >= 1");
  require(p.num_constants == 0 || p.constant_lo < p.constant_hi, "constant_range",
          "requires lo < hi when num_constants > 0");
  require(p.max_generations > 0 || p.max_fitness_evaluations > 0, "max_generations",
          "or max_fitness_evaluations must be > 0");
  if (p.algorithm == Algorithm::one_plus_lambda) {
    require(p.mu == 1, "mu", "must be 1 under one_plus_lambda");
    require(p.crossover_rate == 0.0, "crossover_rate",
            "must be 0 under one_plus_lambda (mutation-only)");
  }
  if (!p.problem.empty()) {
    require(problem_domain(p.problem).has_value(), "problem",
            "must be parity-<n>, plu, or one of {" + known_benchmark_ids() + "}");
  }
  if (p.problem == "plu") require(!p.plu_file.empty(), "plu_file", "is required when problem = plu");
  (void)parse_pipeline(p.mutation_pipeline);
}

// Builds parameters from raw key/value pairs: defaults, then explicit values,
// then derived defaults for keys that were not given, then validation.
inline Parameters build_parameters(const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (!detail::find_key(key)) {
      throw ConfigError(key, "unknown key '" + key + "' (valid keys: " + detail::valid_key_list() + ")");
    }
  }
  Parameters p;
  for (const auto& spec : detail::key_specs()) {
    auto it = values.find(spec.name);
    if (it == values.end()) {
      if (spec.required && !spec.derived) {
        throw ConfigError(std::string(spec.name),
                          "missing required key '" + std::string(spec.name) + "'");
      }
      continue;
    }
    spec.set(p, it->second);
  }
  for (const auto& spec : detail::key_specs()) {
    if (spec.derived && !values.contains(spec.name)) {
      spec.set(p, detail::derived_default(spec.name, p));
    }
  }
  validate_parameters(p);
  return p;
}

inline KeyValues to_key_values(const Parameters& p) {
  KeyValues out;
  for (const auto& spec : detail::key_specs()) out.emplace(spec.name, spec.get(p));
  return out;
}

inline std::string serialize_parameters(const Parameters& p) {
  std::string out;
  for (const auto& spec : detail::key_specs()) {
    out += std::string(spec.name) + " = " + spec.get(p) + "\n";
  }
  return out;
}

// Line-oriented `key = value`; `#` starts a comment; blank lines are ignored.
inline KeyValues parse_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw SyntaxError(number, "expected 'key = value'");
    const auto key = detail::trim(view.substr(0, eq));
    if (key.empty()) throw SyntaxError(number, "empty key");
    values.insert_or_assign(std::string(key), std::string(detail::trim(view.substr(eq + 1))));
  }
  return values;
}

inline Parameters parse_parameters(std::istream& in) { return build_parameters(parse_key_values(in)); }

inline Parameters load_parameters(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot read parameter file '" + file.string() + "'");
  return parse_parameters(in);
}

// Splits `key=value` into its parts; throws ConfigError on a missing '='.
inline std::pair<std::string, std::string> split_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(text), "override '" + std::string(text) + "' is not key=value");
  }
  return {std::string(detail::trim(text.substr(0, eq))),
          std::string(detail::trim(text.substr(eq + 1)))};
}

// Precedence: override > existing value > default. Keys whose current value is
// still their derived default are re-derived, so e.g. an unconstrained
// levels_back follows an overridden n_columns.
inline Parameters merge_cli_overrides(const Parameters& params,
                                      std::span<const std::string> overrides) {
  KeyValues values = to_key_values(params);
  for (const auto& spec : detail::key_specs()) {
    if (spec.derived && values[std::string(spec.name)] == detail::derived_default(spec.name, params)) {
      values.erase(std::string(spec.name));
    }
  }
  for (const auto& text : overrides) {
    auto [key, value] = split_override(text);
    if (!detail::find_key(key)) {
      throw ConfigError(key, "unknown key '" + key + "' (valid keys: " + detail::valid_key_list() + ")");
    }
    values.insert_or_assign(std::move(key), std::move(value));
  }
  return build_parameters(values);
}

inline std::vector<std::string> parameter_keys() {
  std::vector<std::string> keys;
  for (const auto& spec : detail::key_specs()) keys.emplace_back(spec.name);
  return keys;
}

}  // namespace cgp
