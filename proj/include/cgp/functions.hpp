#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cgp/config.hpp"
#include "cgp/error.hpp"
#include "cgp/random.hpp"

namespace cgp {

template <class E>
struct Function {
  std::string name;
  std::size_t arity = 0;
  E (*apply)(const E* args) = nullptr;
  // Semantics act independently on every bit of an unsigned word.
  bool bitwise = false;
};

// Ordered primitive set; a function gene holds an index into it.
template <class E>
class FunctionSet {
 public:
  FunctionSet() = default;
  explicit FunctionSet(std::vector<Function<E>> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("functions", "function set must be non-empty");
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const Function<E>& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::size_t> arities() const {
    std::vector<std::size_t> out;
    for (const auto& f : entries_) out.push_back(f.arity);
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : entries_) out.push_back(f.name);
    return out;
  }

  bool all_bitwise() const {
    for (const auto& f : entries_) {
      if (!f.bitwise) return false;
    }
    return true;
  }

  void check_arity(std::size_t max_arity) const {
    for (const auto& f : entries_) {
      if (f.arity > max_arity) {
        throw ValidationError("max_arity", "max_arity " + std::to_string(max_arity) +
                                               " is below the arity " + std::to_string(f.arity) +
                                               " of function " + f.name);
      }
    }
  }

 private:
  std::vector<Function<E>> entries_;
};

// Boolean primitives. Over `bool` these are the logical connectives; over an
// unsigned word they act bitwise, so one call evaluates a word of truth-table rows.
template <class E>
const std::vector<Function<E>>& boolean_primitives() {
  static_assert(std::is_same_v<E, bool> || std::is_unsigned_v<E>,
                "Boolean primitives need bool or an unsigned word type");
  static const std::vector<Function<E>> all = [] {
    if constexpr (std::is_same_v<E, bool>) {
      return std::vector<Function<E>>{
          {"AND", 2, [](const bool* a) { return a[0] && a[1]; }, true},
          {"OR", 2, [](const bool* a) { return a[0] || a[1]; }, true},
          {"NAND", 2, [](const bool* a) { return !(a[0] && a[1]); }, true},
          {"NOR", 2, [](const bool* a) { return !(a[0] || a[1]); }, true},
          {"XOR", 2, [](const bool* a) { return a[0] != a[1]; }, true},
          {"XNOR", 2, [](const bool* a) { return a[0] == a[1]; }, true},
          {"NOT", 1, [](const bool* a) { return !a[0]; }, true},
          {"ID", 1, [](const bool* a) { return a[0]; }, true},
      };
    } else {
      return std::vector<Function<E>>{
          {"AND", 2, [](const E* a) -> E { return a[0] & a[1]; }, true},
          {"OR", 2, [](const E* a) -> E { return a[0] | a[1]; }, true},
          {"NAND", 2, [](const E* a) -> E { return ~(a[0] & a[1]); }, true},
          {"NOR", 2, [](const E* a) -> E { return ~(a[0] | a[1]); }, true},
          {"XOR", 2, [](const E* a) -> E { return a[0] ^ a[1]; }, true},
          {"XNOR", 2, [](const E* a) -> E { return ~(a[0] ^ a[1]); }, true},
          {"NOT", 1, [](const E* a) -> E { return ~a[0]; }, true},
          {"ID", 1, [](const E* a) -> E { return a[0]; }, true},
      };
    }
  }();
  return all;
}

inline constexpr double kProtectionFloor = 1e-12;

inline const std::vector<Function<double>>& regression_primitives() {
  static const std::vector<Function<double>> all = {
      {"add", 2, [](const double* a) { return a[0] + a[1]; }},
      {"sub", 2, [](const double* a) { return a[0] - a[1]; }},
      {"mul", 2, [](const double* a) { return a[0] * a[1]; }},
      {"div", 2,
       [](const double* a) { return std::abs(a[1]) < kProtectionFloor ? 1.0 : a[0] / a[1]; }},
      {"sin", 1, [](const double* a) { return std::sin(a[0]); }},
      {"cos", 1, [](const double* a) { return std::cos(a[0]); }},
      {"exp", 1, [](const double* a) { return std::exp(a[0]); }},
      {"log", 1,
       [](const double* a) {
         const double m = std::abs(a[0]);
         return m < kProtectionFloor ? 0.0 : std::log(m);
       }},
  };
  return all;
}

namespace detail {

template <class E>
FunctionSet<E> select_functions(const std::vector<Function<E>>& registry, std::string_view names,
                                std::string_view domain) {
  std::vector<Function<E>> chosen;
  for (auto name : split(names, ',')) {
    auto it = std::find_if(registry.begin(), registry.end(),
                           [&](const Function<E>& f) { return f.name == name; });
    if (it == registry.end()) {
      std::string known;
      for (const auto& f : registry) known += (known.empty() ? "" : ", ") + f.name;
      throw ConfigError("functions", "functions: '" + std::string(name) + "' is not a " +
                                         std::string(domain) + " primitive (known: " + known + ")");
    }
    chosen.push_back(*it);
  }
  return FunctionSet<E>(std::move(chosen));
}

}  // namespace detail

template <class E>
FunctionSet<E> boolean_function_set(std::string_view names = kBooleanDefaultFunctions) {
  return detail::select_functions(boolean_primitives<E>(), names, "bitwise Boolean");
}

inline FunctionSet<double> regression_function_set(
    std::string_view names = kRegressionDefaultFunctions) {
  return detail::select_functions(regression_primitives(), names, "regression");
}

// Ephemeral random constants; the SR terminal set is inputs followed by these.
struct TerminalConstants {
  std::vector<double> values;
  bool operator==(const TerminalConstants&) const = default;
};

template <class URBG>
TerminalConstants generate_erc(std::size_t count, double lo, double hi, URBG& rng) {
  TerminalConstants out;
  if (count == 0) return out;
  if (!(lo < hi)) {
    throw RangeError("constant_range: lo (" + format_double(lo) + ") must be below hi (" +
                     format_double(hi) + ")");
  }
  out.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.values.push_back(uniform_real(rng, lo, hi));
  return out;
}

}  // namespace cgp
