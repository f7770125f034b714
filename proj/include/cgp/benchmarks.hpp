#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace cgp {

enum class Sampling { uniform, grid };

// Single-variable symbolic-regression benchmark with its training-set sampling.
struct Benchmark {
  std::string_view id;
  std::string_view formula;
  double (*target)(double x);
  double lo;
  double hi;
  std::size_t points;
  Sampling sampling;
};

namespace detail {
inline double koza1(double x) { return x * x * x * x + x * x * x + x * x + x; }
inline double koza2(double x) { return std::pow(x, 5) - 2.0 * x * x * x + x; }
inline double koza3(double x) { return std::pow(x, 6) - 2.0 * std::pow(x, 4) + x * x; }
inline double nguyen4(double x) {
  return std::pow(x, 6) + std::pow(x, 5) + std::pow(x, 4) + x * x * x + x * x + x;
}
inline double nguyen5(double x) { return std::sin(x * x) * std::cos(x) - 1.0; }
inline double nguyen6(double x) { return std::sin(x) + std::sin(x + x * x); }
inline double nguyen7(double x) { return std::log(x + 1.0) + std::log(x * x + 1.0); }
}  // namespace detail

// nguyen-7 is sampled on [0, 2): log(x + 1) is unbounded near x = -1.
inline constexpr std::array<Benchmark, 7> kBenchmarks{{
    {"koza-1", "x^4 + x^3 + x^2 + x", detail::koza1, -1.0, 1.0, 20, Sampling::uniform},
    {"koza-2", "x^5 - 2x^3 + x", detail::koza2, -1.0, 1.0, 20, Sampling::uniform},
    {"koza-3", "x^6 - 2x^4 + x^2", detail::koza3, -1.0, 1.0, 20, Sampling::uniform},
    {"nguyen-4", "x^6 + x^5 + x^4 + x^3 + x^2 + x", detail::nguyen4, -1.0, 1.0, 20,
     Sampling::uniform},
    {"nguyen-5", "sin(x^2) cos(x) - 1", detail::nguyen5, -1.0, 1.0, 20, Sampling::uniform},
    {"nguyen-6", "sin(x) + sin(x + x^2)", detail::nguyen6, -1.0, 1.0, 20, Sampling::uniform},
    {"nguyen-7", "log(x + 1) + log(x^2 + 1)", detail::nguyen7, 0.0, 2.0, 20, Sampling::uniform},
}};

inline std::optional<Benchmark> find_benchmark(std::string_view id) {
  for (const auto& b : kBenchmarks) {
    if (b.id == id) return b;
  }
  return std::nullopt;
}

inline std::string known_benchmark_ids() {
  std::string out;
  for (const auto& b : kBenchmarks) {
    if (!out.empty()) out += ", ";
    out += b.id;
  }
  return out;
}

// A run counts as solved when the summed absolute error is at most this.
inline double hit_threshold(const Benchmark& b) { return 0.01 * static_cast<double>(b.points); }

}  // namespace cgp
