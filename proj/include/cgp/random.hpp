#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "cgp/error.hpp"

namespace cgp {

// Every stochastic decision of a job is drawn from one engine of this type.
using Rng = std::mt19937_64;

template <class URBG>
std::size_t uniform_index(URBG& rng, std::size_t n) {
  if (n == 0) throw ContractError("uniform_index over an empty range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

// Uniform in [0, 1). generate_canonical may round up to 1.0 on some libraries.
template <class URBG>
double uniform01(URBG& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double u = dist(rng);
  return u < 1.0 ? u : std::nextafter(1.0, 0.0);
}

template <class URBG>
double uniform_real(URBG& rng, double lo, double hi) {
  const double v = lo + (hi - lo) * uniform01(rng);
  return v < hi ? v : std::nextafter(hi, lo);
}

template <class URBG>
bool coin(URBG& rng, double probability) {
  return uniform01(rng) < probability;
}

// Engine state as whitespace-separated hex words (the engine's own textual
// state re-encoded), so that a reloaded engine continues the exact stream.
inline std::string rng_state_hex(const Rng& rng) {
  std::ostringstream text;
  text << rng;
  std::istringstream words(text.str());
  std::ostringstream out;
  out << std::hex;
  std::uint64_t word = 0;
  bool first = true;
  while (words >> word) {
    if (!first) out << ' ';
    out << word;
    first = false;
  }
  return out.str();
}

inline Rng rng_from_state_hex(std::string_view hex) {
  std::istringstream words{std::string(hex)};
  words >> std::hex;
  std::ostringstream text;
  std::uint64_t word = 0;
  std::size_t count = 0;
  while (words >> word) {
    if (count++ != 0) text << ' ';
    text << word;
  }
  if (!words.eof()) throw CheckpointError("rng_state contains a non-hex token");
  if (count != Rng::state_size + 1) {
    throw CheckpointError("rng_state has " + std::to_string(count) + " words, expected " +
                          std::to_string(Rng::state_size + 1));
  }
  Rng rng;
  std::istringstream in(text.str());
  in >> rng;
  if (in.fail()) throw CheckpointError("rng_state could not be restored");
  return rng;
}

}  // namespace cgp
