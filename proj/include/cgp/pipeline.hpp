#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cgp/error.hpp"

namespace cgp {

enum class MutationOp { point, inversion, duplication };

struct MutationStage {
  MutationOp op = MutationOp::point;
  double rate = 0.0;             // per gene for point, per genotype otherwise
  std::size_t max_segment = 4;   // inversion/duplication only
  bool operator==(const MutationStage&) const = default;
};

// Stages are applied left to right to every offspring.
struct MutationPipeline {
  std::vector<MutationStage> stages;
  bool operator==(const MutationPipeline&) const = default;
};

inline std::string_view to_string(MutationOp op) {
  switch (op) {
    case MutationOp::point: return "point";
    case MutationOp::inversion: return "inversion";
    case MutationOp::duplication: return "duplication";
  }
  return "?";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  if constexpr (std::is_unsigned_v<T>) {
    if (text.front() == '-' || text.front() == '+') return false;
  }
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

// Parses `op:rate[:max_segment]` stages separated by commas, e.g.
// `point:0.05, inversion:0.1:4, duplication:0.1:4`.
inline MutationPipeline parse_pipeline(std::string_view text) {
  MutationPipeline pipeline;
  if (detail::trim(text).empty()) return pipeline;
  for (auto stage_text : detail::split(text, ',')) {
    const auto fields = detail::split(stage_text, ':');
    MutationStage stage;
    if (fields[0] == "point") {
      stage.op = MutationOp::point;
    } else if (fields[0] == "inversion") {
      stage.op = MutationOp::inversion;
    } else if (fields[0] == "duplication") {
      stage.op = MutationOp::duplication;
    } else {
      throw ConfigError("mutation_pipeline",
                        "mutation_pipeline: unknown operator '" + std::string(fields[0]) +
                            "' (known: point, inversion, duplication)");
    }
    const std::size_t max_fields = stage.op == MutationOp::point ? 2 : 3;
    if (fields.size() < 2 || fields.size() > max_fields) {
      throw ConfigError("mutation_pipeline",
                        "mutation_pipeline: malformed stage '" + std::string(stage_text) + "'");
    }
    if (!detail::parse_number(fields[1], stage.rate) || !(stage.rate >= 0.0 && stage.rate <= 1.0)) {
      throw ValidationError("mutation_pipeline", "mutation_pipeline: rate of stage '" +
                                                     std::string(stage_text) + "' must be in [0, 1]");
    }
    if (fields.size() == 3 &&
        (!detail::parse_number(fields[2], stage.max_segment) || stage.max_segment < 1)) {
      throw ValidationError("mutation_pipeline", "mutation_pipeline: max_segment of stage '" +
                                                     std::string(stage_text) + "' must be >= 1");
    }
    pipeline.stages.push_back(stage);
  }
  return pipeline;
}

}  // namespace cgp
