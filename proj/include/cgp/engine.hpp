#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "cgp/algorithm.hpp"
#include "cgp/config.hpp"
#include "cgp/functions.hpp"
#include "cgp/genome.hpp"
#include "cgp/problems.hpp"
#include "cgp/random.hpp"

namespace cgp {

// Job i runs with seed = base seed + i.
inline Parameters job_parameters(const Parameters& base, std::size_t job) {
  Parameters p = base;
  p.seed = base.seed + job;
  return p;
}

namespace detail {

// Keys that do not influence the search trajectory; a run may be resumed with
// a larger budget or a different thread count.
inline bool fingerprinted(std::string_view key) {
  return key != "max_generations" && key != "max_fitness_evaluations" && key != "ideal_fitness" &&
         key != "num_jobs" && key != "num_eval_threads" && key != "checkpoint_interval";
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '%') {
      out += "%25";
    } else if (ch == ' ') {
      out += "%20";
    } else if (ch == '\n') {
      out += "%0A";
    } else {
      out += ch;
    }
  }
  return out;
}

inline std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size()) throw CheckpointError("bad escape in parameters line");
      const auto code = s.substr(i + 1, 2);
      if (code == "25") out += '%';
      else if (code == "20") out += ' ';
      else if (code == "0A") out += '\n';
      else throw CheckpointError("bad escape in parameters line");
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace detail

inline KeyValues fingerprint_values(const Parameters& p) {
  KeyValues out;
  for (auto& [key, value] : to_key_values(p)) {
    if (detail::fingerprinted(key)) out.emplace(key, value);
  }
  return out;
}

// FNV-1a over the fingerprinted `key=value` lines.
inline std::uint64_t fingerprint(const KeyValues& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : values) {
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  return h;
}

inline std::uint64_t parameter_fingerprint(const Parameters& p) {
  return fingerprint(fingerprint_values(p));
}

namespace detail {

inline void check_problem_shape(const Parameters& p, std::size_t inputs, std::size_t outputs) {
  if (p.n_inputs != inputs) {
    throw ValidationError("n_inputs", "n_inputs must be " + std::to_string(inputs) + " for problem " +
                                          p.problem + ", got " + std::to_string(p.n_inputs));
  }
  if (p.n_outputs != outputs) {
    throw ValidationError("n_outputs", "n_outputs must be " + std::to_string(outputs) + " for problem " +
                                           p.problem + ", got " + std::to_string(p.n_outputs));
  }
}

}  // namespace detail

// Builds the problem for `p`. `data` is required for regression problems.
inline std::unique_ptr<Problem> make_problem(const Parameters& p, const TerminalConstants& constants,
                                             const SRDataset* data = nullptr) {
  if (p.problem.empty()) throw ConfigError("problem", "missing required key 'problem'");
  const auto domain = problem_domain(p.problem);
  if (!domain) throw ValidationError("problem", "problem: unknown value '" + p.problem + "'");
  if (*domain == Domain::logic_synthesis) {
    if (p.num_constants != 0) {
      throw ValidationError("num_constants", "num_constants must be 0 for logic synthesis");
    }
    auto functions = boolean_function_set<std::uint64_t>(p.functions);
    TruthTable table = p.problem == "plu" ? read_plu(std::filesystem::path(p.plu_file))
                                          : parity_table(std::stoul(p.problem.substr(7)));
    detail::check_problem_shape(p, table.n_inputs, table.n_outputs);
    const auto layout = Layout::make(p, functions.arities());
    return std::make_unique<LogicSynthesisProblem>(std::move(table), layout, std::move(functions));
  }
  if (!data) throw ContractError("regression problem needs a dataset");
  detail::check_problem_shape(p, data->n_inputs, data->n_outputs);
  auto functions = regression_function_set(p.functions);
  const auto layout = Layout::make(p, functions.arities(), constants.values.size());
  return std::make_unique<SymbolicRegressionProblem>(*data, layout, std::move(functions), constants.values);
}

// Bundled search state of one job. All stochastic decisions draw from `rng`
// on the coordinating thread; `workers` are deep clones of `problem`, one per
// evaluation thread.
template <class Gene>
struct Composite {
  Parameters params;
  std::size_t job = 0;
  TerminalConstants constants;
  std::unique_ptr<Problem> problem;
  std::vector<std::unique_ptr<Problem>> workers;
  MutationPipeline pipeline;
  Population<Gene> population;
  Individual<Gene> best;
  Rng rng;

  const Layout& layout() const { return problem->layout(); }
};

// Initialization order (fixed, it defines the random stream): dataset, ERC,
// then the random population. `constants` replaces the drawn ERC values when
// restoring from a checkpoint.
template <class Gene>
Composite<Gene> initialize(const Parameters& base, std::size_t job = 0,
                           std::optional<TerminalConstants> constants = std::nullopt) {
  Composite<Gene> c;
  c.params = job_parameters(base, job);
  c.job = job;
  validate_parameters(c.params);
  const bool real = is_real_gene_v<Gene>;
  if (real != (c.params.genome_kind == GenomeKind::real)) {
    throw ContractError("genome_kind does not match the composite gene type");
  }
  c.rng.seed(c.params.seed);

  std::optional<SRDataset> data;
  if (problem_domain(c.params.problem) == Domain::symbolic_regression) {
    data = generate_sr_dataset(c.params.problem, c.rng);
  }
  auto drawn = generate_erc(c.params.num_constants, c.params.constant_lo, c.params.constant_hi, c.rng);
  c.constants = constants ? std::move(*constants) : std::move(drawn);
  if (c.constants.values.size() != c.params.num_constants) {
    throw CheckpointError("constant count does not match num_constants");
  }
  c.problem = make_problem(c.params, c.constants, data ? &*data : nullptr);
  c.pipeline = parse_pipeline(c.params.mutation_pipeline);

  const std::size_t parents = c.params.algorithm == Algorithm::one_plus_lambda ? 1 : c.params.mu;
  c.population.individuals.resize(parents + c.params.lambda);
  for (auto& ind : c.population.individuals) {
    ind.genotype = random_genotype<Gene>(c.layout(), c.rng);
  }
  for (std::size_t t = 0; t < c.params.num_eval_threads; ++t) c.workers.push_back(c.problem->clone());
  return c;
}

// Contiguous partition of n items into `chunks` parts; the first n % chunks
// parts get one extra item.
inline std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t chunks) {
  std::vector<std::size_t> sizes(chunks, n / chunks);
  for (std::size_t i = 0; i < n % chunks; ++i) ++sizes[i];
  return sizes;
}

// Fork-join evaluation: one thread per worker, each over its own chunk with its
// own problem clone. Results do not depend on the thread count.
template <class Gene>
void evaluate_population(Composite<Gene>& c, std::span<Individual<Gene>> individuals) {
  if (individuals.empty()) return;
  const auto sizes = chunk_sizes(individuals.size(), c.workers.size());
  auto evaluate_chunk = [&](std::size_t w, std::size_t begin, std::size_t count) {
    for (std::size_t i = begin; i < begin + count; ++i) {
      individuals[i].fitness = c.workers[w]->evaluate(individuals[i].genotype);
      individuals[i].evaluated = true;
    }
  };
  if (c.workers.size() == 1) {
    evaluate_chunk(0, 0, individuals.size());
    return;
  }
  std::vector<std::exception_ptr> errors(c.workers.size());
  std::vector<std::thread> threads;
  threads.reserve(c.workers.size());
  std::size_t begin = 0;
  for (std::size_t w = 0; w < c.workers.size(); ++w) {
    threads.emplace_back([&, w, begin] {
      try {
        evaluate_chunk(w, begin, sizes[w]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    begin += sizes[w];
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class Gene>
void step(Composite<Gene>& c) {
  const Breeding breeding{c.layout(),          c.pipeline,           c.params.crossover,
                          c.params.crossover_rate, c.params.block_size, c.params.neutrality_epsilon,
                          c.params.better_choice};
  auto evaluate = [&c](std::span<Individual<Gene>> s) { evaluate_population(c, s); };
  if (c.params.algorithm == Algorithm::one_plus_lambda) {
    step_one_plus_lambda(c.population, c.params.lambda, breeding, evaluate, c.rng);
  } else {
    step_mu_plus_lambda(c.population, c.params.mu, c.params.lambda, breeding, evaluate, c.rng);
  }
}

// Resume state of a job.
template <class Gene>
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::size_t job = 0;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
  KeyValues parameters;
  std::string rng_state;
  std::uint64_t generation = 0;
  std::uint64_t evaluations = 0;
  std::vector<double> constants;
  std::optional<Genotype<Gene>> best;
  std::vector<Genotype<Gene>> genomes;

  bool operator==(const Checkpoint&) const = default;
};

template <class Gene>
Checkpoint<Gene> make_checkpoint(const Composite<Gene>& c) {
  Checkpoint<Gene> ck;
  ck.job = c.job;
  ck.seed = c.params.seed;
  ck.parameters = fingerprint_values(c.params);
  ck.fingerprint = fingerprint(ck.parameters);
  ck.rng_state = rng_state_hex(c.rng);
  ck.generation = c.population.generation;
  ck.evaluations = c.population.evaluations;
  ck.constants = c.constants.values;
  if (c.best.evaluated) ck.best = c.best.genotype;
  for (const auto& ind : c.population.individuals) ck.genomes.push_back(ind.genotype);
  return ck;
}

// Line-oriented text:
//   version, job, seed, fingerprint (hex), parameters (escaped key=value list),
//   rng_state (hex words), generation, evaluations, constants, best, genomes <n>,
//   then one genome per line.
template <class Gene>
void write_checkpoint(const Checkpoint<Gene>& ck, std::ostream& out) {
  out << "version " << Checkpoint<Gene>::kVersion << '\n';
  out << "job " << ck.job << '\n';
  out << "seed " << ck.seed << '\n';
  out << "fingerprint " << std::hex << ck.fingerprint << std::dec << '\n';
  out << "parameters";
  for (const auto& [key, value] : ck.parameters) out << ' ' << key << '=' << detail::escape(value);
  out << '\n';
  out << "rng_state " << ck.rng_state << '\n';
  out << "generation " << ck.generation << '\n';
  out << "evaluations " << ck.evaluations << '\n';
  out << "constants";
  for (double v : ck.constants) out << ' ' << format_double(v);
  out << '\n';
  out << "best";
  if (ck.best) out << ' ' << to_line(*ck.best);
  out << '\n';
  out << "genomes " << ck.genomes.size() << '\n';
  for (const auto& g : ck.genomes) out << to_line(g) << '\n';
}

// Writes to a sibling temporary file and renames it over `path`, so readers
// only ever see a complete checkpoint.
template <class Gene>
void write_checkpoint(const Checkpoint<Gene>& ck, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    write_checkpoint(ck, out);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

template <class Gene>
void write_checkpoint(const Composite<Gene>& c, const std::filesystem::path& path) {
  write_checkpoint(make_checkpoint(c), path);
}

template <class Gene>
Checkpoint<Gene> read_checkpoint(std::istream& in) {
  Checkpoint<Gene> ck;
  std::string line;
  std::size_t number = 0;
  auto next = [&](std::string_view field) -> std::string {
    if (!std::getline(in, line)) throw CheckpointError("checkpoint truncated before '" + std::string(field) + "'");
    ++number;
    std::string_view view(line);
    if (!view.starts_with(field) || (view.size() > field.size() && view[field.size()] != ' ')) {
      throw CheckpointError("checkpoint line " + std::to_string(number) + ": expected '" +
                            std::string(field) + "'");
    }
    view.remove_prefix(std::min(view.size(), field.size() + 1));
    return std::string(view);
  };
  auto number_of = [&](std::string_view field, std::string_view text, auto& out, int base = 10) {
    std::from_chars_result r;
    if constexpr (std::is_floating_point_v<std::remove_reference_t<decltype(out)>>) {
      r = std::from_chars(text.data(), text.data() + text.size(), out);
    } else {
      r = std::from_chars(text.data(), text.data() + text.size(), out, base);
    }
    auto [ptr, ec] = r;
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw CheckpointError("checkpoint: malformed " + std::string(field));
    }
  };

  int version = 0;
  number_of("version", next("version"), version);
  if (version != Checkpoint<Gene>::kVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  number_of("job", next("job"), ck.job);
  number_of("seed", next("seed"), ck.seed);
  number_of("fingerprint", next("fingerprint"), ck.fingerprint, 16);
  const auto parameters = next("parameters");
  for (auto token : detail::split(parameters, ' ')) {
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) throw CheckpointError("checkpoint: malformed parameters");
    ck.parameters.emplace(std::string(token.substr(0, eq)), detail::unescape(token.substr(eq + 1)));
  }
  ck.rng_state = next("rng_state");
  number_of("generation", next("generation"), ck.generation);
  number_of("evaluations", next("evaluations"), ck.evaluations);
  const auto constants = next("constants");
  for (auto token : detail::split(constants, ' ')) {
    if (token.empty()) continue;
    double v = 0;
    number_of("constants", token, v);
    ck.constants.push_back(v);
  }
  if (auto best = next("best"); !best.empty()) ck.best = genotype_from_line<Gene>(best);
  std::size_t count = 0;
  number_of("genomes", next("genomes"), count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw CheckpointError("checkpoint truncated in genomes");
    ck.genomes.push_back(genotype_from_line<Gene>(line));
  }
  if (fingerprint(ck.parameters) != ck.fingerprint) {
    throw CheckpointError("checkpoint parameters do not match their fingerprint");
  }
  return ck;
}

template <class Gene>
Checkpoint<Gene> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read checkpoint '" + path.string() + "'");
  return read_checkpoint<Gene>(in);
}

struct CheckpointHeader {
  std::size_t job = 0;
  KeyValues parameters;
};

// Job index and stored parameters, readable before the gene type is known.
inline CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read checkpoint '" + path.string() + "'");
  CheckpointHeader h;
  bool have_job = false;
  bool have_parameters = false;
  std::string line;
  while (std::getline(in, line) && !(have_job && have_parameters)) {
    std::string_view view(line);
    if (view.starts_with("job ")) {
      if (!detail::parse_number(view.substr(4), h.job)) throw CheckpointError("checkpoint: malformed job");
      have_job = true;
    } else if (view.starts_with("parameters")) {
      for (auto token : detail::split(view.substr(std::min<std::size_t>(view.size(), 11)), ' ')) {
        const auto eq = token.find('=');
        if (token.empty()) continue;
        if (eq == std::string_view::npos) throw CheckpointError("checkpoint: malformed parameters");
        h.parameters.emplace(std::string(token.substr(0, eq)), detail::unescape(token.substr(eq + 1)));
      }
      have_parameters = true;
    }
  }
  if (!have_job || !have_parameters) throw CheckpointError("checkpoint header incomplete in '" + path.string() + "'");
  return h;
}

// Rebuilds the composite of an interrupted job. `base` must be the
// configuration of the aborted run up to budget and thread settings.
template <class Gene>
Composite<Gene> load_checkpoint(const Checkpoint<Gene>& ck, const Parameters& base) {
  const auto current = fingerprint_values(job_parameters(base, ck.job));
  if (fingerprint(current) != ck.fingerprint) {
    std::string diff;
    for (const auto& [key, value] : current) {
      auto it = ck.parameters.find(key);
      const std::string stored = it == ck.parameters.end() ? "<missing>" : it->second;
      if (stored != value) diff += "\n  " + key + ": checkpoint=" + stored + " current=" + value;
    }
    throw CheckpointError("checkpoint was written with different parameters:" + diff);
  }
  auto c = initialize<Gene>(base, ck.job, TerminalConstants{ck.constants});
  if (ck.genomes.size() != c.population.individuals.size()) {
    throw CheckpointError("checkpoint population size does not match parameters");
  }
  for (std::size_t i = 0; i < ck.genomes.size(); ++i) {
    if (!validate(ck.genomes[i], c.layout()).empty()) {
      throw CheckpointError("checkpoint genome " + std::to_string(i) + " is invalid");
    }
    c.population.individuals[i] = {ck.genomes[i], {}, false};
  }
  c.rng = rng_from_state_hex(ck.rng_state);
  c.population.generation = ck.generation;
  c.population.evaluations = ck.evaluations;
  // Restored individuals are re-scored; this is not search effort and is not counted.
  evaluate_population(c, std::span<Individual<Gene>>(c.population.individuals));
  if (ck.best) {
    if (!validate(*ck.best, c.layout()).empty()) throw CheckpointError("checkpoint best genome is invalid");
    c.best = {*ck.best, c.workers[0]->evaluate(*ck.best), true};
  }
  return c;
}

template <class Gene>
Composite<Gene> load_checkpoint(const std::filesystem::path& path, const Parameters& base) {
  return load_checkpoint(read_checkpoint<Gene>(path), base);
}

struct JobOptions {
  std::filesystem::path output_dir;  // empty: no checkpoint or result files
  std::ostream* report = nullptr;    // per-generation report lines
};

struct JobResult {
  std::size_t job = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  bool solved = false;
  double best_fitness = 0.0;
  std::vector<std::string> best_expressions;
  std::uint64_t generations = 0;
  std::uint64_t evaluations = 0;
  std::vector<HistoryEntry> history;
  std::vector<std::uint64_t> checkpoints;  // generations at which a checkpoint was written
};

inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::size_t job) {
  return dir / ("job_" + std::to_string(job) + ".checkpoint");
}

inline std::filesystem::path result_path(const std::filesystem::path& dir, std::size_t job) {
  return dir / ("job_" + std::to_string(job) + ".result");
}

inline constexpr std::size_t kMaxReportedExpression = std::size_t{1} << 20;

template <class Gene>
std::vector<std::string> best_expressions(const Composite<Gene>& c) {
  const auto names = c.problem->function_names();
  const auto sizes = expression_sizes(c.best.genotype, c.layout(), names);
  if (*std::max_element(sizes.begin(), sizes.end()) > kMaxReportedExpression) {
    std::vector<std::string> out;
    for (auto s : sizes) out.push_back("<expression of " + std::to_string(s) + " characters omitted>");
    return out;
  }
  return decode_expression(c.best.genotype, c.layout(), names);
}

inline void write_result_file(const JobResult& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << "job " << r.job << "\nseed " << r.seed << "\nsolved " << (r.solved ? 1 : 0)
      << "\nbest_fitness " << format_double(r.best_fitness) << "\ngenerations " << r.generations
      << "\nevaluations " << r.evaluations << '\n';
  for (std::size_t o = 0; o < r.best_expressions.size(); ++o) {
    out << "expression[" << o << "] " << r.best_expressions[o] << '\n';
  }
}

// Runs the composite to termination from wherever it currently stands.
template <class Gene>
JobResult run_composite(Composite<Gene>& c, const JobOptions& options = {}) {
  std::vector<std::size_t> pending;
  const std::size_t parents = c.params.algorithm == Algorithm::one_plus_lambda ? 1 : c.params.mu;
  for (std::size_t i = 0; i < parents; ++i) {
    if (!c.population.individuals[i].evaluated) pending.push_back(i);
  }
  if (!pending.empty()) {
    // Initial parents; not counted as search evaluations.
    evaluate_population(c, std::span<Individual<Gene>>(c.population.individuals.data(), parents));
  }

  JobResult result;
  result.job = c.job;
  result.seed = c.params.seed;
  const bool files = !options.output_dir.empty();
  auto checkpoint = [&] {
    if (!files) return;
    try {
      write_checkpoint(c, checkpoint_path(options.output_dir, c.job));
      result.checkpoints.push_back(c.population.generation);
    } catch (const std::exception& e) {
      std::cerr << "warning: checkpoint for job " << c.job << " failed: " << e.what() << '\n';
    }
  };

  const Termination termination{c.params.ideal_fitness, c.params.max_generations,
                                c.params.max_fitness_evaluations};
  auto run_result = run(
      c.population, c.best, c.layout(), termination, [&c](auto&) { step(c); },
      [&](const auto& pop, const auto&, const HistoryEntry& entry) {
        if (options.report) {
          *options.report << "job=" << c.job << " gen=" << entry.generation << " evals=" << pop.evaluations
                          << " best=" << format_double(entry.best_fitness) << " active=" << entry.active_nodes
                          << '\n';
        }
        if (c.params.checkpoint_interval > 0 && pop.generation % c.params.checkpoint_interval == 0) {
          checkpoint();
        }
      });
  if (result.checkpoints.empty() || result.checkpoints.back() != c.population.generation) checkpoint();

  result.solved = run_result.solved;
  result.best_fitness = run_result.best.fitness;
  result.generations = run_result.generations;
  result.evaluations = run_result.evaluations;
  result.history = std::move(run_result.history);
  result.best_expressions = best_expressions(c);
  if (files) write_result_file(result, result_path(options.output_dir, c.job));
  return result;
}

namespace detail {

template <class Fn>
JobResult guarded(std::size_t job, std::uint64_t seed, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;  // shared by every job
  } catch (const std::exception& e) {
    JobResult r;
    r.job = job;
    r.seed = seed;
    r.ok = false;
    r.error = e.what();
    return r;
  }
}

}  // namespace detail

template <class Gene>
JobResult run_job(const Parameters& params, std::size_t job, const JobOptions& options = {}) {
  auto c = initialize<Gene>(params, job);
  return run_composite(c, options);
}

inline JobResult run_job(const Parameters& params, std::size_t job, const JobOptions& options = {}) {
  return params.genome_kind == GenomeKind::real ? run_job<double>(params, job, options)
                                                : run_job<IntGene>(params, job, options);
}

inline JobResult resume_job(const Parameters& params, const std::filesystem::path& checkpoint,
                            const JobOptions& options = {}) {
  if (params.genome_kind == GenomeKind::real) {
    auto c = load_checkpoint<double>(checkpoint, params);
    return run_composite(c, options);
  }
  auto c = load_checkpoint<IntGene>(checkpoint, params);
  return run_composite(c, options);
}

struct JobsSummary {
  std::vector<JobResult> results;
  std::size_t successes = 0;
  std::size_t failures = 0;                           // jobs that raised an error
  std::optional<double> median_evaluations_to_success;
};

inline JobsSummary summarize(std::vector<JobResult> results) {
  JobsSummary s;
  std::vector<std::uint64_t> evals;
  for (const auto& r : results) {
    if (!r.ok) ++s.failures;
    if (r.ok && r.solved) {
      ++s.successes;
      evals.push_back(r.evaluations);
    }
  }
  if (!evals.empty()) {
    std::sort(evals.begin(), evals.end());
    const auto n = evals.size();
    s.median_evaluations_to_success =
        n % 2 ? static_cast<double>(evals[n / 2])
              : (static_cast<double>(evals[n / 2 - 1]) + static_cast<double>(evals[n / 2])) / 2.0;
  }
  s.results = std::move(results);
  return s;
}

// Consecutive jobs; a failing job is recorded and the rest still run.
inline JobsSummary run_jobs(const Parameters& params, const JobOptions& options = {}) {
  if (params.num_jobs < 1) throw ContractError("num_jobs must be >= 1");
  std::vector<JobResult> results;
  for (std::size_t job = 0; job < params.num_jobs; ++job) {
    results.push_back(detail::guarded(job, params.seed + job, [&] { return run_job(params, job, options); }));
  }
  return summarize(std::move(results));
}

}  // namespace cgp
