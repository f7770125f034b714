#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgp/config.hpp"
#include "cgp/engine.hpp"
#include "cgp/problems.hpp"

namespace cgp {

enum class Subcommand { run, resume, gen_dataset, print_plu };

struct CliInvocation {
  Subcommand subcommand = Subcommand::run;
  std::filesystem::path parameter_file;
  std::vector<std::string> overrides;
  std::optional<std::filesystem::path> checkpoint_path;
  std::filesystem::path output_dir;
  std::string benchmark;          // gen-dataset
  std::uint64_t dataset_seed = 0; // gen-dataset
  std::filesystem::path plu_file; // print-plu

  bool operator==(const CliInvocation&) const = default;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

// Carries the text to print and the process exit code (0 for --help).
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, int exit_code = kExitConfig)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

namespace detail {

struct CliApp {
  CLI::App app{"Cartesian Genetic Programming experiment runner", "cgp"};
  CLI::App* run = nullptr;
  CLI::App* resume = nullptr;
  CLI::App* gen = nullptr;
  CLI::App* plu = nullptr;

  std::string params, checkpoint, output, benchmark, plu_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> jobs, seed, threads;
  std::uint64_t dataset_seed = 0;

  CliApp() {
    app.require_subcommand(1);
    run = app.add_subcommand("run", "run num_jobs jobs from a parameter file");
    resume = app.add_subcommand("resume", "continue a job from its checkpoint");
    gen = app.add_subcommand("gen-dataset", "print a regression benchmark dataset as CSV");
    plu = app.add_subcommand("print-plu", "expand a packed truth table to one row per entry");

    for (auto* sub : {run, resume}) {
      sub->add_option("-p,--params", params, "parameter file")->check(CLI::ExistingFile);
      sub->add_option("-o,--output", output, "output directory");
      sub->add_option("--set", sets, "override key=value (repeatable)")->allow_extra_args(false);
      sub->add_option("--jobs", jobs, "same as --set num_jobs=<n>");
      sub->add_option("--seed", seed, "same as --set seed=<n>");
      sub->add_option("--threads", threads, "same as --set num_eval_threads=<n>");
    }
    run->get_option("--params")->required();
    resume->add_option("-c,--checkpoint", checkpoint, "checkpoint file")->required();

    gen->add_option("benchmark", benchmark, "benchmark id")->required();
    gen->add_option("seed", dataset_seed, "sampling seed")->required();
    plu->add_option("file", plu_file, "PLU file")->required();
  }
};

}  // namespace detail

inline std::string cli_usage() {
  detail::CliApp cli;
  return cli.app.help();
}

// argv without the program name. Pure: no file is opened besides the
// existence check on -p.
inline CliInvocation parse_cli(std::span<const std::string> argv) {
  detail::CliApp cli;
  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    cli.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(cli.app.help(), kExitOk);
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\n" + cli.app.help(), kExitConfig);
  }

  CliInvocation inv;
  if (cli.run->parsed()) inv.subcommand = Subcommand::run;
  else if (cli.resume->parsed()) inv.subcommand = Subcommand::resume;
  else if (cli.gen->parsed()) inv.subcommand = Subcommand::gen_dataset;
  else inv.subcommand = Subcommand::print_plu;

  inv.parameter_file = cli.params;
  inv.overrides = cli.sets;
  if (cli.jobs) inv.overrides.push_back("num_jobs=" + std::to_string(*cli.jobs));
  if (cli.seed) inv.overrides.push_back("seed=" + std::to_string(*cli.seed));
  if (cli.threads) inv.overrides.push_back("num_eval_threads=" + std::to_string(*cli.threads));
  if (!cli.checkpoint.empty()) inv.checkpoint_path = cli.checkpoint;
  inv.output_dir = cli.output;
  inv.benchmark = cli.benchmark;
  inv.dataset_seed = cli.dataset_seed;
  inv.plu_file = cli.plu_file;
  return inv;
}

inline CliInvocation parse_cli(const std::vector<std::string>& argv) {
  return parse_cli(std::span<const std::string>(argv));
}

// One line per entry: input bits x0..x{n-1}, a space, output bits y0..
inline void print_plu_rows(const TruthTable& t, std::ostream& out) {
  out << "# x0..x" << t.n_inputs - 1 << " y0..y" << t.n_outputs - 1 << '\n';
  for (std::uint64_t e = 0; e < t.total_entries(); ++e) {
    for (std::size_t i = 0; i < t.n_inputs; ++i) out << ((e >> i) & 1U);
    out << ' ';
    for (std::size_t o = 0; o < t.n_outputs; ++o) out << (t.output_bit(e, o) ? 1 : 0);
    out << '\n';
  }
}

namespace detail {

inline void report_summary(const JobsSummary& s, std::ostream& out) {
  for (const auto& r : s.results) {
    if (!r.ok) {
      out << "job=" << r.job << " failed: " << r.error << '\n';
    } else {
      out << "job=" << r.job << " seed=" << r.seed << " solved=" << (r.solved ? 1 : 0)
          << " best=" << format_double(r.best_fitness) << " evals=" << r.evaluations << '\n';
    }
  }
  out << "summary jobs=" << s.results.size() << " successes=" << s.successes
      << " failures=" << s.failures << " median_evals_to_success="
      << (s.median_evaluations_to_success ? format_double(*s.median_evaluations_to_success) : "NA")
      << '\n';
}

inline Parameters resume_parameters(const CliInvocation& inv) {
  if (!inv.parameter_file.empty()) return merge_cli_overrides(load_parameters(inv.parameter_file), inv.overrides);
  // Without -p the stored trajectory parameters are used; budgets come from overrides or defaults.
  const auto header = read_checkpoint_header(*inv.checkpoint_path);
  auto values = header.parameters;
  std::uint64_t seed = 0;
  if (auto it = values.find("seed"); it != values.end() && detail::parse_number(it->second, seed)) {
    it->second = std::to_string(seed - header.job);
  }
  return merge_cli_overrides(build_parameters(values), inv.overrides);
}

}  // namespace detail

// Executes a parsed invocation. Returns the process exit code.
inline int run_cli(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.subcommand) {
      case Subcommand::gen_dataset: {
        Rng rng(inv.dataset_seed);
        write_csv(generate_sr_dataset(inv.benchmark, rng), out);
        return kExitOk;
      }
      case Subcommand::print_plu:
        print_plu_rows(read_plu(inv.plu_file), out);
        return kExitOk;
      case Subcommand::run: {
        const auto params = merge_cli_overrides(load_parameters(inv.parameter_file), inv.overrides);
        JobOptions options{inv.output_dir.empty() ? std::filesystem::path(".") : inv.output_dir, &out};
        std::filesystem::create_directories(options.output_dir);
        const auto summary = run_jobs(params, options);
        detail::report_summary(summary, out);
        return summary.failures == 0 ? kExitOk : kExitRuntime;
      }
      case Subcommand::resume: {
        const auto params = detail::resume_parameters(inv);
        const auto& checkpoint = *inv.checkpoint_path;
        JobOptions options{inv.output_dir.empty() ? checkpoint.parent_path() : inv.output_dir, &out};
        if (options.output_dir.empty()) options.output_dir = ".";
        std::filesystem::create_directories(options.output_dir);
        const auto result = resume_job(params, checkpoint, options);
        detail::report_summary(summarize({result}), out);
        return kExitOk;
      }
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SyntaxError& e) {
    if (inv.subcommand == Subcommand::run || inv.subcommand == Subcommand::resume) {
      err << "parameter file: " << e.what() << '\n';
      return kExitConfig;
    }
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

inline int cli_main(std::span<const std::string> argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CliInvocation inv;
  try {
    inv = parse_cli(argv);
  } catch (const UsageError& e) {
    (e.exit_code() == kExitOk ? out : err) << e.what() << '\n';
    return e.exit_code();
  }
  return run_cli(inv, out, err);
}

}  // namespace cgp
