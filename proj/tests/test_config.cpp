#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cgp/config.hpp"
#include "cgp/functions.hpp"
#include "cgp/random.hpp"

using namespace cgp;

namespace {

const char* kBase =
    "n_inputs = 2\n"
    "n_outputs = 1\n"
    "n_columns = 3\n"
    "max_arity = 2\n"
    "levels_back = 3\n"
    "lambda = 4\n";

Parameters parse(const std::string& text) {
  std::istringstream in(text);
  return parse_parameters(in);
}

template <class Error>
std::string key_of_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    if constexpr (std::is_base_of_v<ConfigError, Error>) {
      return e.key();
    } else {
      return e.what();
    }
  }
  return "<no error>";
}

}  // namespace

TEST(Config, LoadsExplicitValues) {
  const auto p = parse(kBase);
  EXPECT_EQ(p.n_inputs, 2u);
  EXPECT_EQ(p.n_outputs, 1u);
  EXPECT_EQ(p.n_columns, 3u);
  EXPECT_EQ(p.max_arity, 2u);
  EXPECT_EQ(p.levels_back, 3u);
  EXPECT_EQ(p.lambda, 4u);
}

TEST(Config, Defaults) {
  const auto p = parse("n_inputs = 2\nn_outputs = 1\nn_columns = 7\nmax_arity = 2\n");
  EXPECT_EQ(p.n_rows, 1u);
  EXPECT_EQ(p.levels_back, 7u);
  EXPECT_EQ(p.num_eval_threads, 1u);
  EXPECT_EQ(p.neutrality_epsilon, 0.0);
  EXPECT_EQ(p.crossover_rate, 0.0);
  EXPECT_EQ(p.checkpoint_interval, 100u);
  EXPECT_EQ(p.functions, "AND,OR,NAND,NOR,XOR,XNOR,NOT,ID");
  EXPECT_EQ(p.mutation_pipeline, "point:0.05");
}

TEST(Config, RegressionDerivedDefaults) {
  const auto p = parse("n_inputs = 1\nn_outputs = 1\nn_columns = 7\nmax_arity = 2\nproblem = koza-1\n");
  EXPECT_EQ(p.neutrality_epsilon, 1e-9);
  EXPECT_DOUBLE_EQ(p.ideal_fitness, 0.2);
  EXPECT_EQ(p.functions, "add,sub,mul,div,sin,cos,exp,log");
}

TEST(Config, CommentsAndBlankLines) {
  const auto p = parse(std::string("# header\n\n") + kBase + "   # trailing\nseed = 9 # nine\n");
  EXPECT_EQ(p.seed, 9u);
}

TEST(Config, MissingRequiredKeyNamesIt) {
  EXPECT_EQ(key_of_error<ConfigError>("n_outputs = 1\nn_columns = 3\nmax_arity = 2\n"), "n_inputs");
}

TEST(Config, LevelsBackAboveColumnsIsValidationError) {
  std::string text = kBase;
  text += "levels_back = 5\n";
  try {
    parse(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.key(), "levels_back");
    EXPECT_NE(std::string(e.what()).find("n_columns=3"), std::string::npos) << e.what();
  }
}

TEST(Config, SyntaxErrorCarriesLineNumber) {
  try {
    parse("n_inputs = 2\n# ok\nthis line has no equals\n");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Config, UnknownKeyListsValidKeys) {
  try {
    parse(std::string(kBase) + "lamda = 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "lamda");
    EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
  }
}

TEST(Config, InvariantViolations) {
  for (const auto& [line, key] : std::vector<std::pair<std::string, std::string>>{
           {"lambda = 0", "lambda"},
           {"mu = 0", "mu"},
           {"point_mutation_rate = 1.5", "point_mutation_rate"},
           {"num_eval_threads = 0", "num_eval_threads"},
           {"n_rows = 0", "n_rows"},
           {"mu = 3", "mu"},
           {"crossover_rate = 0.5", "crossover_rate"},
           {"algorithm = simulated_annealing", "algorithm"},
           {"problem = nosuch", "problem"},
           {"lambda = -1", "lambda"},
           {"lambda = 2.5", "lambda"}}) {
    EXPECT_EQ(key_of_error<ConfigError>(std::string(kBase) + line + "\n"), key) << line;
  }
}

TEST(Config, OverridePrecedence) {
  const auto p = parse(kBase);
  const std::vector<std::string> over{"lambda=8"};
  EXPECT_EQ(merge_cli_overrides(p, over).lambda, 8u);
  EXPECT_EQ(merge_cli_overrides(p, {}), p);
  const std::vector<std::string> bad{"lambda=0"};
  EXPECT_THROW(merge_cli_overrides(p, bad), ValidationError);
  const std::vector<std::string> unknown{"lamda=3"};
  EXPECT_THROW(merge_cli_overrides(p, unknown), ConfigError);
}

TEST(Config, DerivedDefaultsFollowOverrides) {
  const auto p = parse("n_inputs = 2\nn_outputs = 1\nn_columns = 3\nmax_arity = 2\n");
  const std::vector<std::string> over{"n_columns=10", "point_mutation_rate=0.1"};
  const auto q = merge_cli_overrides(p, over);
  EXPECT_EQ(q.levels_back, 10u);
  EXPECT_EQ(q.mutation_pipeline, "point:0.1");
  // An explicit value is not re-derived.
  EXPECT_EQ(merge_cli_overrides(parse(kBase + std::string("levels_back = 2\n")), over).levels_back, 2u);
}

TEST(Config, EveryKeyAcceptsItsSerializedValue) {
  auto p = parse(kBase);
  for (const auto& [key, value] : to_key_values(p)) {
    const std::vector<std::string> over{key + "=" + value};
    EXPECT_EQ(merge_cli_overrides(p, over), p) << key;
  }
}

// Randomized valid files: load, merge, serialize, load again.
TEST(Config, RoundTripProperty) {
  std::mt19937_64 rng(5);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  for (int trial = 0; trial < 500; ++trial) {
    std::ostringstream file;
    const auto cols = pick(1, 50);
    file << "n_inputs = " << pick(1, 8) << "\nn_outputs = " << pick(1, 4) << "\nn_rows = " << pick(1, 4)
         << "\nn_columns = " << cols << "\nmax_arity = " << pick(1, 4) << "\nlevels_back = " << pick(1, cols)
         << "\nlambda = " << pick(1, 16) << "\npoint_mutation_rate = " << std::uniform_real_distribution<>(0, 1)(rng)
         << "\nseed = " << rng() << "\nnum_constants = " << pick(0, 5) << "\nconstant_range = -2,3\n";
    if (trial % 2) file << "algorithm = mu_plus_lambda\nmu = " << pick(1, 10) << "\ncrossover_rate = 0.25\n";
    const auto p = parse(file.str());
    validate_parameters(p);
    const std::vector<std::string> over{"lambda=" + std::to_string(pick(1, 9))};
    const auto merged = merge_cli_overrides(p, over);
    EXPECT_EQ(parse(serialize_parameters(merged)), merged);
  }
}

TEST(Config, ProblemDomain) {
  EXPECT_EQ(problem_domain("parity-3"), Domain::logic_synthesis);
  EXPECT_EQ(problem_domain("plu"), Domain::logic_synthesis);
  EXPECT_EQ(problem_domain("koza-1"), Domain::symbolic_regression);
  EXPECT_EQ(problem_domain("nguyen-7"), Domain::symbolic_regression);
  EXPECT_FALSE(problem_domain("parity-0"));
  EXPECT_FALSE(problem_domain("parity-25"));
  EXPECT_FALSE(problem_domain("koza-9"));
}

TEST(Functions, DefaultSets) {
  const auto b = boolean_function_set<std::uint64_t>();
  EXPECT_EQ(b.size(), 8u);
  EXPECT_TRUE(b.all_bitwise());
  EXPECT_EQ(b.arities(), (std::vector<std::size_t>{2, 2, 2, 2, 2, 2, 1, 1}));
  const auto r = regression_function_set();
  EXPECT_EQ(r.names(), (std::vector<std::string>{"add", "sub", "mul", "div", "sin", "cos", "exp", "log"}));
  EXPECT_FALSE(r.all_bitwise());
  EXPECT_THROW(boolean_function_set<std::uint64_t>("AND,add"), ConfigError);
  EXPECT_THROW(b.check_arity(1), ValidationError);
}

TEST(Functions, ProtectedOperators) {
  const auto r = regression_function_set("div,log");
  const double d0[] = {3.0, 0.0};
  const double d1[] = {3.0, 1e-13};
  const double d2[] = {3.0, 2.0};
  EXPECT_EQ(r[0].apply(d0), 1.0);
  EXPECT_EQ(r[0].apply(d1), 1.0);
  EXPECT_EQ(r[0].apply(d2), 1.5);
  const double l0[] = {0.0};
  const double l1[] = {-std::exp(2.0)};
  EXPECT_EQ(r[1].apply(l0), 0.0);
  EXPECT_DOUBLE_EQ(r[1].apply(l1), 2.0);
}

TEST(Functions, BitwiseSemanticsMatchTruthTables) {
  const auto b = boolean_function_set<std::uint64_t>();
  const std::uint64_t a = 0b1010, c = 0b1100;
  const std::uint64_t args[] = {a, c};
  const std::uint64_t expected[] = {0b1000, 0b1110, ~0b1000ULL, ~0b1110ULL, 0b0110, ~0b0110ULL, ~a, a};
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b[i].apply(args), expected[i]) << b[i].name;
}

TEST(Erc, EmptyAndDeterministic) {
  Rng r1(42), r2(42);
  EXPECT_TRUE(generate_erc(0, -1, 1, r1).values.empty());
  EXPECT_EQ(generate_erc(4, -1, 1, r1).values, generate_erc(4, -1, 1, r2).values);
}

TEST(Erc, RangeAndMean) {
  Rng rng(3);
  const auto c = generate_erc(1000, -1.0, 1.0, rng);
  double sum = 0;
  for (double v : c.values) {
    EXPECT_GE(v, -1.0);
    EXPECT_LT(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 1000.0, 0.0, 0.1);
}

TEST(Erc, BadRange) {
  Rng rng(3);
  EXPECT_THROW(generate_erc(1, 1.0, 1.0, rng), RangeError);
  EXPECT_NO_THROW(generate_erc(0, 1.0, 1.0, rng));
}

TEST(Random, StateRoundTrip) {
  Rng rng(77);
  rng.discard(1234);
  auto copy = rng_from_state_hex(rng_state_hex(rng));
  EXPECT_EQ(copy, rng);
  EXPECT_EQ(copy(), rng());
  EXPECT_THROW(rng_from_state_hex("12 34"), CheckpointError);
}

TEST(Pipeline, Parse) {
  const auto p = parse_pipeline("point:0.05, inversion:0.1:4, duplication:0.1:3");
  ASSERT_EQ(p.stages.size(), 3u);
  EXPECT_EQ(p.stages[0].op, MutationOp::point);
  EXPECT_EQ(p.stages[0].rate, 0.05);
  EXPECT_EQ(p.stages[1].op, MutationOp::inversion);
  EXPECT_EQ(p.stages[1].max_segment, 4u);
  EXPECT_EQ(p.stages[2].max_segment, 3u);
  EXPECT_THROW(parse_pipeline("shuffle:0.1"), ConfigError);
  EXPECT_THROW(parse_pipeline("point:2"), ValidationError);
  EXPECT_THROW(parse_pipeline("point"), ConfigError);
}
