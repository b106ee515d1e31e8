#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "konp/dataset.hpp"
#include "konp/error.hpp"
#include "konp/numeric.hpp"
#include "konp/power.hpp"
#include "konp/scenarios.hpp"
#include "konp/suite.hpp"
#include "report_format.hpp"

namespace konp::cli {

namespace {

struct PlanArgs {
  std::size_t imputations = 0;
  std::size_t permutations = 0;
  std::uint64_t seed = 1;
  std::string rule = "paper_exact";
  unsigned threads = 0;
  std::string format = "table";
  std::string output;
};

void add_plan_options(CLI::App* cmd, PlanArgs& a, std::size_t m, std::size_t b) {
  a.imputations = m;
  a.permutations = b;
  cmd->add_option("--imputations,-M", a.imputations, "Imputations per test")->capture_default_str();
  cmd->add_option("--permutations,-B", a.permutations, "Permutations per imputation")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  cmd->add_option("--pvalue-rule", a.rule, "paper_exact or add_one")
      ->check(CLI::IsMember({"paper_exact", "add_one"}))
      ->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--format", a.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output,-o", a.output, "Write results to this file instead of stdout");
}

PermutationPlan make_plan(const PlanArgs& a) {
  if (a.imputations == 0 || a.permutations == 0)
    throw ValidationError(ErrorCode::invalid_argument,
                          "imputations and permutations must be positive");
  PermutationPlan plan;
  plan.imputations = a.imputations;
  plan.permutations = a.permutations;
  plan.seed = a.seed;
  plan.rule = a.rule == "add_one" ? PValueRule::add_one : PValueRule::paper_exact;
  plan.threads = a.threads;
  return plan;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Method> parse_methods(const std::string& text, std::size_t group_count) {
  std::vector<Method> out;
  for (const auto& name : split(text, ',')) {
    if (name == "all") {
      const auto all = methods_for(group_count);
      out.insert(out.end(), all.begin(), all.end());
      continue;
    }
    const auto m = parse_method(name);
    if (!m) {
      std::string known;
      for (Method x : all_methods())
        known += std::string(known.empty() ? "" : ", ") + std::string(method_name(x));
      throw ValidationError(ErrorCode::invalid_argument,
                            "unknown test '" + name + "' (known: all, " + known + ")");
    }
    out.push_back(*m);
  }
  if (out.empty()) throw ValidationError(ErrorCode::invalid_argument, "no tests requested");
  return out;
}

std::vector<std::string> names_of(const std::vector<Method>& methods) {
  std::vector<std::string> out;
  for (Method m : methods) out.emplace_back(method_name(m));
  return out;
}

// Output goes to the named file when given, else to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot open output file '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw IoError("failed writing output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void warn_small_plan(const PermutationPlan& plan, std::ostream& err) {
  if (plan.replicates() < kMinRecommendedReplicates)
    err << "warning: only " << plan.replicates()
        << " replicates; p-values have coarse resolution\n";
}

struct TestArgs {
  PlanArgs plan;
  std::string input;
  std::string tests = "all";
  CsvSchema schema;
  bool timing = false;
};

int cmd_test(const TestArgs& a, std::ostream& out, std::ostream& err) {
  const SurvivalDataset data = load_csv(a.input, a.schema);
  const std::vector<Method> methods =
      resolve_methods(parse_methods(a.tests, data.group_count()), data.group_count());
  SuiteOptions options;
  options.plan = make_plan(a.plan);
  warn_small_plan(options.plan, err);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<TestReport> reports = run_test_suite(data, methods, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunMetadata meta{"test", a.input, options.plan.seed, options.plan, names_of(methods)};
  Sink sink(a.plan.output, out);
  write_test_reports(sink.get(), parse_format(a.plan.format), meta, reports,
                     a.timing ? std::optional<double>(seconds) : std::nullopt);
  sink.finish();
  return ok;
}

struct SimulateArgs {
  PlanArgs plan;
  std::string scenario;
  std::string scenario_file;
  std::vector<std::size_t> sizes{100};
  std::string censoring = "equal_25";
  std::string tests = "konp_p";
  std::size_t replications = 500;
  double alpha = 0.05;
  bool list = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<ScenarioFamily> from_file;
  if (!a.scenario_file.empty()) from_file = load_scenarios(a.scenario_file);
  if (a.list) {
    const std::vector<ScenarioFamily>* sources[] = {&from_file, &scenario_registry()};
    for (const auto* families : sources)
      for (const auto& f : *families) {
        out << f.name << "  k=" << f.failure.size() << "  censoring=";
        const auto variants = f.censoring_variants();
        for (std::size_t i = 0; i < variants.size(); ++i) out << (i ? "," : "") << variants[i];
        out << "  " << f.description << "\n";
      }
    return ok;
  }
  if (a.scenario.empty())
    throw ValidationError(ErrorCode::invalid_argument, "--scenario is required (see --list)");
  const ScenarioFamily* family = nullptr;
  for (const auto& f : from_file)
    if (f.name == a.scenario) family = &f;
  if (!family) family = &find_scenario(a.scenario);

  PowerOptions options;
  options.sizes = a.sizes;
  options.censoring = a.censoring;
  options.methods = parse_methods(a.tests, family->failure.size());
  options.replications = a.replications;
  options.alpha = a.alpha;
  options.plan = make_plan(a.plan);
  options.seed = a.plan.seed;
  options.threads = a.plan.threads;
  warn_small_plan(options.plan, err);
  const std::vector<PowerResult> rows = run_power_study(*family, options);

  RunMetadata meta{"simulate", family->name, a.plan.seed, options.plan,
                   names_of(resolve_methods(options.methods, family->failure.size()))};
  Sink sink(a.plan.output, out);
  write_power_results(sink.get(), parse_format(a.plan.format), meta, rows);
  sink.finish();
  return ok;
}

struct BenchmarkArgs {
  PlanArgs plan;
  std::vector<std::size_t> sizes{100, 200};
  std::vector<std::string> censoring{"0.25:0.25"};
};

double parse_rate(const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || !(v > 0.0 && v < 100.0))
    throw ValidationError(ErrorCode::invalid_argument, "bad censoring rate '" + text + "'");
  return v >= 1.0 ? v / 100.0 : v;
}

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out, std::ostream&) {
  SuiteOptions options;
  options.plan = make_plan(a.plan);
  const unsigned threads = resolve_threads(options.plan.threads);
  std::vector<BenchmarkRow> rows;
  const std::vector<Method> methods{Method::konp_p, Method::konp_lr};
  for (const auto& pair : a.censoring) {
    const auto parts = split(pair, ':');
    if (parts.size() != 2)
      throw ValidationError(ErrorCode::invalid_argument,
                            "censoring pairs look like 0.25:0.25 or 25:25");
    const double c1 = parse_rate(parts[0]);
    const double c2 = parse_rate(parts[1]);
    for (std::size_t n : a.sizes) {
      const SurvivalDataset data = benchmark_dataset(n, c1, c2, derive_seed(a.plan.seed, n));
      std::size_t events = 0;
      for (auto e : data.events()) events += e;
      const auto start = std::chrono::steady_clock::now();
      const auto reports = run_test_suite(data, methods, options);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rows.push_back({n, c1, c2, 1.0 - static_cast<double>(events) / static_cast<double>(n),
                      threads, seconds, reports[0].pvalue, reports[1].pvalue});
    }
  }
  RunMetadata meta{"benchmark", "log-logistic null", a.plan.seed, options.plan, names_of(methods)};
  Sink sink(a.plan.output, out);
  write_benchmark(sink.get(), parse_format(a.plan.format), meta, rows);
  sink.finish();
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"KONP K-sample tests for right-censored survival data", "konp"};
  app.set_version_flag("--version", std::string(KONP_VERSION));
  app.require_subcommand(1);

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Test equality of the group survival curves");
  test_cmd->add_option("--input,-i", test.input, "CSV file with time, status and group columns")
      ->required();
  test_cmd->add_option("--tests,-t", test.tests, "Comma-separated tests, or 'all'")
      ->capture_default_str();
  test_cmd->add_option("--time-col,--time-column", test.schema.time_column)->capture_default_str();
  test_cmd->add_option("--status-col,--status-column", test.schema.status_column)
      ->capture_default_str();
  test_cmd->add_option("--group-col,--group-column", test.schema.group_column)
      ->capture_default_str();
  test_cmd->add_flag("--timing", test.timing,
                     "Add a runtime column (output no longer reproducible)");
  add_plan_options(test_cmd, test.plan, 10, 10000);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Estimate size or power on a scenario");
  sim_cmd->add_option("--scenario,-s", sim.scenario, "Scenario name");
  sim_cmd->add_option("--scenario-file", sim.scenario_file, "Extra scenario definitions");
  sim_cmd->add_option("--sizes,-n", sim.sizes, "Total sample sizes")->delimiter(',')
      ->capture_default_str();
  sim_cmd->add_option("--censoring,-c", sim.censoring, "Censoring variant")->capture_default_str();
  sim_cmd->add_option("--tests,-t", sim.tests, "Comma-separated tests, or 'all'")
      ->capture_default_str();
  sim_cmd->add_option("--replications,-r", sim.replications)->capture_default_str();
  sim_cmd->add_option("--alpha", sim.alpha)->capture_default_str();
  sim_cmd->add_flag("--list", sim.list, "List the available scenarios");
  add_plan_options(sim_cmd, sim.plan, 1, 1000);

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Time KONP on null log-logistic data");
  bench_cmd->add_option("--sizes,-n", bench.sizes, "Total sample sizes")->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--censoring,-c", bench.censoring,
                        "Censoring rate pairs of groups 1 and 2, e.g. 0.25:0.25,0.27:0.55")
      ->delimiter(',');
  bench.plan.threads = 1;
  add_plan_options(bench_cmd, bench.plan, 1, 1000);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : validation_failure;
  }

  try {
    if (test_cmd->parsed()) return cmd_test(test, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(sim, out, err);
    if (bench_cmd->parsed()) return cmd_benchmark(bench, out, err);
    return internal_failure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return validation_failure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return io_failure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return internal_failure;
  }
}

}  // namespace konp::cli
