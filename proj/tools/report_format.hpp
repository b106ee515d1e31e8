#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "konp/permute.hpp"
#include "konp/power.hpp"
#include "konp/report.hpp"

namespace konp::cli {

enum class OutputFormat { table, csv, json };

OutputFormat parse_format(const std::string& name);

/// Everything needed to reproduce a run; echoed into every output.
struct RunMetadata {
  std::string command;
  std::string source;  // input path or scenario name
  std::uint64_t seed = 0;
  PermutationPlan plan;
  std::vector<std::string> methods;
};

std::string format_pvalue(double p);  // four significant digits

void write_test_reports(std::ostream& out, OutputFormat format, const RunMetadata& meta,
                        const std::vector<TestReport>& reports,
                        const std::optional<double>& runtime_seconds);

void write_power_results(std::ostream& out, OutputFormat format, const RunMetadata& meta,
                         const std::vector<PowerResult>& rows);

struct BenchmarkRow {
  std::size_t n = 0;
  double censoring_1 = 0.0;
  double censoring_2 = 0.0;
  double observed_censoring = 0.0;
  unsigned threads = 1;
  double seconds = 0.0;
  double pvalue_pearson = 1.0;
  double pvalue_lr = 1.0;
};

void write_benchmark(std::ostream& out, OutputFormat format, const RunMetadata& meta,
                     const std::vector<BenchmarkRow>& rows);

}  // namespace konp::cli
