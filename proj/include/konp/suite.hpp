#pragma once

#include <span>
#include <vector>

#include "konp/dataset.hpp"
#include "konp/mvn.hpp"
#include "konp/permute.hpp"
#include "konp/report.hpp"

namespace konp {

struct SuiteOptions {
  PermutationPlan plan;
  MvnOptions mvn;
};

/// The methods applicable to a K-group dataset, in reporting order.
std::vector<Method> methods_for(std::size_t group_count);

/// Adds the inputs of cau when it is requested, removes duplicates and sorts into
/// reporting order. Throws ValidationError for two-sample methods on K > 2 data.
std::vector<Method> resolve_methods(std::span<const Method> requested, std::size_t group_count);

/// Runs the requested tests. KONP and Pepe-Fleming share one pool of M * B
/// imputation-permutation replicates; the weighted logrank family is
/// asymptotic; cau combines the KONP-P, KONP-LR and logrank p-values.
std::vector<TestReport> run_test_suite(const SurvivalDataset& data,
                                       std::span<const Method> methods,
                                       const SuiteOptions& options = {});

}  // namespace konp
