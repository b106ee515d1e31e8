#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "konp/dataset.hpp"
#include "konp/distributions.hpp"
#include "konp/rng.hpp"

namespace konp {

/// A fully specified generative model: per-group failure and censoring laws.
struct ScenarioSpec {
  std::string name;
  std::size_t k = 0;
  std::vector<Distribution> failure;
  std::vector<Distribution> censoring;
  std::vector<double> fractions;  // n_k / n, sums to one

  void validate() const;
};

/// A scenario with several named censoring patterns (equal_25, equal_50,
/// unequal_mild, unequal_severe for the built-ins).
struct ScenarioFamily {
  std::string name;
  std::string description;
  std::vector<Distribution> failure;
  std::map<std::string, std::vector<Distribution>> censoring;
  std::vector<double> fractions;  // empty means equal groups

  std::vector<std::string> censoring_variants() const;
  ScenarioSpec resolve(std::string_view censoring_variant) const;
};

inline constexpr const char* kCensoringVariants[] = {"equal_25", "equal_50", "unequal_mild",
                                                     "unequal_severe"};

const std::vector<ScenarioFamily>& scenario_registry();
std::vector<std::string> scenario_names();

/// Registry lookup; throws ValidationError listing the known names.
const ScenarioFamily& find_scenario(std::string_view name);

/// Reads scenarios from the declarative text format:
///
///   [scenario my-scenario]
///   k = 2
///   failure.1 = exp(1)
///   failure.2 = weibull(1.5,1)
///   censoring.equal_25.1 = unif(0,3)   # variant-specific
///   censoring.2 = unif(0,3)            # shorthand for variant "default"
///   fractions = 0.5, 0.5               # optional
///
/// Lines starting with '#' are comments.
std::vector<ScenarioFamily> parse_scenarios(std::istream& in);
std::vector<ScenarioFamily> load_scenarios(const std::string& path);

/// Group sizes for n split by `fractions`, largest remainder rounding.
std::vector<std::size_t> allocate_groups(std::size_t n, const std::vector<double>& fractions);

/// Draws n subjects: X and C independently from the subject's group laws,
/// T = min(X, C), Delta = I(X <= C). Group labels are "1".."K".
SurvivalDataset generate_dataset(const ScenarioSpec& scenario, std::size_t n, RandomStream& rng);

}  // namespace konp
