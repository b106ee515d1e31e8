#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace konp {

enum class Method { konp_p, konp_lr, cau, logrank, peto_peto, pepe_fleming, lee, maxcombo };

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

/// Every method, in reporting order.
std::span<const Method> all_methods();

/// True for methods defined only for two groups.
bool two_sample_only(Method method);

struct TestReport {
  std::string method;
  double statistic = 0.0;
  double pvalue = 1.0;
  std::size_t replicates = 0;  // M * B for permutation methods, 0 for asymptotic ones
  std::uint64_t seed = 0;
  bool degenerate = false;
  std::string note;  // fallbacks and regularisation applied, if any
};

}  // namespace konp
