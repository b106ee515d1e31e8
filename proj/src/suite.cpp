#include "konp/suite.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "konp/error.hpp"
#include "konp/statistic.hpp"
#include "konp/wlr.hpp"

namespace konp {

namespace {

constexpr std::array<Method, 8> kAllMethods{Method::konp_p,   Method::konp_lr,
                                            Method::cau,      Method::logrank,
                                            Method::peto_peto, Method::pepe_fleming,
                                            Method::lee,      Method::maxcombo};

bool contains(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::konp_p: return "konp_p";
    case Method::konp_lr: return "konp_lr";
    case Method::cau: return "cau";
    case Method::logrank: return "logrank";
    case Method::peto_peto: return "peto_peto";
    case Method::pepe_fleming: return "pepe_fleming";
    case Method::lee: return "lee";
    case Method::maxcombo: return "maxcombo";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (method_name(m) == name) return m;
  return std::nullopt;
}

std::span<const Method> all_methods() { return kAllMethods; }

bool two_sample_only(Method method) {
  return method == Method::pepe_fleming || method == Method::lee || method == Method::maxcombo;
}

std::vector<Method> methods_for(std::size_t group_count) {
  std::vector<Method> out;
  for (Method m : kAllMethods)
    if (group_count == 2 || !two_sample_only(m)) out.push_back(m);
  return out;
}

std::vector<Method> resolve_methods(std::span<const Method> requested, std::size_t group_count) {
  std::vector<Method> wanted(requested.begin(), requested.end());
  if (contains(wanted, Method::cau))
    wanted.insert(wanted.end(), {Method::konp_p, Method::konp_lr, Method::logrank});
  std::vector<Method> out;
  for (Method m : kAllMethods) {
    if (!contains(wanted, m)) continue;
    if (group_count != 2 && two_sample_only(m))
      throw ValidationError(ErrorCode::invalid_argument,
                            std::string(method_name(m)) +
                                " requires exactly two groups; data has " +
                                std::to_string(group_count));
    out.push_back(m);
  }
  return out;
}

std::vector<TestReport> run_test_suite(const SurvivalDataset& data,
                                       std::span<const Method> methods,
                                       const SuiteOptions& options) {
  const std::vector<Method> resolved = resolve_methods(methods, data.group_count());
  const bool want_p = contains(resolved, Method::konp_p);
  const bool want_lr = contains(resolved, Method::konp_lr);
  const bool want_pf = contains(resolved, Method::pepe_fleming);

  std::vector<TestReport> permutation_reports;
  std::vector<std::string> names;
  if (want_p) names.emplace_back("konp_p");
  if (want_lr) names.emplace_back("konp_lr");
  if (want_pf) names.emplace_back("pepe_fleming");
  if (!names.empty()) {
    const KonpOptions konp_options{want_p, want_lr, false};
    const StatisticFn fn = [&](const SampleView& sample) {
      thread_local KonpWorkspace workspace;
      std::vector<StatisticValue> out;
      if (want_p || want_lr) {
        const KonpResult r = workspace.evaluate(sample, konp_options);
        if (want_p) out.push_back({r.q_pearson, r.degenerate});
        if (want_lr) out.push_back({r.q_lr, r.degenerate});
      }
      if (want_pf) out.push_back({std::abs(pepe_fleming_statistic(sample)), false});
      return out;
    };
    permutation_reports = permutation_pvalue(data, fn, names, options.plan);
  }
  const auto permuted = [&](std::string_view name) {
    for (const auto& r : permutation_reports)
      if (r.method == name) return r;
    throw std::logic_error("missing permutation report");
  };

  std::vector<TestReport> reports;
  std::optional<TestReport> logrank;
  if (contains(resolved, Method::logrank))
    logrank = k_sample_logrank(data, LogrankWeight::unit);
  for (Method m : resolved) {
    switch (m) {
      case Method::konp_p:
      case Method::konp_lr:
      case Method::pepe_fleming:
        reports.push_back(permuted(method_name(m)));
        break;
      case Method::logrank:
        reports.push_back(*logrank);
        break;
      case Method::peto_peto:
        reports.push_back(k_sample_logrank(data, LogrankWeight::pooled_km_left));
        break;
      case Method::lee:
        reports.push_back(lee_test(data, options.mvn));
        break;
      case Method::maxcombo:
        reports.push_back(maxcombo_test(data, options.mvn));
        break;
      case Method::cau: {
        const std::array<double, 3> p{permuted("konp_p").pvalue, permuted("konp_lr").pvalue,
                                      logrank->pvalue};
        const std::size_t r = options.plan.replicates();
        TestReport report;
        report.method = "cau";
        report.statistic = cauchy_statistic(p, r);
        report.pvalue = cauchy_combination(p, r);
        report.replicates = r;
        report.seed = options.plan.seed;
        reports.push_back(report);
        break;
      }
    }
  }
  return reports;
}

}  // namespace konp
