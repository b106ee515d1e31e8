#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "konp/dataset.hpp"
#include "konp/error.hpp"
#include "konp/permute.hpp"
#include "konp/power.hpp"
#include "konp/scenarios.hpp"
#include "konp/statistic.hpp"
#include "konp/suite.hpp"
#include "konp/wlr.hpp"

namespace py = pybind11;

namespace {

konp::SurvivalDataset make_dataset(std::vector<double> times, std::vector<int> events,
                                   std::vector<std::string> labels) {
  std::vector<std::uint8_t> e;
  e.reserve(events.size());
  for (int x : events) {
    if (x != 0 && x != 1)
      throw konp::ValidationError(konp::ErrorCode::bad_status, "events must be 0 or 1");
    e.push_back(static_cast<std::uint8_t>(x));
  }
  return konp::SurvivalDataset(std::move(times), std::move(e), std::move(labels));
}

py::dict report_dict(const konp::TestReport& r) {
  py::dict d;
  d["method"] = r.method;
  d["statistic"] = r.statistic;
  d["pvalue"] = r.pvalue;
  d["replicates"] = r.replicates;
  d["seed"] = r.seed;
  d["degenerate"] = r.degenerate;
  d["note"] = r.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "KONP K-sample tests for right-censored survival data";
  m.attr("__version__") = KONP_VERSION;

  py::register_exception<konp::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<konp::IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "konp_statistic",
      [](std::vector<double> times, std::vector<int> events, std::vector<std::string> labels) {
        const auto r = konp::konp_statistic(make_dataset(times, events, labels));
        py::dict d;
        d["q_pearson"] = r.q_pearson;
        d["q_lr"] = r.q_lr;
        d["n_tables"] = r.n_tables;
        d["degenerate"] = r.degenerate;
        return d;
      },
      py::arg("times"), py::arg("events"), py::arg("groups"));

  m.def(
      "run_tests",
      [](std::vector<double> times, std::vector<int> events, std::vector<std::string> labels,
         std::vector<std::string> methods, std::size_t imputations, std::size_t permutations,
         std::uint64_t seed, bool add_one, unsigned threads) {
        const auto data = make_dataset(times, events, labels);
        std::vector<konp::Method> wanted;
        if (methods.empty()) {
          wanted = konp::methods_for(data.group_count());
        } else {
          for (const auto& name : methods) {
            const auto method = konp::parse_method(name);
            if (!method)
              throw konp::ValidationError(konp::ErrorCode::invalid_argument,
                                          "unknown test '" + name + "'");
            wanted.push_back(*method);
          }
        }
        konp::SuiteOptions options;
        options.plan = {imputations, permutations, seed,
                        add_one ? konp::PValueRule::add_one : konp::PValueRule::paper_exact,
                        threads};
        std::vector<konp::TestReport> reports;
        {
          py::gil_scoped_release release;
          reports = konp::run_test_suite(
              data, konp::resolve_methods(wanted, data.group_count()), options);
        }
        py::list out;
        for (const auto& r : reports) out.append(report_dict(r));
        return out;
      },
      py::arg("times"), py::arg("events"), py::arg("groups"),
      py::arg("methods") = std::vector<std::string>{}, py::arg("imputations") = 10,
      py::arg("permutations") = 10000, py::arg("seed") = 1, py::arg("add_one") = false,
      py::arg("threads") = 0);

  m.def(
      "weighted_logrank",
      [](std::vector<double> times, std::vector<int> events, std::vector<std::string> labels,
         double rho, double gamma) {
        const auto r = konp::weighted_logrank(make_dataset(times, events, labels), rho, gamma);
        py::dict d;
        d["statistic"] = r.statistic;
        d["variance"] = r.variance;
        d["z"] = r.z;
        d["pvalue"] = r.pvalue;
        return d;
      },
      py::arg("times"), py::arg("events"), py::arg("groups"), py::arg("rho") = 0.0,
      py::arg("gamma") = 0.0);

  m.def(
      "cauchy_combination",
      [](std::vector<double> pvalues, std::size_t replicates) {
        return konp::cauchy_combination(pvalues, replicates);
      },
      py::arg("pvalues"), py::arg("replicates") = 0);

  m.def("scenario_names", &konp::scenario_names);

  m.def(
      "generate",
      [](const std::string& scenario, const std::string& censoring, std::size_t n,
         std::uint64_t seed) {
        const auto spec = konp::find_scenario(scenario).resolve(censoring);
        konp::RandomStream rng(seed);
        const auto d = konp::generate_dataset(spec, n, rng);
        std::vector<std::string> labels;
        for (auto g : d.groups()) labels.push_back(d.labels()[g]);
        std::vector<int> events(d.events().begin(), d.events().end());
        return py::make_tuple(std::vector<double>(d.times().begin(), d.times().end()), events,
                              labels);
      },
      py::arg("scenario"), py::arg("censoring") = "equal_25", py::arg("n") = 100,
      py::arg("seed") = 1);
}
