#include "konp/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "konp/error.hpp"

namespace konp {

namespace {

Distribution d(std::string_view text) { return Distribution::parse(text); }

std::vector<Distribution> repeat(std::string_view text, std::size_t k) {
  return std::vector<Distribution>(k, d(text));
}

std::vector<Distribution> list(std::initializer_list<std::string_view> texts) {
  std::vector<Distribution> out;
  for (auto t : texts) out.push_back(d(t));
  return out;
}

ScenarioFamily null_family(std::size_t k) {
  ScenarioFamily f;
  f.name = "null-k" + std::to_string(k);
  f.description = "equal log-logistic(1,1) failure times in all " + std::to_string(k) + " groups";
  f.failure = repeat("loglogistic(1,1)", k);
  f.censoring["equal_25"] = repeat("lognormal(1.1,0.5)", k);
  f.censoring["equal_50"] = repeat("lognormal(0,0.5)", k);
  const std::string_view fast = "min(exp(0.85),unif(0,10))";
  std::vector<Distribution> mild = list({fast, fast});
  std::vector<Distribution> severe = list({fast, "min(exp(0.25),unif(0,10))", "unif(0,10)"});
  while (mild.size() < k) mild.push_back(d("unif(0,10)"));
  if (k >= 4) severe.push_back(d("lognormal(1.5,0.5)"));
  if (k >= 5) severe.push_back(d("exp(1.5)"));
  f.censoring["unequal_mild"] = mild;
  f.censoring["unequal_severe"] = severe;
  return f;
}

// Three-group scenario whose groups 2 and 3 share a law; the two-group
// restriction keeps groups 1 and 3 with their censoring patterns.
ScenarioFamily restrict_to_two(const ScenarioFamily& three, std::string name) {
  ScenarioFamily f;
  f.name = std::move(name);
  f.description = three.description + " (groups 1 and 3)";
  f.failure = {three.failure[0], three.failure[2]};
  for (const auto& [variant, laws] : three.censoring) f.censoring[variant] = {laws[0], laws[2]};
  return f;
}

ScenarioFamily scenario_d() {
  ScenarioFamily f;
  f.name = "D-k3";
  f.description = "piecewise exponential hazards differing at early times";
  const std::string_view g1 = "pwexp(0.44,1.05,1.47;0.5,0.1,1.5,1)";
  const std::string_view g2 = "pwexp(0.38,1.02,1.47;1.5,0.1,0.5,1)";
  f.failure = list({g1, g2, g2});
  f.censoring["equal_25"] = repeat("unif(1.1,3)", 3);
  f.censoring["equal_50"] = repeat("unif(0.1,2.1)", 3);
  f.censoring["unequal_mild"] =
      list({"min(exp(0.5),unif(0.5,3.5))", "min(exp(0.5),unif(0.5,3.5))", "unif(0.5,3.5)"});
  f.censoring["unequal_severe"] =
      list({"min(exp(0.3),unif(0.5,3.5))", "min(exp(0.5),unif(0.5,3.5))", "unif(0.5,3.5)"});
  return f;
}

ScenarioFamily scenario_j2() {
  ScenarioFamily f;
  f.name = "J2-k3";
  f.description = "crossing hazards: exponential against a three-piece exponential";
  const std::string_view g2 = "pwexp(0.1,0.45;1,1.7,0.5)";
  f.failure = list({"exp(1)", g2, g2});
  f.censoring["equal_25"] = repeat("exp(0.3)", 3);
  f.censoring["equal_50"] = repeat("exp(1)", 3);
  f.censoring["unequal_mild"] =
      list({"min(exp(0.9),unif(0,4))", "min(exp(0.9),unif(0,4))", "unif(0,4)"});
  f.censoring["unequal_severe"] =
      list({"min(exp(0.9),unif(0,4))", "min(exp(0.5),unif(0,4))", "unif(0,4)"});
  return f;
}

// Two-group scenario with the shared equal-censoring law at 25% and 50% and the
// min{U(a,b), Exp(theta_g)} unequal patterns.
ScenarioFamily two_group(std::string name, std::string description, Distribution f1,
                         Distribution f2, const std::string& equal_25,
                         const std::string& equal_50, double a, double b, double theta1,
                         double theta2) {
  ScenarioFamily f;
  f.name = std::move(name);
  f.description = std::move(description);
  f.failure = {std::move(f1), std::move(f2)};
  f.censoring["equal_25"] = repeat(equal_25, 2);
  f.censoring["equal_50"] = repeat(equal_50, 2);
  const Distribution u = Distribution::uniform(a, b);
  const auto mixed = [&](double theta) {
    return Distribution::minimum(u, Distribution::exponential(theta));
  };
  f.censoring["unequal_mild"] = {mixed(theta1), mixed(theta2)};
  f.censoring["unequal_severe"] = {mixed(theta1), u};
  return f;
}

std::vector<ScenarioFamily> build_registry() {
  std::vector<ScenarioFamily> r;
  r.push_back(null_family(3));
  r.push_back(null_family(4));
  r.push_back(null_family(5));
  r.push_back(scenario_d());
  r.push_back(restrict_to_two(r.back(), "D-k2"));
  r.push_back(scenario_j2());
  r.push_back(restrict_to_two(r.back(), "J2-k2"));
  r.push_back(two_group("L", "proportional Weibull hazards", d("weibull(0.849,20)"),
                        d("weibull(0.849,10)"), "weibull(5,24)", "weibull(1.5,12)", 0, 40, 0.025,
                        0.05));
  r.push_back(two_group("M", "piecewise Weibull, difference at early times",
                        d("pwweibull(0.5;4,1;2,1.5)"), d("pwweibull(0.5;2.2,1;1.5,1.5)"),
                        "weibull(0.9,5.5)", "weibull(0.35,3.4)", 0, 4.5, 0.25, 0.14));
  const Distribution ll = d("loglogistic(1,1)");
  const double e = std::exp(1.0);
  const std::string yp = "Yang-Prentice model against log-logistic(1,1)";
  r.push_back(two_group("N", yp, Distribution::lomax(std::exp(-0.5), 1.0), ll,
                        "lognormal(0.75,0.5)", "lognormal(-0.1,0.5)", 0, 12, 1.5, 0.4));
  r.push_back(two_group("O", yp, Distribution::lomax(1.0 / e, 1.0), ll, "lognormal(-0.6,0.5)",
                        "lognormal(-1.8,0.5)", 0, 8, 2, 0.5));
  r.push_back(two_group("P", "proportional odds against log-logistic(1,1)",
                        Distribution::log_logistic(1.0, 1.0 / e), ll, "lognormal(0.6,0.5)",
                        "lognormal(-0.5,0.5)", 0, 8, 2, 0.5));
  r.push_back(two_group("Q", yp, Distribution::lomax(e, e), ll, "lognormal(0.7,0.5)",
                        "lognormal(-0.15,0.5)", 0, 8, 0.9, 0.3));
  return r;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void scenario_error(std::size_t line, const std::string& why) {
  throw ValidationError(ErrorCode::parse_error,
                        "scenario file line " + std::to_string(line) + ": " + why);
}

std::size_t parse_index(const std::string& text, std::size_t line) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &pos);
  } catch (const std::exception&) {
    scenario_error(line, "bad group index '" + text + "'");
  }
  if (pos != text.size() || v == 0) scenario_error(line, "bad group index '" + text + "'");
  return v;
}

void place(std::vector<Distribution>& laws, std::vector<std::uint8_t>& set, std::size_t g,
           Distribution law) {
  if (laws.size() < g) {
    laws.resize(g, Distribution::never());
    set.resize(g, 0);
  }
  laws[g - 1] = std::move(law);
  set[g - 1] = 1;
}

struct Draft {
  ScenarioFamily family;
  std::size_t k = 0;
  std::size_t line = 0;
  std::vector<std::uint8_t> failure_set;
  std::map<std::string, std::vector<std::uint8_t>> censoring_set;
};

ScenarioFamily finish(Draft& draft) {
  ScenarioFamily& f = draft.family;
  if (draft.k < 2) scenario_error(draft.line, "scenario '" + f.name + "' needs k >= 2");
  const auto complete = [&](const std::vector<std::uint8_t>& set) {
    return set.size() == draft.k && std::all_of(set.begin(), set.end(), [](auto b) { return b; });
  };
  if (!complete(draft.failure_set))
    scenario_error(draft.line, "scenario '" + f.name + "' must give failure.1..failure.k");
  for (const auto& [variant, set] : draft.censoring_set)
    if (!complete(set))
      scenario_error(draft.line,
                     "scenario '" + f.name + "' censoring '" + variant + "' must cover all groups");
  if (f.censoring.empty())
    f.censoring["default"] = std::vector<Distribution>(draft.k, Distribution::never());
  if (!f.fractions.empty() && f.fractions.size() != draft.k)
    scenario_error(draft.line, "scenario '" + f.name + "' fractions must have k entries");
  for (const auto& v : f.censoring_variants()) f.resolve(v).validate();
  return f;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (k < 2 || failure.size() != k || censoring.size() != k || fractions.size() != k)
    throw ValidationError(ErrorCode::invalid_argument,
                          "scenario '" + name +
                              "': failure, censoring and fractions need k entries");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0))
      throw ValidationError(ErrorCode::invalid_argument,
                            "scenario '" + name + "': fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError(ErrorCode::invalid_argument,
                          "scenario '" + name + "': fractions must sum to one");
}

std::vector<std::string> ScenarioFamily::censoring_variants() const {
  std::vector<std::string> out;
  for (const auto& [name, laws] : censoring) out.push_back(name);
  return out;
}

ScenarioSpec ScenarioFamily::resolve(std::string_view censoring_variant) const {
  const auto it = censoring.find(std::string(censoring_variant));
  if (it == censoring.end()) {
    std::string known;
    for (const auto& v : censoring_variants()) known += (known.empty() ? "" : ", ") + v;
    throw ValidationError(ErrorCode::invalid_argument,
                          "scenario '" + name + "' has no censoring variant '" +
                              std::string(censoring_variant) + "' (available: " + known + ")");
  }
  ScenarioSpec spec;
  spec.name = name;
  spec.k = failure.size();
  spec.failure = failure;
  spec.censoring = it->second;
  spec.fractions = fractions.empty()
                       ? std::vector<double>(spec.k, 1.0 / static_cast<double>(spec.k))
                       : fractions;
  spec.validate();
  return spec;
}

const std::vector<ScenarioFamily>& scenario_registry() {
  static const std::vector<ScenarioFamily> registry = build_registry();
  return registry;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& f : scenario_registry()) out.push_back(f.name);
  return out;
}

const ScenarioFamily& find_scenario(std::string_view name) {
  for (const auto& f : scenario_registry())
    if (f.name == name) return f;
  std::string known;
  for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError(ErrorCode::invalid_argument,
                        "unknown scenario '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<ScenarioFamily> parse_scenarios(std::istream& in) {
  std::vector<ScenarioFamily> out;
  std::optional<Draft> draft;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') scenario_error(line_no, "unterminated section header");
      const std::string header = trim(std::string_view(line).substr(1, line.size() - 2));
      if (header.rfind("scenario", 0) != 0) scenario_error(line_no, "expected [scenario <name>]");
      if (draft) out.push_back(finish(*draft));
      draft.emplace();
      draft->family.name = trim(std::string_view(header).substr(8));
      draft->line = line_no;
      if (draft->family.name.empty()) scenario_error(line_no, "scenario needs a name");
      continue;
    }
    if (!draft) scenario_error(line_no, "key outside a [scenario] section");
    const auto eq = line.find('=');
    if (eq == std::string::npos) scenario_error(line_no, "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    ScenarioFamily& f = draft->family;
    if (key == "k") {
      draft->k = parse_index(value, line_no);
    } else if (key == "description") {
      f.description = value;
    } else if (key == "fractions") {
      std::stringstream ss(value);
      std::string item;
      f.fractions.clear();
      while (std::getline(ss, item, ',')) {
        try {
          f.fractions.push_back(std::stod(trim(item)));
        } catch (const std::exception&) {
          scenario_error(line_no, "bad fraction '" + item + "'");
        }
      }
    } else if (key.rfind("failure.", 0) == 0) {
      place(f.failure, draft->failure_set, parse_index(key.substr(8), line_no),
            Distribution::parse(value));
    } else if (key.rfind("censoring.", 0) == 0) {
      const std::string rest = key.substr(10);
      const auto dot = rest.rfind('.');
      const std::string variant = dot == std::string::npos ? "default" : rest.substr(0, dot);
      const std::string index = dot == std::string::npos ? rest : rest.substr(dot + 1);
      place(f.censoring[variant], draft->censoring_set[variant], parse_index(index, line_no),
            Distribution::parse(value));
    } else {
      scenario_error(line_no, "unknown key '" + key + "'");
    }
  }
  if (draft) out.push_back(finish(*draft));
  return out;
}

std::vector<ScenarioFamily> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  return parse_scenarios(in);
}

std::vector<std::size_t> allocate_groups(std::size_t n, const std::vector<double>& fractions) {
  const double total = std::accumulate(fractions.begin(), fractions.end(), 0.0);
  std::vector<std::size_t> sizes(fractions.size());
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < fractions.size(); ++g) {
    const double exact = static_cast<double>(n) * fractions[g] / total;
    sizes[g] = static_cast<std::size_t>(std::floor(exact));
    assigned += sizes[g];
    remainder.emplace_back(exact - std::floor(exact), g);
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[remainder[i].second];
  return sizes;
}

SurvivalDataset generate_dataset(const ScenarioSpec& scenario, std::size_t n, RandomStream& rng) {
  scenario.validate();
  const std::vector<std::size_t> sizes = allocate_groups(n, scenario.fractions);
  std::vector<double> times;
  std::vector<std::uint8_t> events;
  std::vector<std::uint32_t> groups;
  times.reserve(n);
  events.reserve(n);
  groups.reserve(n);
  std::vector<std::string> labels;
  for (std::size_t g = 0; g < scenario.k; ++g) {
    labels.push_back(std::to_string(g + 1));
    for (std::size_t i = 0; i < sizes[g]; ++i) {
      const double x = scenario.failure[g].sample(rng);
      const double c = scenario.censoring[g].sample(rng);
      times.push_back(std::min(x, c));
      events.push_back(x <= c ? 1 : 0);
      groups.push_back(static_cast<std::uint32_t>(g));
    }
  }
  return SurvivalDataset(std::move(times), std::move(events), std::move(groups), std::move(labels));
}

}  // namespace konp
