#include "report_format.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "konp/error.hpp"

namespace konp::cli {

namespace {

using nlohmann::ordered_json;

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string general(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string rule_name(PValueRule rule) {
  return rule == PValueRule::add_one ? "add_one" : "paper_exact";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string joined(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

void write_comment_header(std::ostream& out, const RunMetadata& meta) {
  out << "# konp " << KONP_VERSION << " " << meta.command << " source=" << meta.source
      << " seed=" << meta.seed << " imputations=" << meta.plan.imputations
      << " permutations=" << meta.plan.permutations << " rule=" << rule_name(meta.plan.rule)
      << " methods=" << joined(meta.methods, ",") << "\n";
}

ordered_json metadata_json(const RunMetadata& meta) {
  ordered_json j;
  j["version"] = KONP_VERSION;
  j["command"] = meta.command;
  j["source"] = meta.source;
  j["seed"] = meta.seed;
  j["plan"] = {{"imputations", meta.plan.imputations},
               {"permutations", meta.plan.permutations},
               {"rule", rule_name(meta.plan.rule)}};
  j["methods"] = meta.methods;
  return j;
}

void write_rows(std::ostream& out, OutputFormat format, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  if (format == OutputFormat::csv) {
    std::vector<std::string> h;
    for (const auto& x : header) h.push_back(csv_field(x));
    out << joined(h, ",") << "\n";
    for (const auto& row : rows) {
      std::vector<std::string> r;
      for (const auto& x : row) r.push_back(csv_field(x));
      out << joined(r, ",") << "\n";
    }
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) s += "  ";
      s += cells[c];
      if (c + 1 < cells.size()) s.append(width[c] - cells[c].size(), ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << "\n";
  };
  line(header);
  for (const auto& row : rows) line(row);
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "table") return OutputFormat::table;
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ValidationError(ErrorCode::invalid_argument,
                        "unknown format '" + name + "' (table, csv, json)");
}

std::string format_pvalue(double p) { return general(p, 4); }

void write_test_reports(std::ostream& out, OutputFormat format, const RunMetadata& meta,
                        const std::vector<TestReport>& reports,
                        const std::optional<double>& runtime_seconds) {
  if (format == OutputFormat::json) {
    ordered_json j = metadata_json(meta);
    ordered_json results = ordered_json::array();
    for (const auto& r : reports) {
      ordered_json row{{"method", r.method},     {"statistic", r.statistic},
                       {"pvalue", r.pvalue},     {"replicates", r.replicates},
                       {"seed", r.seed},         {"degenerate", r.degenerate},
                       {"note", r.note}};
      results.push_back(row);
    }
    j["results"] = results;
    if (runtime_seconds) j["runtime_seconds"] = *runtime_seconds;
    out << j.dump(2) << "\n";
    return;
  }
  write_comment_header(out, meta);
  std::vector<std::string> header{"method", "statistic", "pvalue", "replicates", "seed"};
  if (runtime_seconds) header.emplace_back("runtime_s");
  header.emplace_back("note");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    std::vector<std::string> row{r.method, general(r.statistic, 6), format_pvalue(r.pvalue),
                                 std::to_string(r.replicates), std::to_string(r.seed)};
    if (runtime_seconds) row.push_back(fixed(*runtime_seconds, 3));
    std::string note = r.note;
    if (r.degenerate && note.empty()) note = "degenerate";
    row.push_back(note);
    rows.push_back(row);
  }
  write_rows(out, format, header, rows);
}

void write_power_results(std::ostream& out, OutputFormat format, const RunMetadata& meta,
                         const std::vector<PowerResult>& rows) {
  if (format == OutputFormat::json) {
    ordered_json j = metadata_json(meta);
    ordered_json results = ordered_json::array();
    for (const auto& r : rows)
      results.push_back({{"scenario", r.scenario},
                         {"n", r.n},
                         {"censoring", r.censoring},
                         {"method", r.method},
                         {"power", r.rejection_rate},
                         {"se", r.mc_se},
                         {"replications", r.replications},
                         {"alpha", r.alpha},
                         {"censoring_rate", r.censoring_rate}});
    j["results"] = results;
    out << j.dump(2) << "\n";
    return;
  }
  write_comment_header(out, meta);
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({r.scenario, std::to_string(r.n), r.censoring, r.method,
                     fixed(r.rejection_rate, 3), fixed(r.mc_se, 4), std::to_string(r.replications),
                     general(r.alpha, 4), fixed(r.censoring_rate, 3)});
  write_rows(out, format,
             {"scenario", "n", "censoring", "method", "power", "se", "replications", "alpha",
              "censoring_rate"},
             cells);
}

void write_benchmark(std::ostream& out, OutputFormat format, const RunMetadata& meta,
                     const std::vector<BenchmarkRow>& rows) {
  if (format == OutputFormat::json) {
    ordered_json j = metadata_json(meta);
    ordered_json results = ordered_json::array();
    for (const auto& r : rows)
      results.push_back({{"n", r.n},
                         {"censoring_1", r.censoring_1},
                         {"censoring_2", r.censoring_2},
                         {"observed_censoring", r.observed_censoring},
                         {"threads", r.threads},
                         {"seconds", r.seconds},
                         {"pvalue_konp_p", r.pvalue_pearson},
                         {"pvalue_konp_lr", r.pvalue_lr}});
    j["results"] = results;
    out << j.dump(2) << "\n";
    return;
  }
  write_comment_header(out, meta);
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({std::to_string(r.n), fixed(r.censoring_1, 2), fixed(r.censoring_2, 2),
                     fixed(r.observed_censoring, 3), std::to_string(r.threads), fixed(r.seconds, 2),
                     format_pvalue(r.pvalue_pearson), format_pvalue(r.pvalue_lr)});
  write_rows(out, format,
             {"n", "censoring_1", "censoring_2", "observed_censoring", "threads", "seconds",
              "pvalue_konp_p", "pvalue_konp_lr"},
             cells);
}

}  // namespace konp::cli
