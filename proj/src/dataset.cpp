#include "konp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "konp/error.hpp"

namespace konp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::missing_column: return "missing_column";
    case ErrorCode::non_numeric_time: return "non_numeric_time";
    case ErrorCode::negative_time: return "negative_time";
    case ErrorCode::bad_status: return "bad_status";
    case ErrorCode::too_few_groups: return "too_few_groups";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::no_events: return "no_events";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_failure: return "io_failure";
  }
  return "unknown";
}

SurvivalDataset::SurvivalDataset(std::vector<double> times, std::vector<std::uint8_t> events,
                                 const std::vector<std::string>& record_labels)
    : times_(std::move(times)), events_(std::move(events)) {
  if (record_labels.size() != times_.size())
    throw ValidationError(ErrorCode::length_mismatch, "group labels and times differ in length");
  std::unordered_map<std::string, std::uint32_t> index;
  groups_.reserve(record_labels.size());
  for (const auto& label : record_labels) {
    auto [it, inserted] = index.try_emplace(label, static_cast<std::uint32_t>(labels_.size()));
    if (inserted) labels_.push_back(label);
    groups_.push_back(it->second);
  }
  validate();
}

SurvivalDataset::SurvivalDataset(std::vector<double> times, std::vector<std::uint8_t> events,
                                 std::vector<std::uint32_t> groups,
                                 std::vector<std::string> labels)
    : times_(std::move(times)),
      events_(std::move(events)),
      groups_(std::move(groups)),
      labels_(std::move(labels)) {
  validate();
}

void SurvivalDataset::validate() {
  if (times_.empty()) throw ValidationError(ErrorCode::empty_input, "dataset has no records");
  if (events_.size() != times_.size() || groups_.size() != times_.size())
    throw ValidationError(ErrorCode::length_mismatch,
                          "times, events and groups must have equal length");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]))
      throw ValidationError(ErrorCode::non_numeric_time,
                            "record " + std::to_string(i + 1) + ": time is not finite");
    if (times_[i] < 0.0)
      throw ValidationError(ErrorCode::negative_time,
                            "record " + std::to_string(i + 1) + ": negative time");
    if (events_[i] > 1)
      throw ValidationError(ErrorCode::bad_status,
                            "record " + std::to_string(i + 1) + ": status must be 0 or 1");
  }
  group_sizes_.assign(labels_.size(), 0);
  for (auto g : groups_) {
    if (g >= labels_.size())
      throw ValidationError(ErrorCode::invalid_argument, "group index out of range");
    ++group_sizes_[g];
  }
  if (labels_.size() < 2)
    throw ValidationError(ErrorCode::too_few_groups, "fewer than 2 groups");
  for (std::size_t k = 0; k < labels_.size(); ++k)
    if (group_sizes_[k] == 0)
      throw ValidationError(ErrorCode::too_few_groups,
                            "group '" + labels_[k] + "' has no records");
  if (std::none_of(events_.begin(), events_.end(), [](std::uint8_t e) { return e == 1; }))
    throw ValidationError(ErrorCode::no_events, "dataset has no observed events");
}

SurvivalRecord SurvivalDataset::record(std::size_t i) const {
  return {times_.at(i), events_.at(i) == 1, labels_.at(groups_.at(i))};
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV line; double quotes delimit fields and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted)
    throw ValidationError(ErrorCode::parse_error,
                          "line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw ValidationError(ErrorCode::missing_column, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

SurvivalDataset read_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (blank(line)) continue;
    header = split_csv_line(line, line_no);
    break;
  }
  if (header.empty()) throw ValidationError(ErrorCode::empty_input, "empty file");

  const std::size_t time_col = find_column(header, schema.time_column);
  const std::size_t status_col = find_column(header, schema.status_column);
  const std::size_t group_col = find_column(header, schema.group_column);
  const std::size_t needed = std::max({time_col, status_col, group_col}) + 1;

  std::vector<double> times;
  std::vector<std::uint8_t> events;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv_line(line, line_no);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() < needed)
      throw ValidationError(ErrorCode::parse_error, where + "too few fields");

    const std::string& t = fields[time_col];
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value))
      throw ValidationError(ErrorCode::non_numeric_time, where + "non-numeric time '" + t + "'");
    if (value < 0.0)
      throw ValidationError(ErrorCode::negative_time, where + "negative time " + t);

    const std::string& s = fields[status_col];
    if (s != "0" && s != "1")
      throw ValidationError(ErrorCode::bad_status,
                            where + "status must be 0 or 1, got '" + s + "'");

    times.push_back(value);
    events.push_back(s == "1" ? 1 : 0);
    labels.push_back(fields[group_col]);
  }
  if (times.empty()) throw ValidationError(ErrorCode::empty_input, "file has no data rows");
  return SurvivalDataset(std::move(times), std::move(events), labels);
}

SurvivalDataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in, schema);
}

void write_csv(const SurvivalDataset& data, std::ostream& out, const CsvSchema& schema) {
  out << quote_if_needed(schema.time_column) << ',' << quote_if_needed(schema.status_column)
      << ',' << quote_if_needed(schema.group_column) << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, data.times()[i]);
    out.write(buf, end - buf);
    out << ',' << static_cast<int>(data.events()[i]) << ','
        << quote_if_needed(data.labels()[data.groups()[i]]) << '\n';
  }
}

void write_csv(const SurvivalDataset& data, const std::string& path, const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(data, out, schema);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<GroupSummary> summarize(const SurvivalDataset& data) {
  std::vector<GroupSummary> out(data.group_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].label = data.labels()[k];
    out[k].size = data.group_size(k);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& s = out[data.groups()[i]];
    const double t = data.times()[i];
    s.max_time = std::max(s.max_time, t);
    if (data.events()[i] == 1) {
      ++s.events;
      s.max_event_time = std::max(s.max_event_time, t);
    }
  }
  for (auto& s : out)
    s.censoring_rate = static_cast<double>(s.size - s.events) / static_cast<double>(s.size);
  return out;
}

}  // namespace konp
