#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace konp {

/// One subject: observed time T = min(X, C), event indicator (true = observed
/// failure) and group label.
struct SurvivalRecord {
  double time = 0.0;
  bool event = false;
  std::string group;
};

/// Non-owning view of K-sample right-censored data in structure-of-arrays form.
/// Group indices are 0-based and dense in [0, group_count).
struct SampleView {
  std::span<const double> times;
  std::span<const std::uint8_t> events;
  std::span<const std::uint32_t> groups;
  std::size_t group_count = 0;

  std::size_t size() const { return times.size(); }
};

/// Validated K-sample survival data. Immutable after construction.
///
/// Group indices follow the order in which labels first appear in the records,
/// so renaming labels never changes the index assignment.
class SurvivalDataset {
 public:
  /// Builds from per-record group labels. Throws ValidationError on any invariant
  /// violation: length mismatch, negative or non-finite time, fewer than two
  /// groups, or no events.
  SurvivalDataset(std::vector<double> times, std::vector<std::uint8_t> events,
                  const std::vector<std::string>& record_labels);

  /// Builds from dense group indices and the label of each index.
  SurvivalDataset(std::vector<double> times, std::vector<std::uint8_t> events,
                  std::vector<std::uint32_t> groups, std::vector<std::string> labels);

  std::size_t size() const { return times_.size(); }
  std::size_t group_count() const { return labels_.size(); }

  std::span<const double> times() const { return times_; }
  std::span<const std::uint8_t> events() const { return events_; }
  std::span<const std::uint32_t> groups() const { return groups_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t group_size(std::size_t group) const { return group_sizes_.at(group); }
  const std::vector<std::size_t>& group_sizes() const { return group_sizes_; }

  SurvivalRecord record(std::size_t i) const;
  SampleView view() const { return {times_, events_, groups_, labels_.size()}; }

  bool operator==(const SurvivalDataset&) const = default;

 private:
  void validate();

  std::vector<double> times_;
  std::vector<std::uint8_t> events_;
  std::vector<std::uint32_t> groups_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> group_sizes_;
};

/// Column names used when reading a CSV file.
struct CsvSchema {
  std::string time_column = "time";
  std::string status_column = "status";
  std::string group_column = "group";
};

SurvivalDataset load_csv(const std::string& path, const CsvSchema& schema = {});
SurvivalDataset read_csv(std::istream& in, const CsvSchema& schema = {});

void write_csv(const SurvivalDataset& data, std::ostream& out, const CsvSchema& schema = {});
void write_csv(const SurvivalDataset& data, const std::string& path, const CsvSchema& schema = {});

struct GroupSummary {
  std::string label;
  std::size_t size = 0;
  std::size_t events = 0;
  double censoring_rate = 0.0;
  double max_event_time = 0.0;  // 0 when the group has no events
  double max_time = 0.0;
};

std::vector<GroupSummary> summarize(const SurvivalDataset& data);

}  // namespace konp
