#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "konp/dataset.hpp"
#include "konp/km.hpp"

namespace konp {

/// Per-group time ranges over which the group KM curves may be used.
struct TruncationBounds {
  std::vector<double> gamma;        // largest usable time of each group's curve
  std::vector<double> gamma_minus;  // max over the other groups' gamma
  std::vector<double> tau;          // min(gamma, gamma_minus)
  std::vector<std::uint8_t> no_events;  // group has no events; its gamma is 0
};

TruncationBounds truncation_bounds(const SurvivalDataset& data);

/// Per-group failure-time KM curves, indexed by group.
std::vector<KMCurve> group_curves(const SurvivalDataset& data);

/// 2x2 table induced by the event pair (i, j): row 1 is the group of i, column 1
/// is the interval [a, b] centred at T_i with half-width |T_i - T_j|. Cells are
/// KM-weighted counts that exclude records i and j, stored before clamping.
struct PartitionTable {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;
  double n_included = 0.0;  // observations of all groups with gamma >= b
  std::size_t i = 0;
  std::size_t j = 0;
};

/// Returns the table for (i, j), or nullopt when b exceeds tau of i's group.
/// Requires both records to be events and i != j.
std::optional<PartitionTable> partition_table(const SurvivalDataset& data,
                                              std::span<const KMCurve> curves,
                                              const TruncationBounds& bounds, std::size_t i,
                                              std::size_t j);

/// Margins at or below this are treated as zero, giving a statistic of 0.
inline constexpr double kZeroMargin = 1e-12;

/// Pearson chi-square of the table. Negative cells are clamped to zero first.
double table_statistic_pearson(const PartitionTable& table);

/// Likelihood-ratio (G) statistic of the table, with 0 log 0 = 0.
double table_statistic_lr(const PartitionTable& table);

struct KonpOptions {
  bool pearson = true;
  bool likelihood_ratio = true;
  bool keep_tables = false;
};

struct KonpResult {
  double q_pearson = 0.0;
  double q_lr = 0.0;
  std::size_t n_tables = 0;
  bool degenerate = true;  // no table was constructed
  std::vector<PartitionTable> tables;
};

/// Reusable scratch space for repeated evaluation (one per worker thread).
class KonpWorkspace {
 public:
  KonpResult evaluate(const SampleView& sample, const KonpOptions& options = {});

 private:
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> group_start_;
  std::vector<std::uint32_t> by_group_;
  std::vector<double> jump_times_;
  std::vector<double> jump_prefix_;
  std::vector<std::uint32_t> jump_offset_;
  std::vector<double> group_n_;
  std::vector<double> gamma_;
  std::vector<double> tau_;
  std::vector<double> event_times_;
  std::vector<std::uint32_t> event_groups_;
  std::vector<std::uint32_t> event_records_;
  std::vector<std::uint32_t> lo_;
  std::vector<std::uint32_t> hi_;
  std::vector<std::uint8_t> active_;
  std::vector<double> out_terms_;
};

KonpResult konp_statistic(const SurvivalDataset& data, const KonpOptions& options = {});

}  // namespace konp
