#include "konp/statistic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "konp/error.hpp"
#include "konp/numeric.hpp"

namespace konp {

namespace {

struct GroupExtent {
  double max_time = 0.0;
  double max_event_time = 0.0;
  bool has_event = false;
};

// gamma_k is the whole required range when the group's largest time is an event
// (its curve is complete), and its largest event time otherwise.
void fill_bounds(std::span<const GroupExtent> extent, double global_min, double global_max,
                 std::vector<double>& gamma, std::vector<double>& tau,
                 std::vector<double>* gamma_minus, std::vector<std::uint8_t>* no_events) {
  const std::size_t k_count = extent.size();
  gamma.resize(k_count);
  tau.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& e = extent[k];
    if (!e.has_event)
      gamma[k] = 0.0;
    else if (e.max_event_time == e.max_time)
      gamma[k] = 2.0 * global_max - global_min;
    else
      gamma[k] = e.max_event_time;
  }
  if (gamma_minus) gamma_minus->resize(k_count);
  if (no_events) no_events->resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double other = -INFINITY;
    for (std::size_t m = 0; m < k_count; ++m)
      if (m != k) other = std::max(other, gamma[m]);
    tau[k] = std::min(gamma[k], other);
    if (gamma_minus) (*gamma_minus)[k] = other;
    if (no_events) (*no_events)[k] = extent[k].has_event ? 0 : 1;
  }
}

inline double pearson_cells(double a11, double a12, double a21, double a22) {
  a11 = std::max(a11, 0.0);
  a12 = std::max(a12, 0.0);
  a21 = std::max(a21, 0.0);
  a22 = std::max(a22, 0.0);
  const double r1 = a11 + a12, r2 = a21 + a22, c1 = a11 + a21, c2 = a12 + a22;
  if (r1 <= kZeroMargin || r2 <= kZeroMargin || c1 <= kZeroMargin || c2 <= kZeroMargin)
    return 0.0;
  const double det = a12 * a21 - a11 * a22;
  return (r1 + r2) * det * det / (r1 * r2 * c1 * c2);
}

inline double lr_term(double cell, double total, double row, double col) {
  return cell > 0.0 ? cell * std::log(total * cell / (row * col)) : 0.0;
}

inline double lr_cells(double a11, double a12, double a21, double a22) {
  a11 = std::max(a11, 0.0);
  a12 = std::max(a12, 0.0);
  a21 = std::max(a21, 0.0);
  a22 = std::max(a22, 0.0);
  const double r1 = a11 + a12, r2 = a21 + a22, c1 = a11 + a21, c2 = a12 + a22;
  if (r1 <= kZeroMargin || r2 <= kZeroMargin || c1 <= kZeroMargin || c2 <= kZeroMargin)
    return 0.0;
  const double total = r1 + r2;
  const double s = lr_term(a11, total, r1, c1) + lr_term(a12, total, r1, c2) +
                   lr_term(a21, total, r2, c1) + lr_term(a22, total, r2, c2);
  return std::max(0.0, 2.0 * s);
}

}  // namespace

TruncationBounds truncation_bounds(const SurvivalDataset& data) {
  std::vector<GroupExtent> extent(data.group_count());
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double t = data.times()[i];
    auto& e = extent[data.groups()[i]];
    lo = std::min(lo, t);
    hi = std::max(hi, t);
    e.max_time = std::max(e.max_time, t);
    if (data.events()[i]) {
      e.max_event_time = e.has_event ? std::max(e.max_event_time, t) : t;
      e.has_event = true;
    }
  }
  TruncationBounds b;
  fill_bounds(extent, lo, hi, b.gamma, b.tau, &b.gamma_minus, &b.no_events);
  return b;
}

std::vector<KMCurve> group_curves(const SurvivalDataset& data) {
  std::vector<std::vector<double>> t(data.group_count());
  std::vector<std::vector<std::uint8_t>> e(data.group_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    t[data.groups()[i]].push_back(data.times()[i]);
    e[data.groups()[i]].push_back(data.events()[i]);
  }
  std::vector<KMCurve> curves;
  curves.reserve(data.group_count());
  for (std::size_t k = 0; k < data.group_count(); ++k) curves.push_back(km_fit(t[k], e[k]));
  return curves;
}

std::optional<PartitionTable> partition_table(const SurvivalDataset& data,
                                              std::span<const KMCurve> curves,
                                              const TruncationBounds& bounds, std::size_t i,
                                              std::size_t j) {
  if (i == j || i >= data.size() || j >= data.size())
    throw ValidationError(ErrorCode::invalid_argument,
                          "partition_table: need two distinct records");
  if (!data.events()[i] || !data.events()[j])
    throw ValidationError(ErrorCode::invalid_argument,
                          "partition_table: both records must be events");
  const std::size_t k = data.groups()[i];
  const double ti = data.times()[i];
  const double tj = data.times()[j];
  const double mirror = 2.0 * ti - tj;
  const double a = std::min(tj, mirror);
  const double b = std::max(tj, mirror);
  if (b > bounds.tau[k]) return std::nullopt;

  const double same = data.groups()[j] == k ? 1.0 : 0.0;
  const double n_k = static_cast<double>(data.group_size(k));
  double out_count = 0.0;
  double out_size = 0.0;
  for (std::size_t m = 0; m < data.group_count(); ++m) {
    if (m == k || bounds.gamma[m] < b) continue;
    out_count += curves[m].weighted_count(a, b);
    out_size += static_cast<double>(data.group_size(m));
  }

  PartitionTable t;
  t.i = i;
  t.j = j;
  t.a11 = curves[k].weighted_count(a, b) - 1.0 - same;
  t.a12 = out_count - (1.0 - same);
  t.a21 = n_k - t.a11 - 1.0 - same;
  t.a22 = out_size - t.a12 - (1.0 - same);
  t.n_included = n_k + out_size;
  return t;
}

double table_statistic_pearson(const PartitionTable& t) {
  return pearson_cells(t.a11, t.a12, t.a21, t.a22);
}

double table_statistic_lr(const PartitionTable& t) { return lr_cells(t.a11, t.a12, t.a21, t.a22); }

KonpResult KonpWorkspace::evaluate(const SampleView& s, const KonpOptions& options) {
  const std::size_t n = s.size();
  const std::size_t k_count = s.group_count;
  KonpResult result;
  if (n == 0 || k_count == 0) return result;

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (s.times[a] != s.times[b]) return s.times[a] < s.times[b];
    if (s.events[a] != s.events[b]) return s.events[a] > s.events[b];
    return a < b;
  });

  // Stable bucket of the sorted records by group.
  group_start_.assign(k_count + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++group_start_[s.groups[i] + 1];
  for (std::size_t k = 0; k < k_count; ++k) group_start_[k + 1] += group_start_[k];
  by_group_.resize(n);
  {
    std::vector<std::uint32_t> cursor(group_start_.begin(), group_start_.end() - 1);
    for (auto r : order_) by_group_[cursor[s.groups[r]]++] = r;
  }

  // Per-group KM jumps as redistributed counts with a leading-zero prefix sum.
  jump_times_.clear();
  jump_prefix_.clear();
  jump_offset_.assign(k_count + 1, 0);
  group_n_.resize(k_count);
  std::vector<GroupExtent> extent(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const std::uint32_t begin = group_start_[k], end = group_start_[k + 1];
    jump_offset_[k] = static_cast<std::uint32_t>(jump_times_.size());
    jump_prefix_.push_back(0.0);
    group_n_[k] = static_cast<double>(end - begin);
    double w = 1.0;
    std::size_t at_risk = end - begin;
    std::uint32_t pos = begin;
    while (pos < end) {
      const double t = s.times[by_group_[pos]];
      std::size_t deaths = 0, censored = 0;
      while (pos < end && s.times[by_group_[pos]] == t) {
        if (s.events[by_group_[pos]]) ++deaths;
        else ++censored;
        ++pos;
      }
      if (deaths > 0) {
        jump_times_.push_back(t);
        jump_prefix_.push_back(jump_prefix_.back() + static_cast<double>(deaths) * w);
        extent[k].max_event_time = t;
        extent[k].has_event = true;
      }
      const std::size_t beyond = at_risk - deaths - censored;
      if (censored > 0 && beyond > 0)
        w *= static_cast<double>(beyond + censored) / static_cast<double>(beyond);
      at_risk = beyond;
    }
    if (end > begin) extent[k].max_time = s.times[by_group_[end - 1]];
  }
  jump_offset_[k_count] = static_cast<std::uint32_t>(jump_times_.size());

  fill_bounds(extent, s.times[order_.front()], s.times[order_.back()], gamma_, tau_, nullptr,
              nullptr);

  event_times_.clear();
  event_groups_.clear();
  event_records_.clear();
  for (auto r : order_) {
    if (!s.events[r]) continue;
    event_times_.push_back(s.times[r]);
    event_groups_.push_back(s.groups[r]);
    event_records_.push_back(r);
  }

  lo_.resize(k_count);
  hi_.resize(k_count);
  active_.resize(k_count);

  OrderFreeSum sum_p, sum_lr;
  std::size_t tables = 0;
  const std::size_t n_events = event_times_.size();
  const double* jt = jump_times_.data();

  for (std::size_t ii = 0; ii < n_events; ++ii) {
    const std::uint32_t k = event_groups_[ii];
    const double ti = event_times_[ii];
    const double tau_k = tau_[k];
    if (ti > tau_k) continue;
    const double n_k = group_n_[k];
    const double* prefix_k = jump_prefix_.data() + jump_offset_[k] + k;

    for (int pass = 0; pass < 2; ++pass) {
      const bool left = pass == 0;
      bool first = true;
      std::size_t jj = left ? ii : ii + 1;
      while (left ? jj-- > 0 : jj < n_events) {
        const std::size_t j = jj;
        if (!left) ++jj;
        const double tj = event_times_[j];
        const double mirror = 2.0 * ti - tj;
        const double a = left ? tj : mirror;
        const double b = left ? mirror : tj;
        if (b > tau_k) break;
        assert(tj <= tau_k);

        // Keep [lo, hi) equal to the jumps inside [a, b]; a only decreases and
        // b only increases along a pass.
        for (std::size_t m = 0; m < k_count; ++m) {
          if (first) {
            active_[m] = (m == k || gamma_[m] >= b) ? 1 : 0;
            if (!active_[m]) continue;
            const double* g0 = jt + jump_offset_[m];
            const double* g1 = jt + jump_offset_[m + 1];
            lo_[m] = static_cast<std::uint32_t>(std::lower_bound(g0, g1, a) - g0);
            hi_[m] = static_cast<std::uint32_t>(std::upper_bound(g0, g1, b) - g0);
            continue;
          }
          if (!active_[m]) continue;
          if (m != k && gamma_[m] < b) {
            active_[m] = 0;
            continue;
          }
          const double* g = jt + jump_offset_[m];
          const std::uint32_t len = jump_offset_[m + 1] - jump_offset_[m];
          std::uint32_t l = lo_[m], h = hi_[m];
          while (l > 0 && g[l - 1] >= a) --l;
          while (h < len && g[h] <= b) ++h;
          lo_[m] = l;
          hi_[m] = h;
        }
        first = false;

        const std::uint32_t kj = event_groups_[j];
        const double same = kj == k ? 1.0 : 0.0;
        // Adding the other groups' counts in sorted order keeps the cells
        // independent of how the groups happen to be numbered.
        double out_size = 0.0;
        out_terms_.clear();
        for (std::size_t m = 0; m < k_count; ++m) {
          if (m == k || !active_[m]) continue;
          const double* p = jump_prefix_.data() + jump_offset_[m] + m;
          out_terms_.push_back(p[hi_[m]] - p[lo_[m]]);
          out_size += group_n_[m];
        }
        if (out_terms_.size() > 2) std::sort(out_terms_.begin(), out_terms_.end());
        double out_count = 0.0;
        for (double x : out_terms_) out_count += x;
        const double a11 = (prefix_k[hi_[k]] - prefix_k[lo_[k]]) - 1.0 - same;
        const double a12 = out_count - (1.0 - same);
        const double a21 = n_k - a11 - 1.0 - same;
        const double a22 = out_size - a12 - (1.0 - same);

        ++tables;
        if (options.pearson) sum_p.add(pearson_cells(a11, a12, a21, a22));
        if (options.likelihood_ratio) sum_lr.add(lr_cells(a11, a12, a21, a22));
        if (options.keep_tables)
          result.tables.push_back(
              {a11, a12, a21, a22, n_k + out_size, event_records_[ii], event_records_[j]});
      }
    }
  }

  result.n_tables = tables;
  result.degenerate = tables == 0;
  if (tables > 0) {
    result.q_pearson = sum_p.value() / static_cast<double>(tables);
    result.q_lr = sum_lr.value() / static_cast<double>(tables);
  }
  return result;
}

KonpResult konp_statistic(const SurvivalDataset& data, const KonpOptions& options) {
  KonpWorkspace workspace;
  return workspace.evaluate(data.view(), options);
}

}  // namespace konp
