#include "konp/wlr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "konp/error.hpp"
#include "konp/numeric.hpp"

namespace konp {

namespace {

// At-risk and event counts per group at each distinct event time, with the
// pooled KM just before that time.
struct RiskTable {
  std::size_t groups = 0;
  std::vector<double> at_risk;  // row-major, groups per row
  std::vector<double> deaths;
  std::vector<double> survival_left;
  std::vector<double> sizes;

  std::size_t rows() const { return survival_left.size(); }
};

RiskTable risk_table(const SampleView& sample) {
  RiskTable table;
  const std::size_t k = sample.group_count;
  const std::size_t n = sample.size();
  table.groups = k;
  table.sizes.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) table.sizes[sample.groups[i]] += 1.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sample.times[a] < sample.times[b]; });
  std::vector<double> risk = table.sizes;
  std::vector<double> dead(k);
  std::vector<double> leaving(k);
  double pooled_risk = static_cast<double>(n);
  double survival = 1.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = sample.times[order[i]];
    std::fill(dead.begin(), dead.end(), 0.0);
    std::fill(leaving.begin(), leaving.end(), 0.0);
    double d = 0.0;
    double out = 0.0;
    for (; i < n && sample.times[order[i]] == t; ++i) {
      const std::size_t r = order[i];
      leaving[sample.groups[r]] += 1.0;
      out += 1.0;
      if (sample.events[r]) {
        dead[sample.groups[r]] += 1.0;
        d += 1.0;
      }
    }
    if (d > 0.0) {
      table.at_risk.insert(table.at_risk.end(), risk.begin(), risk.end());
      table.deaths.insert(table.deaths.end(), dead.begin(), dead.end());
      table.survival_left.push_back(survival);
      survival *= 1.0 - d / pooled_risk;
    }
    for (std::size_t g = 0; g < k; ++g) risk[g] -= leaving[g];
    pooled_risk -= out;
  }
  return table;
}

void require_two_groups(std::size_t k, const char* what) {
  if (k != 2)
    throw ValidationError(ErrorCode::invalid_argument,
                          std::string(what) + " requires exactly two groups");
}

double fh_weight(double s, double rho, double gamma) {
  return std::pow(s, rho) * std::pow(1.0 - s, gamma);
}

TestReport asymptotic_report(std::string method) {
  TestReport report;
  report.method = std::move(method);
  return report;
}

double two_sided(double z) { return 2.0 * normal_sf(std::abs(z)); }

}  // namespace

WlrStatistic wlr_covariance(const SampleView& sample) {
  require_two_groups(sample.group_count, "wlr_covariance");
  const RiskTable table = risk_table(sample);
  const double n1 = table.sizes[0];
  const double n2 = table.sizes[1];
  const double scale = (n1 + n2) / (n1 * n2);

  WlrStatistic out;
  std::array<CompensatedSum, 4> g;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double y1 = table.at_risk[2 * r];
    const double y2 = table.at_risk[2 * r + 1];
    if (y1 <= 0.0 || y2 <= 0.0) continue;
    const double d1 = table.deaths[2 * r];
    const double d2 = table.deaths[2 * r + 1];
    const double y = y1 + y2;
    const double d = d1 + d2;
    const double base = y1 * y2 / y;
    const double increment = d1 / y1 - d2 / y2;
    const double variance = base * (1.0 - (d - 1.0) / y) * d / y;
    std::array<double, 4> w{};
    for (std::size_t k = 0; k < 4; ++k)
      w[k] = fh_weight(table.survival_left[r], kWlrWeights[k][0], kWlrWeights[k][1]);
    for (std::size_t l = 0; l < 4; ++l) {
      g[l].add(w[l] * base * increment);
      for (std::size_t m = 0; m < 4; ++m)
        out.sigma(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) +=
            w[l] * w[m] * variance;
    }
  }
  out.sigma *= scale;
  for (std::size_t k = 0; k < 4; ++k) {
    out.g[k] = std::sqrt(scale) * g[k].value();
    const double v = out.sigma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    out.z[k] = v > 0.0 ? out.g[k] / std::sqrt(v) : 0.0;
  }
  out.degenerate = !(out.sigma(0, 0) > 0.0);
  return out;
}

WlrStatistic wlr_covariance(const SurvivalDataset& data) { return wlr_covariance(data.view()); }

WeightedLogrank weighted_logrank(const SampleView& sample, double rho, double gamma) {
  require_two_groups(sample.group_count, "weighted_logrank");
  const RiskTable table = risk_table(sample);
  const double n1 = table.sizes[0];
  const double n2 = table.sizes[1];
  const double scale = (n1 + n2) / (n1 * n2);
  CompensatedSum g;
  CompensatedSum v;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double y1 = table.at_risk[2 * r];
    const double y2 = table.at_risk[2 * r + 1];
    if (y1 <= 0.0 || y2 <= 0.0) continue;
    const double d1 = table.deaths[2 * r];
    const double d2 = table.deaths[2 * r + 1];
    const double y = y1 + y2;
    const double d = d1 + d2;
    const double w = fh_weight(table.survival_left[r], rho, gamma);
    const double base = y1 * y2 / y;
    g.add(w * base * (d1 / y1 - d2 / y2));
    v.add(w * w * base * (1.0 - (d - 1.0) / y) * d / y);
  }
  WeightedLogrank out;
  out.statistic = std::sqrt(scale) * g.value();
  out.variance = scale * v.value();
  out.degenerate = !(out.variance > 0.0);
  if (!out.degenerate) {
    out.z = out.statistic / std::sqrt(out.variance);
    out.pvalue = two_sided(out.z);
  }
  return out;
}

WeightedLogrank weighted_logrank(const SurvivalDataset& data, double rho, double gamma) {
  return weighted_logrank(data.view(), rho, gamma);
}

TestReport lee_test(const SurvivalDataset& data, const MvnOptions& options) {
  const WlrStatistic w = wlr_covariance(data);
  TestReport report = asymptotic_report("lee");
  const double v2 = w.sigma(1, 1);
  const double v3 = w.sigma(2, 2);
  if (!(v2 > 0.0) || !(v3 > 0.0)) {
    report.degenerate = true;
    report.note = "zero variance";
    return report;
  }
  const double c = std::max(std::abs(w.z[1]), std::abs(w.z[2]));
  report.statistic = c;
  const double rho = w.sigma(1, 2) / std::sqrt(v2 * v3);
  if (!std::isfinite(rho) || std::abs(rho) >= 1.0 - 1e-12) {
    report.pvalue = std::min(1.0, 2.0 * two_sided(c));
    report.note = "singular correlation; Bonferroni bound";
    return report;
  }
  Eigen::Matrix2d corr;
  corr << 1.0, rho, rho, 1.0;
  const std::array<double, 2> lo{-c, -c};
  const std::array<double, 2> hi{c, c};
  const MvnResult p = mvn_rectangle(corr, lo, hi, options);
  report.pvalue = std::clamp(1.0 - p.probability, 0.0, 1.0);
  return report;
}

TestReport maxcombo_test(const SurvivalDataset& data, const MvnOptions& options) {
  const WlrStatistic w = wlr_covariance(data);
  TestReport report = asymptotic_report("maxcombo");
  std::vector<Eigen::Index> live;
  for (Eigen::Index k = 0; k < 4; ++k)
    if (w.sigma(k, k) > 0.0) live.push_back(k);
  if (live.empty()) {
    report.degenerate = true;
    report.note = "zero variance";
    return report;
  }
  const auto d = static_cast<Eigen::Index>(live.size());
  Eigen::MatrixXd corr(d, d);
  double c = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) {
    c = std::max(c, std::abs(w.z[static_cast<std::size_t>(live[static_cast<std::size_t>(a)])]));
    for (Eigen::Index b = 0; b < d; ++b) {
      const Eigen::Index l = live[static_cast<std::size_t>(a)];
      const Eigen::Index m = live[static_cast<std::size_t>(b)];
      corr(a, b) = a == b ? 1.0 : w.sigma(l, m) / std::sqrt(w.sigma(l, l) * w.sigma(m, m));
    }
  }
  report.statistic = c;
  if (d < 4) report.note = "zero-variance components dropped";
  const double min_eigen = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(corr).eigenvalues()(0);
  if (min_eigen < 1e-8) {
    corr.diagonal().array() += 1e-8;
    report.note += report.note.empty() ? "" : "; ";
    report.note += "near-singular correlation; ridge 1e-8";
  }
  const std::vector<double> lo(static_cast<std::size_t>(d), -c);
  const std::vector<double> hi(static_cast<std::size_t>(d), c);
  const MvnResult p = mvn_rectangle(corr, lo, hi, options);
  report.pvalue = std::clamp(1.0 - p.probability, 0.0, 1.0);
  return report;
}

TestReport k_sample_logrank(const SurvivalDataset& data, LogrankWeight weight) {
  const RiskTable table = risk_table(data.view());
  const auto k = static_cast<Eigen::Index>(table.groups);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double* y = &table.at_risk[r * table.groups];
    const double* dk = &table.deaths[r * table.groups];
    double yt = 0.0;
    double dt = 0.0;
    for (Eigen::Index g = 0; g < k; ++g) {
      yt += y[g];
      dt += dk[g];
    }
    const double w = weight == LogrankWeight::unit ? 1.0 : table.survival_left[r];
    const double factor = (1.0 - (dt - 1.0) / yt) * dt;
    for (Eigen::Index a = 0; a < k; ++a) {
      u(a) += w * (dk[a] - dt * y[a] / yt);
      for (Eigen::Index b = 0; b < k; ++b)
        v(a, b) += w * w * factor * (y[a] / yt) * ((a == b ? 1.0 : 0.0) - y[b] / yt);
    }
  }

  TestReport report =
      asymptotic_report(weight == LogrankWeight::unit ? "logrank" : "peto_peto");
  // The full covariance has rank K - 1 at most; drop the last group.
  const Eigen::Index q = k - 1;
  const Eigen::VectorXd ur = u.head(q);
  const Eigen::MatrixXd vr = v.topLeftCorner(q, q);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(vr);
  const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double tolerance = 1e-10 * std::max(largest, 1e-300);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < q; ++i)
    if (eig.eigenvalues()(i) > tolerance) ++rank;
  if (rank == 0 || !(largest > 0.0)) {
    report.degenerate = true;
    report.note = "zero variance";
    return report;
  }
  double chi2 = 0.0;
  if (rank == q) {
    chi2 = ur.dot(vr.llt().solve(ur));
  } else {
    const Eigen::MatrixXd& vecs = eig.eigenvectors();
    for (Eigen::Index i = 0; i < q; ++i) {
      const double lambda = eig.eigenvalues()(i);
      if (lambda <= tolerance) continue;
      const double proj = vecs.col(i).dot(ur);
      chi2 += proj * proj / lambda;
    }
    report.note = "singular covariance; generalized inverse with df " + std::to_string(rank);
  }
  report.statistic = std::max(chi2, 0.0);
  report.pvalue = chi_square_sf(report.statistic, static_cast<double>(rank));
  return report;
}

double pepe_fleming_statistic(const SampleView& sample) {
  require_two_groups(sample.group_count, "pepe_fleming");
  const std::size_t n = sample.size();
  std::array<double, 2> size{0.0, 0.0};
  std::array<double, 2> last{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    size[sample.groups[i]] += 1.0;
    last[sample.groups[i]] = std::max(last[sample.groups[i]], sample.times[i]);
  }
  if (size[0] == 0.0 || size[1] == 0.0) return 0.0;
  const double horizon = std::min(last[0], last[1]);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sample.times[a] < sample.times[b]; });

  // Right-continuous failure KMs S and censoring KMs G. Between consecutive
  // times the value at the left end is G(t-) for the whole open interval.
  std::array<double, 2> s{1.0, 1.0};
  std::array<double, 2> c{1.0, 1.0};
  std::array<double, 2> risk = size;
  const double total = size[0] + size[1];
  CompensatedSum integral;
  double left = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = sample.times[order[i]];
    if (t > left) {
      const double right = std::min(t, horizon);
      if (right > left) {
        const double denom = size[0] * c[0] + size[1] * c[1];
        const double w = denom > 0.0 ? total * c[0] * c[1] / denom : 0.0;
        integral.add(w * (s[0] - s[1]) * (right - left));
      }
      left = t;
      if (left >= horizon) break;
    }
    std::array<double, 2> deaths{0.0, 0.0};
    std::array<double, 2> censored{0.0, 0.0};
    for (; i < n && sample.times[order[i]] == t; ++i) {
      const std::size_t r = order[i];
      (sample.events[r] ? deaths : censored)[sample.groups[r]] += 1.0;
    }
    for (std::size_t g = 0; g < 2; ++g) {
      if (risk[g] > 0.0) {
        s[g] *= 1.0 - deaths[g] / risk[g];
        c[g] *= 1.0 - censored[g] / risk[g];
      }
      risk[g] -= deaths[g] + censored[g];
    }
  }
  return integral.value();
}

TestReport pepe_fleming_test(const SurvivalDataset& data, const PermutationPlan& plan) {
  require_two_groups(data.group_count(), "pepe_fleming");
  const StatisticFn fn = [](const SampleView& sample) {
    return std::vector<StatisticValue>{{std::abs(pepe_fleming_statistic(sample)), false}};
  };
  const std::vector<std::string> names{"pepe_fleming"};
  return permutation_pvalue(data, fn, names, plan).front();
}

}  // namespace konp
