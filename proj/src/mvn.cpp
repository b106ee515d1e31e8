#include "konp/mvn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "konp/error.hpp"
#include "konp/numeric.hpp"
#include "konp/rng.hpp"

namespace konp {

namespace {

constexpr std::size_t kMaxDimension = 8;
constexpr std::size_t kShifts = 12;
constexpr double kPivotZero = 1e-12;
constexpr double kPsdTolerance = 1e-10;

// Cholesky factor that tolerates semidefinite input: a vanishing pivot makes the
// coordinate a deterministic combination of the previous ones.
Eigen::MatrixXd semidefinite_cholesky(const Eigen::MatrixXd& a) {
  const Eigen::Index d = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -kPsdTolerance)
      throw ValidationError(ErrorCode::invalid_argument,
                            "mvn_rectangle: correlation matrix is not positive semidefinite");
    if (pivot <= kPivotZero) continue;
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double v = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

double inverse_phi(double p) {
  return normal_quantile(std::clamp(p, 1e-16, 1.0 - 1e-16));
}

class Integrand {
 public:
  Integrand(const Eigen::MatrixXd& l, std::span<const double> lower, std::span<const double> upper)
      : l_(l), lower_(lower), upper_(upper), y_(static_cast<std::size_t>(l.rows())) {}

  double operator()(const double* w) {
    const auto d = static_cast<std::size_t>(l_.rows());
    double f = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      double s = 0.0;
      for (std::size_t j = 0; j < i; ++j) s += l_(ii, static_cast<Eigen::Index>(j)) * y_[j];
      const double lii = l_(ii, ii);
      if (lii == 0.0) {
        if (s < lower_[i] || s > upper_[i]) return 0.0;
        y_[i] = 0.0;
        continue;
      }
      const double lo = normal_cdf((lower_[i] - s) / lii);
      const double hi = normal_cdf((upper_[i] - s) / lii);
      f *= hi - lo;
      if (f <= 0.0) return 0.0;
      if (i + 1 < d) y_[i] = inverse_phi(lo + w[i] * (hi - lo));
    }
    return f;
  }

 private:
  const Eigen::MatrixXd& l_;
  std::span<const double> lower_;
  std::span<const double> upper_;
  std::vector<double> y_;
};

}  // namespace

MvnResult mvn_rectangle(const Eigen::MatrixXd& correlation, std::span<const double> lower,
                        std::span<const double> upper, const MvnOptions& options) {
  const auto d = static_cast<std::size_t>(correlation.rows());
  if (d == 0 || correlation.cols() != correlation.rows() || lower.size() != d ||
      upper.size() != d)
    throw ValidationError(ErrorCode::invalid_argument, "mvn_rectangle: dimension mismatch");
  if (d > kMaxDimension)
    throw ValidationError(ErrorCode::invalid_argument, "mvn_rectangle: at most 8 dimensions");
  if (!correlation.allFinite() ||
      (correlation - correlation.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError(ErrorCode::invalid_argument,
                          "mvn_rectangle: correlation must be finite and symmetric");
  for (std::size_t i = 0; i < d; ++i)
    if (!(lower[i] <= upper[i]))
      return {0.0, 0.0, 0};

  const Eigen::MatrixXd l = semidefinite_cholesky(correlation);
  Integrand f(l, lower, upper);
  if (d == 1) return {f(nullptr), 0.0, 1};

  // Richtmyer generating vector: fractional parts of square roots of primes.
  static constexpr std::array<double, kMaxDimension> primes{2, 3, 5, 7, 11, 13, 17, 19};
  const std::size_t dims = d - 1;
  std::array<double, kMaxDimension> z{};
  for (std::size_t k = 0; k < dims; ++k) z[k] = std::fmod(std::sqrt(primes[k]), 1.0);

  RandomStream rng(options.seed);
  MvnResult result;
  std::array<double, kMaxDimension> w{};
  for (std::size_t points = 256;; points *= 2) {
    std::array<double, kShifts> estimates{};
    for (std::size_t s = 0; s < kShifts; ++s) {
      std::array<double, kMaxDimension> shift{};
      for (std::size_t k = 0; k < dims; ++k) shift[k] = rng.uniform();
      CompensatedSum sum;
      for (std::size_t n = 1; n <= points; ++n) {
        for (std::size_t k = 0; k < dims; ++k) {
          const double x = std::fmod(static_cast<double>(n) * z[k] + shift[k], 1.0);
          w[k] = std::abs(2.0 * x - 1.0);  // baker's transform
        }
        sum.add(f(w.data()));
      }
      estimates[s] = sum.value() / static_cast<double>(points);
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= kShifts;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(kShifts * (kShifts - 1));
    result.probability = std::clamp(mean, 0.0, 1.0);
    result.standard_error = std::sqrt(var);
    result.evaluations += points * kShifts;
    if (result.standard_error <= options.accuracy || result.evaluations >= options.max_evaluations)
      break;
  }
  return result;
}

}  // namespace konp
