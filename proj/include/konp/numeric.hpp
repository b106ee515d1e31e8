#pragma once

#include <cstddef>
#include <functional>

namespace konp {

/// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)). libm erfc is accurate to a few
/// ulp, well inside 1e-12 absolute error.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);

double normal_quantile(double p);

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chi_square_sf(double x, double df);

/// Neumaier-compensated accumulator. The result depends only on the sequence of
/// added values, so a fixed iteration order gives bit-identical sums.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sum of non-negative values in 2^-60 fixed point. Each term is rounded down on
/// its own and integer addition is associative, so the total does not depend on
/// the order in which terms arrive. Good for up to about 2^60 in total.
class OrderFreeSum {
  __extension__ typedef unsigned __int128 Wide;

 public:
  void add(double x) { acc_ += static_cast<Wide>(x * kScale); }
  double value() const { return static_cast<double>(acc_) / kScale; }

 private:
  static constexpr double kScale = 1152921504606846976.0;  // 2^60
  Wide acc_ = 0;
};

/// Number of worker threads to use for a request of `requested` (0 = hardware).
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed dynamically; callers write results into slot i so the outcome does not
/// depend on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t index, unsigned worker)>& body);

}  // namespace konp
